#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "scpd/common.hpp"
#include "scpd/graph.hpp"
#include "scpd/rng.hpp"

namespace scpd {

enum class AnomalyType { event, change_point, attribute_change_point };

inline const char* to_string(AnomalyType t) {
  switch (t) {
    case AnomalyType::event: return "event";
    case AnomalyType::change_point: return "change_point";
    default: return "attribute_change_point";
  }
}

inline AnomalyType anomaly_type_from_string(const std::string& s) {
  if (s == "event") return AnomalyType::event;
  if (s == "change_point") return AnomalyType::change_point;
  if (s == "attribute_change_point") return AnomalyType::attribute_change_point;
  throw data_error("unknown anomaly type '" + s + "'");
}

struct Anomaly {
  std::int64_t timestep = 0;
  AnomalyType type = AnomalyType::event;
};

/// Ground truth emitted by the generators and consumed by evaluation.
struct AnomalySchedule {
  std::vector<Anomaly> anomalies;

  std::vector<std::int64_t> timesteps() const {
    std::vector<std::int64_t> out;
    out.reserve(anomalies.size());
    for (const auto& a : anomalies) out.push_back(a.timestep);
    return out;
  }
};

enum class AttributeMode { none, homogeneous, heterogeneous };

/// One row of an SBM experiment table. A non-event row defines the
/// generative model from start_time onward; an event row overrides it for
/// exactly its own timestep.
struct SbmSegment {
  std::int64_t start_time = 0;
  std::vector<int> community_sizes;
  double p_in = 0.0;
  double p_out = 0.0;
  AttributeMode attribute_mode = AttributeMode::none;
  bool event = false;
};

struct SbmSchedule {
  std::vector<SbmSegment> rows;
  std::int64_t total_steps = 151;

  void validate() const {
    if (rows.empty()) throw data_error("SBM schedule has no rows");
    if (rows.front().event) throw data_error("first SBM schedule row cannot be an event");
    if (total_steps < 1) throw data_error("total_steps must be >= 1");
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& r = rows[i];
      if (i > 0 && r.start_time <= rows[i - 1].start_time)
        throw data_error("SBM schedule start times must be strictly increasing");
      if (r.p_in < 0.0 || r.p_in > 1.0 || r.p_out < 0.0 || r.p_out > 1.0)
        throw data_error("SBM probabilities must lie in [0, 1]");
      std::int64_t total = 0;
      for (int sz : r.community_sizes) {
        if (sz < 0) throw data_error("negative community size");
        total += sz;
      }
      if (total == 0) throw data_error("community sizes sum to zero");
      if (r.attribute_mode == AttributeMode::homogeneous && r.community_sizes.size() % 2 != 0)
        throw data_error("homogeneous attribute mode needs an even community count");
    }
  }
};

struct BaSegment {
  std::int64_t start_time = 0;
  int m = 1;
};

struct BaSchedule {
  std::vector<BaSegment> rows;
  int node_count = 500;
  std::int64_t total_steps = 151;

  void validate() const {
    if (rows.empty()) throw data_error("BA schedule has no rows");
    if (total_steps < 1) throw data_error("total_steps must be >= 1");
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i > 0 && rows[i].start_time <= rows[i - 1].start_time)
        throw data_error("BA schedule start times must be strictly increasing");
      if (rows[i].m < 1) throw data_error("BA attachment count m must be >= 1");
      if (rows[i].m >= node_count)
        throw data_error("BA attachment count m=" + std::to_string(rows[i].m) +
                         " must be below node count " + std::to_string(node_count));
    }
  }
};

namespace detail {

/// Sample G(n, p) edges restricted to one community block [base, base+n):
/// geometric edge-skipping over the ordered pair sequence, O(edges) draws.
inline void sample_intra_block(Rng& rng, int base, int n, double p, std::vector<EdgeRec>& out) {
  if (n < 2 || p <= 0.0) return;
  if (p >= 1.0) {
    for (int v = 1; v < n; ++v)
      for (int w = 0; w < v; ++w) out.push_back({base + v, base + w, 1.0});
    return;
  }
  const double lg = std::log1p(-p);
  std::int64_t v = 1, w = -1;
  while (v < n) {
    const double u = rng.next_double();
    w += 1 + static_cast<std::int64_t>(std::floor(std::log1p(-u) / lg));
    while (w >= v && v < n) {
      w -= v;
      ++v;
    }
    if (v < n) out.push_back({base + v, base + w, 1.0});
  }
}

/// Sample the bipartite block between [base_a, base_a+na) and
/// [base_b, base_b+nb) with edge probability p.
inline void sample_cross_block(Rng& rng, int base_a, int na, int base_b, int nb, double p,
                               std::vector<EdgeRec>& out) {
  if (na == 0 || nb == 0 || p <= 0.0) return;
  const std::int64_t total = static_cast<std::int64_t>(na) * nb;
  if (p >= 1.0) {
    for (std::int64_t t = 0; t < total; ++t)
      out.push_back({base_a + t / nb, base_b + t % nb, 1.0});
    return;
  }
  const double lg = std::log1p(-p);
  std::int64_t idx = -1;
  while (true) {
    const double u = rng.next_double();
    idx += 1 + static_cast<std::int64_t>(std::floor(std::log1p(-u) / lg));
    if (idx >= total) break;
    out.push_back({base_a + idx / nb, base_b + idx % nb, 1.0});
  }
}

inline std::optional<AttributeTable> sbm_attributes(Rng& rng, const std::vector<int>& sizes,
                                                    AttributeMode mode) {
  if (mode == AttributeMode::none) return std::nullopt;
  int n = 0;
  for (int sz : sizes) n += sz;
  AttributeColumn col;
  col.name = "label";
  col.kind = AttrKind::categorical;
  col.values.reserve(static_cast<std::size_t>(n));
  if (mode == AttributeMode::homogeneous) {
    // all nodes in a community share a label; first half of the communities
    // get "one", the rest "two"
    const std::size_t half = sizes.size() / 2;
    for (std::size_t c = 0; c < sizes.size(); ++c)
      for (int i = 0; i < sizes[c]; ++i) col.values.push_back(c < half ? "one" : "two");
  } else {
    for (int i = 0; i < n; ++i) col.values.push_back(rng.bernoulli(0.5) ? "one" : "two");
  }
  AttributeTable table;
  table.columns.push_back(std::move(col));
  return table;
}

inline Snapshot sample_sbm_snapshot(std::int64_t t, const SbmSegment& seg, std::uint64_t seed) {
  Rng rng(seed);
  const auto& sizes = seg.community_sizes;
  std::vector<int> bases(sizes.size());
  int n = 0;
  for (std::size_t c = 0; c < sizes.size(); ++c) {
    bases[c] = n;
    n += sizes[c];
  }
  std::vector<EdgeRec> edges;
  for (std::size_t c = 0; c < sizes.size(); ++c)
    sample_intra_block(rng, bases[c], sizes[c], seg.p_in, edges);
  for (std::size_t a = 0; a < sizes.size(); ++a)
    for (std::size_t b = a + 1; b < sizes.size(); ++b)
      sample_cross_block(rng, bases[a], sizes[a], bases[b], sizes[b], seg.p_out, edges);
  auto attrs = sbm_attributes(rng, sizes, seg.attribute_mode);
  return build_snapshot_dense(t, n, edges, std::move(attrs));
}

/// Preferential attachment snapshot: an m-clique seed, then each new node
/// attaches to m distinct existing nodes chosen proportionally to degree.
inline Snapshot sample_ba_snapshot(std::int64_t t, int n, int m, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<EdgeRec> edges;
  edges.reserve(static_cast<std::size_t>(m) * (m - 1) / 2 + static_cast<std::size_t>(m) * (n - m));
  std::vector<int> repeated;  // one entry per endpoint, so frequency = degree
  repeated.reserve(edges.capacity() * 2);
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      edges.push_back({i, j, 1.0});
      repeated.push_back(i);
      repeated.push_back(j);
    }
  std::vector<int> targets;
  for (int u = m; u < n; ++u) {
    targets.clear();
    if (repeated.empty()) {
      // degree-0 seed (m = 1): attach to the seed node directly
      for (int i = 0; i < m; ++i) targets.push_back(i);
    } else {
      std::unordered_set<int> chosen;
      while (static_cast<int>(chosen.size()) < m) {
        int cand = repeated[rng.next_index(static_cast<std::int64_t>(repeated.size()))];
        if (chosen.insert(cand).second) targets.push_back(cand);
      }
    }
    for (int v : targets) {
      edges.push_back({u, v, 1.0});
      repeated.push_back(u);
      repeated.push_back(v);
    }
  }
  return build_snapshot_dense(t, n, edges, std::nullopt);
}

/// Segment active at timestep t: the latest persistent row with
/// start_time <= t, unless an event row starts exactly at t.
template <typename Row>
inline const Row& active_row(const std::vector<Row>& rows, std::int64_t t,
                             bool (*is_event)(const Row&)) {
  const Row* persistent = &rows.front();
  for (const auto& r : rows) {
    if (r.start_time > t) break;
    if (is_event(r)) {
      if (r.start_time == t) return r;
    } else {
      persistent = &r;
    }
  }
  return *persistent;
}

inline AnomalySchedule sbm_ground_truth(const SbmSchedule& schedule) {
  AnomalySchedule truth;
  for (std::size_t i = 1; i < schedule.rows.size(); ++i) {
    const auto& r = schedule.rows[i];
    if (r.start_time > schedule.total_steps) continue;
    AnomalyType type;
    if (r.event) {
      type = AnomalyType::event;
    } else {
      // find the previous persistent row to classify the change
      std::size_t p = i;
      do { --p; } while (p > 0 && schedule.rows[p].event);
      const auto& prev = schedule.rows[p];
      const bool structural = r.community_sizes != prev.community_sizes ||
                              r.p_in != prev.p_in || r.p_out != prev.p_out;
      type = structural ? AnomalyType::change_point
                        : (r.attribute_mode != prev.attribute_mode
                               ? AnomalyType::attribute_change_point
                               : AnomalyType::change_point);
    }
    truth.anomalies.push_back({r.start_time, type});
  }
  return truth;
}

}  // namespace detail

/// Snapshots are resampled independently at every timestep from the active
/// segment's model; there is no edge persistence across steps. Each
/// timestep draws from its own derived RNG stream.
inline std::pair<std::vector<Snapshot>, AnomalySchedule> generate_sbm_series(
    const SbmSchedule& schedule, std::uint64_t seed) {
  schedule.validate();
  std::vector<Snapshot> snaps;
  snaps.reserve(static_cast<std::size_t>(schedule.total_steps));
  for (std::int64_t t = 1; t <= schedule.total_steps; ++t) {
    const SbmSegment& seg = detail::active_row<SbmSegment>(
        schedule.rows, t, [](const SbmSegment& r) { return r.event; });
    snaps.push_back(detail::sample_sbm_snapshot(t, seg, derive_seed(seed, t)));
  }
  return {std::move(snaps), detail::sbm_ground_truth(schedule)};
}

inline std::pair<std::vector<Snapshot>, AnomalySchedule> generate_ba_series(
    const BaSchedule& schedule, std::uint64_t seed) {
  schedule.validate();
  std::vector<Snapshot> snaps;
  snaps.reserve(static_cast<std::size_t>(schedule.total_steps));
  for (std::int64_t t = 1; t <= schedule.total_steps; ++t) {
    const BaSegment& seg = detail::active_row<BaSegment>(
        schedule.rows, t, [](const BaSegment&) { return false; });
    snaps.push_back(detail::sample_ba_snapshot(t, schedule.node_count, seg.m, derive_seed(seed, t)));
  }
  AnomalySchedule truth;
  for (std::size_t i = 1; i < schedule.rows.size(); ++i)
    if (schedule.rows[i].start_time <= schedule.total_steps)
      truth.anomalies.push_back({schedule.rows[i].start_time, AnomalyType::change_point});
  return {std::move(snaps), truth};
}

namespace detail {

inline std::vector<int> scaled_sizes(std::initializer_list<int> base, double scale) {
  std::vector<int> out;
  out.reserve(base.size());
  for (int b : base) {
    int s = static_cast<int>(std::lround(b * scale));
    if (s < 2) throw data_error("scale too small: community would have fewer than 2 nodes");
    out.push_back(s);
  }
  return out;
}

}  // namespace detail

/// Built-in SBM change-point + event benchmark: 151 steps over 4/10/2/4
/// equal communities (1200 nodes at scale 1), events as one-step boosts of
/// the cross-community connectivity from 0.005 to 0.015.
inline SbmSchedule sbm_hybrid_schedule(double scale = 1.0) {
  auto c4 = detail::scaled_sizes({300, 300, 300, 300}, scale);
  auto c10 = detail::scaled_sizes({120, 120, 120, 120, 120, 120, 120, 120, 120, 120}, scale);
  auto c2 = detail::scaled_sizes({600, 600}, scale);
  SbmSchedule sch;
  sch.total_steps = 151;
  sch.rows = {
      {0, c4, 0.030, 0.005, AttributeMode::none, false},
      {16, c4, 0.030, 0.015, AttributeMode::none, true},
      {31, c10, 0.030, 0.005, AttributeMode::none, false},
      {61, c10, 0.030, 0.015, AttributeMode::none, true},
      {76, c2, 0.030, 0.005, AttributeMode::none, false},
      {91, c2, 0.030, 0.015, AttributeMode::none, true},
      {106, c4, 0.030, 0.005, AttributeMode::none, false},
      {136, c4, 0.030, 0.015, AttributeMode::none, true},
  };
  return sch;
}

/// Built-in SBM attribute benchmark: the community structure follows the
/// 4/10/2/4 sequence while the binary node attribute alternates between
/// community-aligned (homogeneous) and independent (heterogeneous).
inline SbmSchedule sbm_attribute_schedule(double scale = 1.0) {
  auto c4 = detail::scaled_sizes({300, 300, 300, 300}, scale);
  auto c10 = detail::scaled_sizes({120, 120, 120, 120, 120, 120, 120, 120, 120, 120}, scale);
  auto c2 = detail::scaled_sizes({600, 600}, scale);
  SbmSchedule sch;
  sch.total_steps = 151;
  sch.rows = {
      {0, c4, 0.030, 0.005, AttributeMode::homogeneous, false},
      {16, c4, 0.030, 0.005, AttributeMode::heterogeneous, false},
      {31, c10, 0.030, 0.005, AttributeMode::heterogeneous, false},
      {61, c10, 0.030, 0.005, AttributeMode::homogeneous, false},
      {76, c2, 0.030, 0.005, AttributeMode::homogeneous, false},
      {91, c2, 0.030, 0.005, AttributeMode::heterogeneous, false},
      {106, c4, 0.030, 0.005, AttributeMode::heterogeneous, false},
      {136, c4, 0.030, 0.005, AttributeMode::homogeneous, false},
  };
  return sch;
}

/// Built-in evolving-size SBM benchmark: the node set grows from 600 to
/// 1200 nodes and communities split/merge. New nodes always take fresh ids
/// appended after existing ones; a split halves a community's id range, so
/// consecutive id ranges sized by each row reproduce the intended locality
/// (early rows change only new nodes, the t=91 split only initial ones).
inline SbmSchedule sbm_evolving_schedule(double scale = 1.0) {
  SbmSchedule sch;
  sch.total_steps = 151;
  sch.rows = {
      {0, detail::scaled_sizes({300, 300}, scale), 0.030, 0.005, AttributeMode::none, false},
      {16, detail::scaled_sizes({300, 300, 300}, scale), 0.030, 0.005, AttributeMode::none, false},
      {31, detail::scaled_sizes({300, 300, 300, 300}, scale), 0.030, 0.005, AttributeMode::none,
       false},
      {61, detail::scaled_sizes({300, 300, 150, 150, 150, 150}, scale), 0.030, 0.005,
       AttributeMode::none, false},
      {76, detail::scaled_sizes({300, 300, 300, 300}, scale), 0.030, 0.005, AttributeMode::none,
       false},
      {91, detail::scaled_sizes({150, 150, 150, 150, 300, 300}, scale), 0.030, 0.005,
       AttributeMode::none, false},
      {106, detail::scaled_sizes({300, 300, 300, 300}, scale), 0.030, 0.005, AttributeMode::none,
       false},
      {136, detail::scaled_sizes({300, 300, 300, 300}, scale), 0.030, 0.015, AttributeMode::none,
       true},
  };
  return sch;
}

/// Built-in densifying BA benchmark: the attachment count m steps 1 through
/// 8 over 151 steps on 500-node snapshots (at scale 1).
inline BaSchedule ba_change_schedule(double scale = 1.0) {
  BaSchedule sch;
  sch.node_count = static_cast<int>(std::lround(500 * scale));
  sch.total_steps = 151;
  sch.rows = {{0, 1}, {16, 2}, {31, 3}, {61, 4}, {76, 5}, {91, 6}, {106, 7}, {136, 8}};
  if (sch.node_count <= 8) throw data_error("scale too small for the BA benchmark");
  return sch;
}

/// Named benchmark dispatch. Scale multiplies community sizes / node counts
/// while keeping probabilities and times fixed.
inline std::pair<std::vector<Snapshot>, AnomalySchedule> builtin_experiment(
    const std::string& name, double scale, std::uint64_t seed) {
  if (name == "sbm_hybrid") return generate_sbm_series(sbm_hybrid_schedule(scale), seed);
  if (name == "sbm_attribute") return generate_sbm_series(sbm_attribute_schedule(scale), seed);
  if (name == "sbm_evolving") return generate_sbm_series(sbm_evolving_schedule(scale), seed);
  if (name == "ba_change") return generate_ba_series(ba_change_schedule(scale), seed);
  throw data_error("unknown experiment '" + name +
                   "' (expected sbm_hybrid, sbm_attribute, sbm_evolving or ba_change)");
}

inline bool experiment_has_attributes(const std::string& name) { return name == "sbm_attribute"; }

}  // namespace scpd
