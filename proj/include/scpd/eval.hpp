#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "scpd/common.hpp"
#include "scpd/dos.hpp"
#include "scpd/generators.hpp"
#include "scpd/oracle.hpp"
#include "scpd/parallel.hpp"
#include "scpd/scoring.hpp"

namespace scpd {

/// Fraction of ground-truth anomalies among the n highest-scoring
/// timesteps. n defaults to the truth size.
inline double hits_at_n(const ScoreSeries& scores, const AnomalySchedule& truth, int n = 0) {
  if (truth.anomalies.empty()) throw data_error("hits_at_n: empty ground truth");
  if (n == 0) n = static_cast<int>(truth.anomalies.size());
  if (n < 1) throw data_error("hits_at_n: n must be >= 1");
  std::set<std::int64_t> scored(scores.timesteps.begin(), scores.timesteps.end());
  for (const auto& a : truth.anomalies)
    if (!scored.count(a.timestep))
      throw data_error("hits_at_n: score series does not cover truth timestep " +
                       std::to_string(a.timestep));
  std::set<std::int64_t> truth_set;
  for (const auto& a : truth.anomalies) truth_set.insert(a.timestep);
  int hit = 0;
  for (std::int64_t t : scores.top_n(n))
    if (truth_set.count(t)) ++hit;
  return static_cast<double>(hit) / static_cast<double>(truth_set.size());
}

struct PhaseTimings {
  double generate_s = 0.0;
  double embed_s = 0.0;
  double score_s = 0.0;
};

struct SeedResult {
  std::uint64_t seed = 0;
  double hits = 0.0;
  std::vector<std::int64_t> top;  // top-|truth| timesteps
  PhaseTimings timings;
  std::int64_t edges = 0;
};

struct ExperimentReport {
  std::string experiment;
  double scale = 1.0;
  std::string embedding;  // "dos" or "lad"
  DosConfig dos;
  ScoringConfig scoring;
  AnomalySchedule truth;
  std::vector<SeedResult> per_seed;
  double hits_mean = 0.0;
  double hits_std = 0.0;
  std::int64_t total_edges = 0;
};

namespace detail {

using clock = std::chrono::steady_clock;

inline double seconds_since(clock::time_point start) {
  return std::chrono::duration<double>(clock::now() - start).count();
}

}  // namespace detail

/// Baseline embedding series: all eigenvalues per snapshot, zero-padded to
/// the largest node count so evolving-size series stay comparable, then
/// L2-normalized.
inline std::vector<std::vector<double>> lad_series(const std::vector<Snapshot>& snaps,
                                                   unsigned threads = 0) {
  std::size_t max_n = 0;
  for (const auto& s : snaps) max_n = std::max(max_n, static_cast<std::size_t>(s.node_count));
  std::vector<std::vector<double>> out(snaps.size());
  parallel_for(static_cast<std::int64_t>(snaps.size()), threads, [&](std::int64_t i) {
    std::vector<double> ev = lad_embedding(snaps[i]);
    ev.resize(max_n, 0.0);
    double nrm = 0.0;
    for (double x : ev) nrm += x * x;
    nrm = std::sqrt(nrm);
    if (nrm > 0.0)
      for (double& x : ev) x /= nrm;
    out[i] = std::move(ev);
  });
  return out;
}

inline std::vector<std::vector<double>> signature_columns(const std::vector<SignatureVector>& sigs) {
  std::vector<std::vector<double>> out;
  out.reserve(sigs.size());
  for (const auto& s : sigs) out.push_back(s.bins);
  return out;
}

/// One full generate -> embed -> score -> evaluate pipeline per seed.
/// Experiments with attributes are scored through the per-label local DOS
/// pipeline (aggregated over labels); the others through the global DOS
/// (or the LAD baseline when embedding == "lad").
inline ExperimentReport run_experiment(const std::string& name, double scale,
                                       const DosConfig& dos_cfg, const ScoringConfig& scoring_cfg,
                                       const std::vector<std::uint64_t>& seeds,
                                       const std::string& embedding = "dos",
                                       unsigned threads = 0) {
  if (seeds.empty()) throw data_error("run_experiment: no seeds");
  if (embedding != "dos" && embedding != "lad")
    throw data_error("unknown embedding '" + embedding + "'");
  ExperimentReport report;
  report.experiment = name;
  report.scale = scale;
  report.embedding = embedding;
  report.dos = dos_cfg;
  report.scoring = scoring_cfg;

  for (std::uint64_t seed : seeds) {
    SeedResult res;
    res.seed = seed;
    auto t0 = detail::clock::now();
    auto [snaps, truth] = builtin_experiment(name, scale, seed);
    res.timings.generate_s = detail::seconds_since(t0);
    report.truth = truth;
    for (const auto& s : snaps) res.edges += s.edge_count();

    std::vector<std::int64_t> timesteps;
    timesteps.reserve(snaps.size());
    for (const auto& s : snaps) timesteps.push_back(s.timestep);

    DosConfig cfg = dos_cfg;
    cfg.rng_seed = seed;
    ScoreSeries scores;
    if (experiment_has_attributes(name) && embedding == "dos") {
      auto t1 = detail::clock::now();
      EmbeddedSeries emb = embed_series(snaps, cfg, std::string("label"), threads);
      res.timings.embed_s = detail::seconds_since(t1);
      auto t2 = detail::clock::now();
      std::vector<std::map<std::string, std::vector<double>>> per_step(snaps.size());
      for (std::size_t i = 0; i < snaps.size(); ++i)
        for (const auto& sig : emb.local[i]) per_step[i][sig.label] = sig.bins;
      scores = score_attribute_series(per_step, scoring_cfg, timesteps).aggregated;
      res.timings.score_s = detail::seconds_since(t2);
    } else if (embedding == "lad") {
      auto t1 = detail::clock::now();
      auto columns = lad_series(snaps, threads);
      res.timings.embed_s = detail::seconds_since(t1);
      auto t2 = detail::clock::now();
      scores = score_series(columns, scoring_cfg, timesteps);
      res.timings.score_s = detail::seconds_since(t2);
    } else {
      auto t1 = detail::clock::now();
      EmbeddedSeries emb = embed_series(snaps, cfg, std::nullopt, threads);
      res.timings.embed_s = detail::seconds_since(t1);
      auto t2 = detail::clock::now();
      scores = score_series(signature_columns(emb.global), scoring_cfg, timesteps);
      res.timings.score_s = detail::seconds_since(t2);
    }

    res.hits = hits_at_n(scores, truth);
    res.top = scores.top_n(static_cast<int>(truth.anomalies.size()));
    report.total_edges += res.edges;
    report.per_seed.push_back(std::move(res));
  }

  double mean = 0.0;
  for (const auto& r : report.per_seed) mean += r.hits;
  mean /= static_cast<double>(report.per_seed.size());
  double var = 0.0;
  for (const auto& r : report.per_seed) var += (r.hits - mean) * (r.hits - mean);
  var /= static_cast<double>(report.per_seed.size());
  report.hits_mean = mean;
  report.hits_std = std::sqrt(var);
  return report;
}

struct SweepRow {
  std::string parameter;
  double value = 0.0;
  double hits_mean = 0.0;
  double hits_std = 0.0;
};

/// Per-axis hyperparameter sweep: each listed value replaces one parameter
/// while the others stay at the provided defaults.
inline std::vector<SweepRow> sensitivity_sweep(const std::string& name, double scale,
                                               const DosConfig& defaults,
                                               const ScoringConfig& scoring_cfg,
                                               const std::map<std::string, std::vector<int>>& grid,
                                               const std::vector<std::uint64_t>& seeds,
                                               unsigned threads = 0) {
  if (grid.empty()) throw data_error("sensitivity_sweep: empty grid");
  std::vector<SweepRow> rows;
  for (const auto& [param, values] : grid) {
    for (int v : values) {
      DosConfig cfg = defaults;
      if (param == "k" || param == "bins")
        cfg.n_bins = v;
      else if (param == "nz")
        cfg.n_probe = v;
      else if (param == "nm")
        cfg.n_moments = v;
      else
        throw data_error("unknown sweep parameter '" + param + "' (expected k, nz or nm)");
      ExperimentReport rep = run_experiment(name, scale, cfg, scoring_cfg, seeds, "dos", threads);
      rows.push_back({param, static_cast<double>(v), rep.hits_mean, rep.hits_std});
    }
  }
  return rows;
}

struct ScalingPoint {
  double scale = 1.0;
  std::int64_t edges = 0;
  double embed_s = 0.0;
};

struct ScalingReport {
  std::vector<ScalingPoint> points;
  double slope = 0.0;  // seconds per edge, fit through the origin
  double r_squared = 0.0;
};

/// Embedding wall-clock against total edge count over a list of scale
/// factors, with a least-squares line through the origin. R^2 is computed
/// against the centered total sum of squares.
inline ScalingReport scaling_probe(const std::string& name, const std::vector<double>& scales,
                                   const DosConfig& dos_cfg, std::uint64_t seed,
                                   unsigned threads = 0, std::int64_t max_steps = 0) {
  if (scales.size() < 3) throw data_error("scaling_probe: need at least 3 scale factors");
  ScalingReport report;
  for (double scale : scales) {
    auto [snaps, truth] = builtin_experiment(name, scale, seed);
    (void)truth;
    if (max_steps > 0 && static_cast<std::int64_t>(snaps.size()) > max_steps)
      snaps.resize(static_cast<std::size_t>(max_steps));
    std::int64_t edges = 0;
    for (const auto& s : snaps) edges += s.edge_count();
    DosConfig cfg = dos_cfg;
    cfg.rng_seed = seed;
    auto t0 = detail::clock::now();
    embed_series(snaps, cfg, std::nullopt, threads);
    report.points.push_back({scale, edges, detail::seconds_since(t0)});
  }

  double sxy = 0.0, sxx = 0.0, ybar = 0.0;
  for (const auto& p : report.points) {
    sxy += static_cast<double>(p.edges) * p.embed_s;
    sxx += static_cast<double>(p.edges) * static_cast<double>(p.edges);
    ybar += p.embed_s;
  }
  ybar /= static_cast<double>(report.points.size());
  report.slope = sxy / sxx;
  double ss_res = 0.0, ss_tot = 0.0;
  for (const auto& p : report.points) {
    const double fit = report.slope * static_cast<double>(p.edges);
    ss_res += (p.embed_s - fit) * (p.embed_s - fit);
    ss_tot += (p.embed_s - ybar) * (p.embed_s - ybar);
  }
  report.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 0.0;
  return report;
}

}  // namespace scpd
