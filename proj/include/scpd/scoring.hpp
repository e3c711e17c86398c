#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "scpd/common.hpp"

namespace scpd {

struct ScoringConfig {
  int short_window = 5;
  int long_window = 10;

  void validate() const {
    if (short_window < 1 || short_window > long_window)
      throw data_error("window sizes must satisfy 1 <= short <= long");
  }
};

/// Per-timestep anomaly scores. Z is the raw dual-window dissimilarity in
/// [0, 1]; Zstar = max(Z_t - Z_{t-1}, 0) emphasizes increases so that only
/// the first step of a new regime scores high. The first timestep has no
/// predecessor and scores 0 by convention.
struct ScoreSeries {
  std::vector<std::int64_t> timesteps;
  std::vector<double> z;
  std::vector<double> zstar;
  std::vector<std::int64_t> ranking;  // all timesteps by Zstar desc, ties to earlier t

  std::vector<std::int64_t> top_n(int n) const {
    const int m = std::min<int>(n, static_cast<int>(ranking.size()));
    return {ranking.begin(), ranking.begin() + m};
  }
};

namespace detail {

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace detail

/// Top left singular vector of the k x w matrix stacking the context
/// columns: the summarized normal-behavior vector. Computed by power
/// iteration on the w x w Gram matrix with a deterministic uniform start
/// (equivalent to starting from the column mean), which also fixes the
/// degenerate-tie case to the symmetric combination. The sign is chosen so
/// the result is aligned with the column mean; an SVD's sign is arbitrary
/// and an unlucky flip would turn a score Z into ~2 - Z.
///
/// An all-zero context (possible for attribute labels with no history)
/// yields the zero vector.
inline std::vector<double> normal_behavior(const std::vector<std::vector<double>>& context) {
  if (context.empty()) throw data_error("normal_behavior: empty context");
  const std::size_t w = context.size();
  const std::size_t k = context.front().size();
  for (const auto& c : context)
    if (c.size() != k) throw data_error("normal_behavior: inconsistent vector lengths");

  std::vector<std::vector<double>> gram(w, std::vector<double>(w));
  for (std::size_t i = 0; i < w; ++i)
    for (std::size_t j = i; j < w; ++j) gram[i][j] = gram[j][i] = detail::dot(context[i], context[j]);

  std::vector<double> b(w, 1.0 / static_cast<double>(w)), next(w);
  for (int iter = 0; iter < 500; ++iter) {
    for (std::size_t i = 0; i < w; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < w; ++j) s += gram[i][j] * b[j];
      next[i] = s;
    }
    double nrm = std::sqrt(detail::dot(next, next));
    if (nrm == 0.0) return std::vector<double>(k, 0.0);  // all-zero context
    double delta = 0.0;
    for (std::size_t i = 0; i < w; ++i) {
      next[i] /= nrm;
      delta = std::max(delta, std::abs(next[i] - b[i]));
    }
    b.swap(next);
    if (delta <= 1e-10) break;
  }

  std::vector<double> sigma(k, 0.0);
  for (std::size_t j = 0; j < w; ++j)
    for (std::size_t i = 0; i < k; ++i) sigma[i] += b[j] * context[j][i];
  double nrm = std::sqrt(detail::dot(sigma, sigma));
  if (nrm == 0.0) return std::vector<double>(k, 0.0);
  for (double& x : sigma) x /= nrm;

  std::vector<double> mean(k, 0.0);
  for (const auto& c : context)
    for (std::size_t i = 0; i < k; ++i) mean[i] += c[i] / static_cast<double>(w);
  if (detail::dot(sigma, mean) < 0.0)
    for (double& x : sigma) x = -x;
  return sigma;
}

namespace detail {

// One window's dissimilarity. Inputs are unit vectors or, under the
// zero-history rule, zero vectors: absent-vs-absent compares as identical
// (score 0) while a presence transition in either direction scores 1.
inline double window_score(const std::vector<double>& sig, const std::vector<double>& nb) {
  double d = 0.0, ns = 0.0, nn = 0.0;
  for (std::size_t i = 0; i < sig.size(); ++i) {
    d += sig[i] * nb[i];
    ns += sig[i] * sig[i];
    nn += nb[i] * nb[i];
  }
  if (ns == 0.0 && nn == 0.0) return 0.0;
  return 1.0 - d;
}

}  // namespace detail

/// Z = max over the two windows of (1 - cosine similarity), clamped into
/// [0, 1].
inline double score_step(const std::vector<double>& sig, const std::vector<double>& nb_short,
                         const std::vector<double>& nb_long) {
  return std::clamp(
      std::max(detail::window_score(sig, nb_short), detail::window_score(sig, nb_long)), 0.0, 1.0);
}

/// Score a series of L2-normalized signature vectors. Context for step t is
/// the min(w, t-1) most recent prior vectors (warm start with truncated
/// windows until they fill). For t beyond the warm-up, scores depend only
/// on the last long_window + 1 signatures.
inline ScoreSeries score_series(const std::vector<std::vector<double>>& signatures,
                                const ScoringConfig& cfg,
                                const std::vector<std::int64_t>& timesteps = {}) {
  cfg.validate();
  const std::size_t n = signatures.size();
  if (n < 2) throw data_error("score_series: need at least 2 signatures");
  if (!timesteps.empty() && timesteps.size() != n)
    throw data_error("score_series: timestep list length mismatch");

  ScoreSeries out;
  out.timesteps.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    out.timesteps[i] = timesteps.empty() ? static_cast<std::int64_t>(i) + 1 : timesteps[i];
  out.z.assign(n, 0.0);
  out.zstar.assign(n, 0.0);

  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t ws = std::min<std::size_t>(cfg.short_window, i);
    const std::size_t wl = std::min<std::size_t>(cfg.long_window, i);
    std::vector<std::vector<double>> ctx_l(signatures.begin() + (i - wl), signatures.begin() + i);
    std::vector<double> nb_l = normal_behavior(ctx_l);
    std::vector<double> nb_s;
    if (ws == wl) {
      nb_s = nb_l;
    } else {
      std::vector<std::vector<double>> ctx_s(signatures.begin() + (i - ws), signatures.begin() + i);
      nb_s = normal_behavior(ctx_s);
    }
    out.z[i] = score_step(signatures[i], nb_s, nb_l);
    // The first scored step has no measured predecessor (Z_1 is 0 by
    // convention, not by comparison), so its increment would be a raw noise
    // sample that outranks genuine but subtle changes. Leave it at 0.
    out.zstar[i] = i == 1 ? 0.0 : std::max(out.z[i] - out.z[i - 1], 0.0);
  }

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (out.zstar[a] != out.zstar[b]) return out.zstar[a] > out.zstar[b];
    return out.timesteps[a] < out.timesteps[b];
  });
  out.ranking.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.ranking[i] = out.timesteps[order[i]];
  return out;
}

/// Attribute scoring: one independent ScoreSeries per label plus an
/// aggregate whose Zstar at each step is the max over labels. Labels come
/// from the union vocabulary across timesteps; a label missing at some
/// timestep is padded with a zero vector (no mass), so its appearance or
/// disappearance registers as a one-step anomaly and steady absence does not.
struct AttributeScores {
  std::map<std::string, ScoreSeries> per_label;
  ScoreSeries aggregated;
};

inline AttributeScores score_attribute_series(
    const std::vector<std::map<std::string, std::vector<double>>>& per_step_labels,
    const ScoringConfig& cfg, const std::vector<std::int64_t>& timesteps = {}) {
  cfg.validate();
  const std::size_t n = per_step_labels.size();
  if (n < 2) throw data_error("score_attribute_series: need at least 2 timesteps");

  std::vector<std::string> vocab;
  std::size_t dim = 0;
  for (const auto& step : per_step_labels)
    for (const auto& [label, vec] : step) {
      vocab.push_back(label);
      if (dim == 0) dim = vec.size();
      if (vec.size() != dim)
        throw data_error("score_attribute_series: inconsistent signature lengths");
    }
  std::sort(vocab.begin(), vocab.end());
  vocab.erase(std::unique(vocab.begin(), vocab.end()), vocab.end());
  if (vocab.empty()) throw data_error("score_attribute_series: empty label set");

  AttributeScores out;
  for (const auto& label : vocab) {
    std::vector<std::vector<double>> series(n, std::vector<double>(dim, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
      auto it = per_step_labels[i].find(label);
      if (it != per_step_labels[i].end()) series[i] = it->second;
    }
    out.per_label[label] = score_series(series, cfg, timesteps);
  }

  const ScoreSeries& first = out.per_label.begin()->second;
  out.aggregated.timesteps = first.timesteps;
  out.aggregated.z.assign(n, 0.0);
  out.aggregated.zstar.assign(n, 0.0);
  for (const auto& [label, series] : out.per_label)
    for (std::size_t i = 0; i < n; ++i) {
      out.aggregated.z[i] = std::max(out.aggregated.z[i], series.z[i]);
      out.aggregated.zstar[i] = std::max(out.aggregated.zstar[i], series.zstar[i]);
    }

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (out.aggregated.zstar[a] != out.aggregated.zstar[b])
      return out.aggregated.zstar[a] > out.aggregated.zstar[b];
    return out.aggregated.timesteps[a] < out.aggregated.timesteps[b];
  });
  out.aggregated.ranking.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.aggregated.ranking[i] = out.aggregated.timesteps[order[i]];
  return out;
}

}  // namespace scpd
