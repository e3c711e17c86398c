#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "scpd/common.hpp"
#include "scpd/graph.hpp"
#include "scpd/laplacian.hpp"
#include "scpd/parallel.hpp"
#include "scpd/rng.hpp"

namespace scpd {

enum class Damping { jackson, none };

struct DosConfig {
  int n_probe = 100;    // number of stochastic trace probes
  int n_moments = 20;   // Chebyshev moments
  int n_bins = 50;      // histogram bins over the spectrum range
  std::uint64_t rng_seed = 0;
  Damping damping = Damping::jackson;

  void validate() const {
    if (n_probe < 1) throw data_error("n_probe must be >= 1");
    if (n_moments < 2) throw data_error("n_moments must be >= 2");
    if (n_bins < 2) throw data_error("n_bins must be >= 2");
  }
};

enum class SignatureKind { global_dos, local_dos };

/// k-dimensional nonnegative spectral histogram of one snapshot; the fixed
/// size embedding compared across timesteps.
struct SignatureVector {
  std::int64_t timestep = 0;
  SignatureKind kind = SignatureKind::global_dos;
  std::string label;  // attribute label for local_dos, empty otherwise
  std::vector<double> bins;

  double sum() const {
    double s = 0.0;
    for (double b : bins) s += b;
    return s;
  }

  double l2_norm() const {
    double s = 0.0;
    for (double b : bins) s += b * b;
    return std::sqrt(s);
  }

  void l2_normalize() {
    double nrm = l2_norm();
    if (nrm > 0.0)
      for (double& b : bins) b /= nrm;
  }
};

/// Bin layout shared by every histogram in the project: n_bins equal-width
/// bins over the operator range [-1, 1] (equivalently L_sym range [0, 2]).
/// A value exactly at an interior edge belongs to the right bin; values
/// within ~1e-12 of an edge are snapped onto it first so that ties produced
/// by floating-point eigensolvers land deterministically.
inline int bin_index(double x, int n_bins) {
  const double u = (x + 1.0) * 0.5 * static_cast<double>(n_bins);
  const double r = std::round(u);
  double i = (std::abs(u - r) <= 1e-9) ? r : std::floor(u);
  if (i < 0.0) i = 0.0;
  if (i > static_cast<double>(n_bins - 1)) i = static_cast<double>(n_bins - 1);
  return static_cast<int>(i);
}

/// Jackson damping coefficients g_0..g_{n-1}. Suppresses the Gibbs ringing
/// a truncated Chebyshev expansion produces at sharp spectral features.
inline std::vector<double> jackson_coefficients(int n_moments) {
  const double N = static_cast<double>(n_moments);
  const double q = std::numbers::pi / (N + 1.0);
  std::vector<double> g(static_cast<std::size_t>(n_moments));
  for (int m = 0; m < n_moments; ++m) {
    g[m] = ((N - m + 1.0) * std::cos(q * m) + std::sin(q * m) / std::tan(q)) / (N + 1.0);
  }
  return g;
}

/// Raw Chebyshev moments d_m ~= tr(T_m(H)) / |V| from stochastic trace
/// estimation. d_0 is 1 by construction (probes are unit-normalized).
struct ChebyshevMoments {
  std::vector<double> raw;
  int n_moments() const { return static_cast<int>(raw.size()); }
};

/// Moment estimation with caller-supplied probe vectors (each must have
/// squared norm 1). Exposed so tests can replay a probe sequence under a
/// node permutation.
inline ChebyshevMoments chebyshev_moments_with_probes(
    const SpectralOperator& op, const std::vector<std::vector<double>>& probes, int n_moments) {
  const int n = op.size();
  if (n == 0) throw data_error("cannot estimate moments of an empty graph");
  ChebyshevMoments out;
  out.raw.assign(static_cast<std::size_t>(n_moments), 0.0);

  std::vector<double> prev(n), cur(n), tmp(n);
  for (const auto& z : probes) {
    // three-term recurrence T_{m+1}(H) z = 2 H T_m(H) z - T_{m-1}(H) z
    prev.assign(z.begin(), z.end());
    op.apply(z.data(), cur.data());
    out.raw[0] += 1.0;  // z'T_0(H)z = ||z||^2 = 1 by construction
    double d1 = 0.0;
    for (int i = 0; i < n; ++i) d1 += z[i] * cur[i];
    out.raw[1] += d1;
    for (int m = 2; m < n_moments; ++m) {
      op.apply(cur.data(), tmp.data());
      for (int i = 0; i < n; ++i) prev[i] = 2.0 * tmp[i] - prev[i];
      prev.swap(cur);
      double dm = 0.0;
      for (int i = 0; i < n; ++i) dm += z[i] * cur[i];
      out.raw[m] += dm;
    }
  }
  const double inv = 1.0 / static_cast<double>(probes.size());
  for (double& d : out.raw) d *= inv;
  return out;
}

/// Rademacher probes scaled by 1/sqrt(n), so E[z'T_m(H)z] = tr(T_m(H))/n.
inline std::vector<std::vector<double>> make_probes(int n, int n_probe, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<double>> probes(static_cast<std::size_t>(n_probe));
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (auto& z : probes) {
    z.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) z[i] = rng.rademacher() * scale;
  }
  return probes;
}

inline ChebyshevMoments chebyshev_moments(const SpectralOperator& op, const DosConfig& cfg) {
  cfg.validate();
  if (op.size() == 0) throw data_error("cannot estimate moments of an empty graph");
  return chebyshev_moments_with_probes(op, make_probes(op.size(), cfg.n_probe, cfg.rng_seed),
                                       cfg.n_moments);
}

/// Integrate the damped Chebyshev expansion of the spectral density over
/// each bin. The Chebyshev weight integral has a closed form under
/// x = cos(theta):
///   I_0(a,b) = (theta_a - theta_b) / pi
///   I_m(a,b) = (sin(m theta_a) - sin(m theta_b)) / (m pi)
/// so no quadrature grid is needed. Bin masses sum to total_mass exactly
/// (the sin terms telescope). Small negative bins are the Gibbs residue;
/// clipping is left to the caller.
inline std::vector<double> moments_to_bins(const ChebyshevMoments& moments, double total_mass,
                                           int n_bins, Damping damping) {
  const int n_m = moments.n_moments();
  std::vector<double> g = damping == Damping::jackson
                              ? jackson_coefficients(n_m)
                              : std::vector<double>(static_cast<std::size_t>(n_m), 1.0);
  // coefficient of T_m in the dual-basis expansion: c_0 = 1, c_m = 2
  std::vector<double> coef(static_cast<std::size_t>(n_m));
  for (int m = 0; m < n_m; ++m) coef[m] = (m == 0 ? 1.0 : 2.0) * g[m] * moments.raw[m];

  std::vector<double> theta(static_cast<std::size_t>(n_bins) + 1);
  for (int b = 0; b <= n_bins; ++b) {
    double x = -1.0 + 2.0 * static_cast<double>(b) / static_cast<double>(n_bins);
    theta[b] = std::acos(std::clamp(x, -1.0, 1.0));
  }

  std::vector<double> bins(static_cast<std::size_t>(n_bins), 0.0);
  for (int b = 0; b < n_bins; ++b) {
    const double ta = theta[b];      // left edge, larger angle
    const double tb = theta[b + 1];  // right edge
    double mass = coef[0] * (ta - tb) / std::numbers::pi;
    for (int m = 1; m < n_m; ++m)
      mass += coef[m] * (std::sin(m * ta) - std::sin(m * tb)) / (m * std::numbers::pi);
    bins[b] = total_mass * mass;
  }
  return bins;
}

/// Global density of states of one snapshot, approximated by the Kernel
/// Polynomial Method and binned into a signature vector. Entries sum to
/// ~|V| before any normalization; negative Gibbs residue is clipped to 0.
inline SignatureVector kpm_dos(const SpectralOperator& op, const DosConfig& cfg,
                               std::int64_t timestep = 0) {
  cfg.validate();
  if (op.size() == 0) throw data_error("kpm_dos: empty graph");
  ChebyshevMoments m = chebyshev_moments(op, cfg);
  SignatureVector sig;
  sig.timestep = timestep;
  sig.kind = SignatureKind::global_dos;
  sig.bins = moments_to_bins(m, static_cast<double>(op.size()), cfg.n_bins, cfg.damping);
  for (double& b : sig.bins) b = std::max(b, 0.0);
  return sig;
}

namespace detail {

struct LanczosQuadrature {
  std::vector<double> nodes;    // Ritz values, in the operator range [-1, 1]
  std::vector<double> weights;  // sum to ||v||^2 exactly
};

/// Lanczos tridiagonalization of H started from v/||v||, with full
/// reorthogonalization (cheap at <= n_moments steps and removes the ghost
/// Ritz values that would double-count mass). The eigen-pairs of the
/// tridiagonal matrix give the Gauss quadrature nodes/weights of the local
/// spectral measure mu(lambda; v) = sum_i |v'q_i|^2 delta(lambda - lambda_i).
inline LanczosQuadrature lanczos_quadrature(const SpectralOperator& op,
                                            const std::vector<double>& v, int max_steps) {
  const int n = op.size();
  if (static_cast<int>(v.size()) != n)
    throw data_error("attribute vector length " + std::to_string(v.size()) +
                     " does not match node count " + std::to_string(n));
  double vnorm2 = 0.0;
  for (double x : v) vnorm2 += x * x;
  if (vnorm2 <= 0.0) throw data_error("zero attribute vector");
  const double vnorm = std::sqrt(vnorm2);

  const int steps_cap = std::min(max_steps, n);
  std::vector<std::vector<double>> basis;
  basis.reserve(static_cast<std::size_t>(steps_cap));
  std::vector<double> alpha, beta;

  std::vector<double> q(v);
  for (double& x : q) x /= vnorm;
  std::vector<double> w(static_cast<std::size_t>(n));
  basis.push_back(q);

  for (int j = 0; j < steps_cap; ++j) {
    op.apply(basis[j].data(), w.data());
    double a = 0.0;
    for (int i = 0; i < n; ++i) a += basis[j][i] * w[i];
    alpha.push_back(a);
    for (int i = 0; i < n; ++i) w[i] -= a * basis[j][i];
    if (j > 0)
      for (int i = 0; i < n; ++i) w[i] -= beta[j - 1] * basis[j - 1][i];
    // full reorthogonalization against the whole basis
    for (const auto& b : basis) {
      double d = 0.0;
      for (int i = 0; i < n; ++i) d += b[i] * w[i];
      for (int i = 0; i < n; ++i) w[i] -= d * b[i];
    }
    double bnorm = 0.0;
    for (int i = 0; i < n; ++i) bnorm += w[i] * w[i];
    bnorm = std::sqrt(bnorm);
    if (j + 1 == steps_cap) break;
    if (bnorm < 1e-10) break;  // Krylov space exhausted
    beta.push_back(bnorm);
    for (int i = 0; i < n; ++i) w[i] /= bnorm;
    basis.push_back(w);
  }

  const int k = static_cast<int>(alpha.size());
  Eigen::VectorXd diag(k), sub(std::max(k - 1, 0));
  for (int i = 0; i < k; ++i) diag(i) = alpha[i];
  for (int i = 0; i + 1 < k; ++i) sub(i) = beta[i];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (es.info() != Eigen::Success)
    throw compute_error("tridiagonal eigendecomposition failed");

  LanczosQuadrature out;
  out.nodes.resize(static_cast<std::size_t>(k));
  out.weights.resize(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) {
    out.nodes[j] = std::clamp(es.eigenvalues()(j), -1.0, 1.0);
    const double s = es.eigenvectors()(0, j);
    out.weights[j] = vnorm2 * s * s;
  }
  return out;
}

}  // namespace detail

/// Local density of states for an attribute vector, via Gauss Quadrature
/// and Lanczos. Deterministic given v (no probe vectors are involved);
/// cfg.n_probe is unused here. Bin masses sum to ||v||^2 exactly.
inline SignatureVector gql_ldos(const SpectralOperator& op, const std::vector<double>& v,
                                const DosConfig& cfg, std::int64_t timestep = 0,
                                std::string label = {}) {
  cfg.validate();
  if (op.size() == 0) throw data_error("gql_ldos: empty graph");
  detail::LanczosQuadrature quad = detail::lanczos_quadrature(op, v, cfg.n_moments);
  SignatureVector sig;
  sig.timestep = timestep;
  sig.kind = SignatureKind::local_dos;
  sig.label = std::move(label);
  sig.bins.assign(static_cast<std::size_t>(cfg.n_bins), 0.0);
  for (std::size_t j = 0; j < quad.nodes.size(); ++j)
    sig.bins[bin_index(quad.nodes[j], cfg.n_bins)] += quad.weights[j];
  return sig;
}

/// Embedding of a whole snapshot series: one global DOS vector per snapshot
/// and, when an attribute column is given, one local DOS vector per encoded
/// attribute label. All vectors are L2-normalized. Snapshots are embedded
/// concurrently; each gets an independent probe stream derived from the
/// master seed and its timestep, so results do not depend on thread count.
struct EmbeddedSeries {
  std::vector<SignatureVector> global;               // one per snapshot
  std::vector<std::vector<SignatureVector>> local;   // per snapshot, per label
};

inline EmbeddedSeries embed_series(const std::vector<Snapshot>& snapshots, const DosConfig& cfg,
                                   const std::optional<std::string>& attribute = std::nullopt,
                                   unsigned threads = 0) {
  cfg.validate();
  if (snapshots.empty()) throw data_error("embed_series: no snapshots");
  EmbeddedSeries out;
  out.global.resize(snapshots.size());
  out.local.resize(snapshots.size());

  parallel_for(static_cast<std::int64_t>(snapshots.size()), threads, [&](std::int64_t idx) {
    const Snapshot& s = snapshots[idx];
    try {
      SpectralOperator op(s);
      DosConfig local_cfg = cfg;
      local_cfg.rng_seed = derive_seed(cfg.rng_seed, s.timestep);
      out.global[idx] = kpm_dos(op, local_cfg, s.timestep);
      out.global[idx].l2_normalize();
      if (attribute) {
        if (!s.attributes)
          throw data_error("snapshot has no attribute table");
        auto encoded = encode_attribute(*s.attributes, *attribute);
        for (auto& [label, vec] : encoded) {
          SignatureVector sig = gql_ldos(op, vec, local_cfg, s.timestep, label);
          sig.l2_normalize();
          out.local[idx].push_back(std::move(sig));
        }
      }
    } catch (const data_error& e) {
      throw data_error(std::string(e.what()) + " (timestep " + std::to_string(s.timestep) + ")");
    } catch (const compute_error& e) {
      throw compute_error(std::string(e.what()) + " (timestep " + std::to_string(s.timestep) + ")");
    }
  });
  return out;
}

}  // namespace scpd
