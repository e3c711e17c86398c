#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "scpd/common.hpp"
#include "scpd/dos.hpp"
#include "scpd/graph.hpp"

namespace scpd {

/// Exact dense spectrum of the symmetric normalized Laplacian. Ground truth
/// for the stochastic approximations, practical up to a few thousand nodes.
struct ExactSpectrum {
  std::vector<double> eigenvalues;  // of L_sym, ascending, in [0, 2]
  Eigen::MatrixXd eigenvectors;     // columns; empty unless requested

  bool has_vectors() const { return eigenvectors.size() > 0; }
};

inline constexpr int kDenseSpectrumCap = 3000;

namespace detail {

inline Eigen::MatrixXd dense_lsym(const Snapshot& s) {
  const int n = s.node_count;
  const std::vector<double> deg = s.weighted_degrees();
  std::vector<double> dinv_sqrt(deg.size());
  for (std::size_t i = 0; i < deg.size(); ++i)
    dinv_sqrt[i] = deg[i] > 0.0 ? 1.0 / std::sqrt(deg[i]) : 0.0;
  // L_sym = H + I with H the matvec operator's matrix. An isolated node has
  // an all-zero H row, so its L_sym eigenvalue is 1 here; this keeps the
  // exact histogram aligned with the KPM histogram bin-for-bin.
  Eigen::MatrixXd L = Eigen::MatrixXd::Identity(n, n);
  for (int i = 0; i < n; ++i)
    for (std::int64_t e = s.row_ptr[i]; e < s.row_ptr[i + 1]; ++e)
      L(i, s.col_idx[e]) -= s.weights[e] * dinv_sqrt[i] * dinv_sqrt[s.col_idx[e]];
  return L;
}

}  // namespace detail

inline ExactSpectrum exact_spectrum(const Snapshot& s, bool with_vectors,
                                    int cap = kDenseSpectrumCap) {
  if (s.node_count == 0) throw data_error("exact_spectrum: empty graph");
  if (s.node_count > cap)
    throw compute_error("graph with " + std::to_string(s.node_count) +
                        " nodes exceeds the dense spectrum cap of " + std::to_string(cap) +
                        "; use the KPM approximation instead");
  Eigen::MatrixXd L = detail::dense_lsym(s);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      L, with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw compute_error("dense eigendecomposition failed");
  ExactSpectrum out;
  out.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + s.node_count);
  if (with_vectors) out.eigenvectors = es.eigenvectors();
  return out;
}

/// Exact histogram over the shared bin layout. Global: eigenvalue counts
/// per bin. Local (v given): sum of |v'q_i|^2 per bin.
inline SignatureVector exact_histogram(const ExactSpectrum& spec, int n_bins,
                                       const std::vector<double>* v = nullptr,
                                       std::int64_t timestep = 0, std::string label = {}) {
  if (n_bins < 2) throw data_error("exact_histogram: need at least 2 bins");
  SignatureVector sig;
  sig.timestep = timestep;
  sig.bins.assign(static_cast<std::size_t>(n_bins), 0.0);
  if (!v) {
    sig.kind = SignatureKind::global_dos;
    for (double lam : spec.eigenvalues) sig.bins[bin_index(lam - 1.0, n_bins)] += 1.0;
  } else {
    sig.kind = SignatureKind::local_dos;
    sig.label = std::move(label);
    if (!spec.has_vectors())
      throw data_error("exact_histogram: local histogram requested without eigenvectors");
    if (static_cast<int>(v->size()) != spec.eigenvectors.rows())
      throw data_error("exact_histogram: attribute vector length mismatch");
    Eigen::Map<const Eigen::VectorXd> vv(v->data(), static_cast<Eigen::Index>(v->size()));
    Eigen::VectorXd proj = spec.eigenvectors.transpose() * vv;
    for (Eigen::Index i = 0; i < proj.size(); ++i)
      sig.bins[bin_index(spec.eigenvalues[i] - 1.0, n_bins)] += proj(i) * proj(i);
  }
  return sig;
}

/// Baseline embedding that uses every eigenvalue of L_sym as the signature
/// (its singular values, since L_sym is symmetric PSD). Size-dependent, so
/// series over evolving graphs must be padded before scoring.
inline std::vector<double> lad_embedding(const Snapshot& s, int cap = kDenseSpectrumCap) {
  return exact_spectrum(s, false, cap).eigenvalues;
}

}  // namespace scpd
