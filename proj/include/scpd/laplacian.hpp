#pragma once

#include <cmath>
#include <vector>

#include "scpd/common.hpp"
#include "scpd/graph.hpp"

namespace scpd {

/// The shifted symmetric normalized Laplacian H = L_sym - I =
/// -D^{-1/2} A D^{-1/2}, exposed only through matrix-vector products.
/// Its spectrum lies in [-1, 1] because L_sym eigenvalues lie in [0, 2].
///
/// Isolated nodes (weighted degree 0) get an all-zero row/column, i.e. an
/// H eigenvalue of 0 instead of the 0/0 that D^{-1/2} would produce. The
/// convention is fixed across snapshots so downstream scoring is unaffected;
/// it shifts one histogram bin's mass per isolated node (the bin containing
/// L_sym eigenvalue 1).
///
/// The operator keeps a pointer to its snapshot, which must outlive it.
class SpectralOperator {
 public:
  explicit SpectralOperator(const Snapshot& s) : snap_(&s) {
    const std::vector<double> deg = s.weighted_degrees();
    std::vector<double> dinv_sqrt(deg.size());
    for (std::size_t i = 0; i < deg.size(); ++i)
      dinv_sqrt[i] = deg[i] > 0.0 ? 1.0 / std::sqrt(deg[i]) : 0.0;
    scaled_.resize(s.weights.size());
    for (int i = 0; i < s.node_count; ++i)
      for (std::int64_t e = s.row_ptr[i]; e < s.row_ptr[i + 1]; ++e)
        scaled_[e] = -s.weights[e] * dinv_sqrt[i] * dinv_sqrt[s.col_idx[e]];
  }

  int size() const { return snap_->node_count; }
  const Snapshot& snapshot() const { return *snap_; }

  /// y = H x. One pass over the pre-scaled CSR values.
  void apply(const double* x, double* y) const {
    const auto& row_ptr = snap_->row_ptr;
    const auto& col = snap_->col_idx;
    const int n = snap_->node_count;
    for (int i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::int64_t e = row_ptr[i]; e < row_ptr[i + 1]; ++e) acc += scaled_[e] * x[col[e]];
      y[i] = acc;
    }
  }

  std::vector<double> apply(const std::vector<double>& x) const {
    std::vector<double> y(x.size());
    apply(x.data(), y.data());
    return y;
  }

 private:
  const Snapshot* snap_;
  std::vector<double> scaled_;
};

inline SpectralOperator laplacian_operator(const Snapshot& s) { return SpectralOperator(s); }

}  // namespace scpd
