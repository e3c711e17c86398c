#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "scpd/common.hpp"

namespace scpd {

enum class AttrKind { categorical, numerical };

/// One attribute column, values aligned to a snapshot's local node indices.
struct AttributeColumn {
  std::string name;
  AttrKind kind = AttrKind::categorical;
  std::vector<std::string> values;
};

struct AttributeTable {
  std::vector<AttributeColumn> columns;

  std::size_t row_count() const { return columns.empty() ? 0 : columns.front().values.size(); }

  const AttributeColumn* find_column(const std::string& name) const {
    for (const auto& c : columns)
      if (c.name == name) return &c;
    return nullptr;
  }
};

/// Attribute rows keyed by global node id, as read from an attribute file.
/// Ids that do not appear in any edge declare isolated nodes.
struct AttributeRows {
  std::vector<std::string> names;
  std::vector<AttrKind> kinds;
  std::vector<std::pair<std::int64_t, std::vector<std::string>>> rows;
};

struct EdgeRec {
  std::int64_t u = 0;
  std::int64_t v = 0;
  double w = 1.0;
};

/// One timestamped undirected weighted graph. Adjacency is stored as a
/// symmetric CSR structure over dense local indices; `node_ids` maps local
/// index -> stable global id (ascending). Immutable after construction.
struct Snapshot {
  std::int64_t timestep = 0;
  int node_count = 0;
  std::vector<std::int64_t> node_ids;
  std::vector<std::int64_t> row_ptr;  // size node_count + 1
  std::vector<int> col_idx;
  std::vector<double> weights;
  std::optional<AttributeTable> attributes;

  std::int64_t nnz() const { return static_cast<std::int64_t>(col_idx.size()); }
  std::int64_t edge_count() const { return nnz() / 2; }

  /// Sum of undirected edge weights (each edge counted once).
  double total_weight() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s / 2.0;
  }

  /// Weighted degree d_i = sum_j w_ij.
  std::vector<double> weighted_degrees() const {
    std::vector<double> d(static_cast<std::size_t>(node_count), 0.0);
    for (int i = 0; i < node_count; ++i)
      for (std::int64_t e = row_ptr[i]; e < row_ptr[i + 1]; ++e) d[i] += weights[e];
    return d;
  }

  double adjacency_at(int i, int j) const {
    for (std::int64_t e = row_ptr[i]; e < row_ptr[i + 1]; ++e)
      if (col_idx[e] == j) return weights[e];
    return 0.0;
  }

  int local_index(std::int64_t global_id) const {
    auto it = std::lower_bound(node_ids.begin(), node_ids.end(), global_id);
    if (it == node_ids.end() || *it != global_id) return -1;
    return static_cast<int>(it - node_ids.begin());
  }
};

namespace detail {

// Symmetrize, merge duplicates by summation and build CSR. `edges` holds
// validated local-index pairs with self-loops already removed.
inline void build_csr(Snapshot& s, std::vector<std::pair<std::pair<int, int>, double>>& half_edges) {
  std::vector<std::pair<std::pair<int, int>, double>> sym;
  sym.reserve(half_edges.size() * 2);
  for (const auto& [ij, w] : half_edges) {
    sym.push_back({{ij.first, ij.second}, w});
    sym.push_back({{ij.second, ij.first}, w});
  }
  std::sort(sym.begin(), sym.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  const int n = s.node_count;
  s.row_ptr.assign(static_cast<std::size_t>(n) + 1, 0);
  s.col_idx.clear();
  s.weights.clear();
  s.col_idx.reserve(sym.size());
  s.weights.reserve(sym.size());
  std::size_t i = 0;
  while (i < sym.size()) {
    auto key = sym[i].first;
    double w = 0.0;
    while (i < sym.size() && sym[i].first == key) {
      w += sym[i].second;
      ++i;
    }
    s.col_idx.push_back(key.second);
    s.weights.push_back(w);
    ++s.row_ptr[static_cast<std::size_t>(key.first) + 1];
  }
  for (int r = 0; r < n; ++r) s.row_ptr[r + 1] += s.row_ptr[r];
}

inline void validate_edge(const EdgeRec& e) {
  if (e.u < 0 || e.v < 0)
    throw data_error("negative node id in edge (" + std::to_string(e.u) + "," +
                     std::to_string(e.v) + ")");
  if (!std::isfinite(e.w) || e.w < 0.0)
    throw data_error("edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                     ") has invalid weight " + std::to_string(e.w));
}

}  // namespace detail

/// Build a snapshot from raw edges with arbitrary nonnegative global ids.
/// Duplicate (i,j) records are merged by summing weights; self-loops are
/// dropped (their ids still register as nodes). Attribute rows, when given,
/// must cover every node of the graph; rows for ids absent from the edge
/// list declare isolated nodes.
inline Snapshot build_snapshot(std::int64_t timestep, const std::vector<EdgeRec>& raw_edges,
                               const AttributeRows* attrs = nullptr) {
  Snapshot s;
  s.timestep = timestep;

  std::vector<std::int64_t> ids;
  ids.reserve(raw_edges.size() * 2);
  for (const auto& e : raw_edges) {
    detail::validate_edge(e);
    ids.push_back(e.u);
    ids.push_back(e.v);
  }
  if (attrs)
    for (const auto& [id, vals] : attrs->rows) {
      if (id < 0) throw data_error("negative node id in attribute row");
      ids.push_back(id);
    }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  s.node_ids = std::move(ids);
  s.node_count = static_cast<int>(s.node_ids.size());

  std::unordered_map<std::int64_t, int> index;
  index.reserve(s.node_ids.size());
  for (int i = 0; i < s.node_count; ++i) index[s.node_ids[i]] = i;

  std::vector<std::pair<std::pair<int, int>, double>> half;
  half.reserve(raw_edges.size());
  for (const auto& e : raw_edges) {
    if (e.u == e.v) continue;  // self-loop dropped
    half.push_back({{index[e.u], index[e.v]}, e.w});
  }
  detail::build_csr(s, half);

  if (attrs) {
    if (attrs->names.size() != attrs->kinds.size())
      throw data_error("attribute column metadata mismatch");
    AttributeTable table;
    table.columns.resize(attrs->names.size());
    for (std::size_t c = 0; c < attrs->names.size(); ++c) {
      table.columns[c].name = attrs->names[c];
      table.columns[c].kind = attrs->kinds[c];
      table.columns[c].values.assign(static_cast<std::size_t>(s.node_count), "");
    }
    std::vector<char> seen(static_cast<std::size_t>(s.node_count), 0);
    for (const auto& [id, vals] : attrs->rows) {
      if (vals.size() != attrs->names.size())
        throw data_error("attribute row for node " + std::to_string(id) +
                         " has " + std::to_string(vals.size()) + " values, expected " +
                         std::to_string(attrs->names.size()));
      int li = s.local_index(id);
      seen[li] = 1;
      for (std::size_t c = 0; c < vals.size(); ++c) table.columns[c].values[li] = vals[c];
    }
    for (int i = 0; i < s.node_count; ++i)
      if (!seen[i])
        throw data_error("attribute row count mismatch: node " +
                         std::to_string(s.node_ids[i]) + " has no attribute row");
    if (!table.columns.empty()) s.attributes = std::move(table);
  }
  return s;
}

/// Build a snapshot whose node ids are already dense [0, n). Used by the
/// synthetic generators; declares all n nodes even when some are isolated.
inline Snapshot build_snapshot_dense(std::int64_t timestep, int n,
                                     const std::vector<EdgeRec>& raw_edges,
                                     std::optional<AttributeTable> attrs = std::nullopt) {
  Snapshot s;
  s.timestep = timestep;
  s.node_count = n;
  s.node_ids.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) s.node_ids[i] = i;

  std::vector<std::pair<std::pair<int, int>, double>> half;
  half.reserve(raw_edges.size());
  for (const auto& e : raw_edges) {
    detail::validate_edge(e);
    if (e.u >= n || e.v >= n)
      throw data_error("edge id out of range for dense snapshot of size " + std::to_string(n));
    if (e.u == e.v) continue;
    half.push_back({{static_cast<int>(e.u), static_cast<int>(e.v)}, e.w});
  }
  detail::build_csr(s, half);

  if (attrs) {
    if (attrs->row_count() != static_cast<std::size_t>(n))
      throw data_error("attribute row count mismatch: " + std::to_string(attrs->row_count()) +
                       " rows for " + std::to_string(n) + " nodes");
    s.attributes = std::move(attrs);
  }
  return s;
}

/// Encode one attribute column into (label, attribute-vector) pairs.
/// Categorical: one indicator vector per category in the column's vocabulary
/// (sorted). Numerical: a single vector normalized by its element sum.
inline std::vector<std::pair<std::string, std::vector<double>>> encode_attribute(
    const AttributeTable& table, const std::string& column) {
  const AttributeColumn* col = table.find_column(column);
  if (!col) throw data_error("attribute column '" + column + "' not found");
  const std::size_t n = col->values.size();

  std::vector<std::pair<std::string, std::vector<double>>> out;
  if (col->kind == AttrKind::categorical) {
    std::vector<std::string> vocab(col->values);
    std::sort(vocab.begin(), vocab.end());
    vocab.erase(std::unique(vocab.begin(), vocab.end()), vocab.end());
    for (const auto& cat : vocab) {
      std::vector<double> v(n, 0.0);
      for (std::size_t i = 0; i < n; ++i)
        if (col->values[i] == cat) v[i] = 1.0;
      out.emplace_back(cat, std::move(v));
    }
  } else {
    std::vector<double> v(n, 0.0);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      try {
        v[i] = std::stod(col->values[i]);
      } catch (const std::exception&) {
        throw data_error("non-numeric value '" + col->values[i] + "' in numerical column '" +
                         column + "'");
      }
      if (!std::isfinite(v[i]))
        throw data_error("non-finite value in numerical column '" + column + "'");
      sum += v[i];
    }
    if (sum == 0.0)
      throw data_error("numerical column '" + column + "' sums to zero; normalization undefined");
    for (auto& x : v) x /= sum;
    out.emplace_back(column, std::move(v));
  }
  return out;
}

}  // namespace scpd
