#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "scpd/common.hpp"
#include "scpd/dos.hpp"
#include "scpd/generators.hpp"
#include "scpd/graph.hpp"
#include "scpd/scoring.hpp"

namespace scpd {

// Edge-list file: UTF-8 text, one record per line, comma-separated
// `t,i,j,w` with w optional (default 1.0); lines beginning '#' are ignored.
// The node set of a snapshot is the ids seen in its edges plus any ids in
// the attribute file; an isolated node can be declared with a zero-weight
// self-loop record `t,i,i,0` (self-loops are dropped, the id remains).
//
// Attribute file: per-timestep CSV `t,node_id,col1,col2,...` with a header
// row declaring column kinds, e.g. `t,node_id,label:categorical,size:numerical`.

namespace detail {

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

inline std::string format_weight(double w) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", w);
  return buf;
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw data_error("cannot open '" + path + "' for writing");
  return f;
}

inline std::ifstream open_in(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw data_error("cannot open '" + path + "'");
  return f;
}

}  // namespace detail

/// Parse an attribute file into per-timestep rows keyed by node id.
inline std::map<std::int64_t, AttributeRows> load_attribute_file(const std::string& path) {
  std::ifstream f = detail::open_in(path);
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string> names;
  std::vector<AttrKind> kinds;
  bool header_done = false;
  std::map<std::int64_t, AttributeRows> out;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    auto fields = detail::split_csv(line);
    if (!header_done) {
      if (fields.size() < 3 || fields[0] != "t" || fields[1] != "node_id")
        throw data_error(path + ":" + std::to_string(lineno) +
                         ": attribute header must start with t,node_id");
      for (std::size_t i = 2; i < fields.size(); ++i) {
        auto pos = fields[i].rfind(':');
        if (pos == std::string::npos)
          throw data_error(path + ":" + std::to_string(lineno) + ": column '" + fields[i] +
                           "' must be declared as name:categorical or name:numerical");
        const std::string kind = fields[i].substr(pos + 1);
        if (kind != "categorical" && kind != "numerical")
          throw data_error(path + ":" + std::to_string(lineno) + ": unknown column kind '" +
                           kind + "'");
        names.push_back(fields[i].substr(0, pos));
        kinds.push_back(kind == "categorical" ? AttrKind::categorical : AttrKind::numerical);
      }
      header_done = true;
      continue;
    }
    if (fields.size() != names.size() + 2)
      throw data_error(path + ":" + std::to_string(lineno) + ": expected " +
                       std::to_string(names.size() + 2) + " fields, got " +
                       std::to_string(fields.size()));
    std::int64_t t, id;
    try {
      t = std::stoll(fields[0]);
      id = std::stoll(fields[1]);
    } catch (const std::exception&) {
      throw data_error(path + ":" + std::to_string(lineno) + ": bad timestep or node id");
    }
    auto& rows = out[t];
    if (rows.names.empty()) {
      rows.names = names;
      rows.kinds = kinds;
    }
    rows.rows.emplace_back(id, std::vector<std::string>(fields.begin() + 2, fields.end()));
  }
  if (!header_done) throw data_error(path + ": empty attribute file");
  return out;
}

/// Load a snapshot series from an edge-list file (and optionally an
/// attribute file), ordered by timestep.
inline std::vector<Snapshot> load_series(const std::string& edges_path,
                                         const std::string& attrs_path = {}) {
  std::map<std::int64_t, AttributeRows> attrs;
  if (!attrs_path.empty()) attrs = load_attribute_file(attrs_path);

  std::ifstream f = detail::open_in(edges_path);
  std::string line;
  std::size_t lineno = 0;
  std::map<std::int64_t, std::vector<EdgeRec>> per_step;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    auto fields = detail::split_csv(line);
    if (fields.size() != 3 && fields.size() != 4)
      throw data_error(edges_path + ":" + std::to_string(lineno) +
                       ": expected t,i,j[,w], got " + std::to_string(fields.size()) + " fields");
    std::int64_t t, i, j;
    double w = 1.0;
    try {
      t = std::stoll(fields[0]);
      i = std::stoll(fields[1]);
      j = std::stoll(fields[2]);
      if (fields.size() == 4) w = std::stod(fields[3]);
    } catch (const std::exception&) {
      throw data_error(edges_path + ":" + std::to_string(lineno) + ": malformed record '" +
                       line + "'");
    }
    per_step[t].push_back({i, j, w});
  }
  for (const auto& kv : attrs) per_step.try_emplace(kv.first);  // attribute-only timesteps count too

  if (per_step.empty()) throw data_error(edges_path + ": no records");
  std::vector<Snapshot> out;
  out.reserve(per_step.size());
  for (const auto& [t, edges] : per_step) {
    auto it = attrs.find(t);
    try {
      out.push_back(build_snapshot(t, edges, it != attrs.end() ? &it->second : nullptr));
    } catch (const data_error& e) {
      throw data_error(edges_path + ": timestep " + std::to_string(t) + ": " + e.what());
    }
  }
  return out;
}

inline void write_edge_list(const std::string& path, const std::vector<Snapshot>& snaps) {
  std::ofstream f = detail::open_out(path);
  for (const auto& s : snaps) {
    for (int i = 0; i < s.node_count; ++i) {
      if (s.row_ptr[i] == s.row_ptr[i + 1])  // isolated node declaration
        f << s.timestep << ',' << s.node_ids[i] << ',' << s.node_ids[i] << ",0\n";
      for (std::int64_t e = s.row_ptr[i]; e < s.row_ptr[i + 1]; ++e) {
        const int j = s.col_idx[e];
        if (i < j)
          f << s.timestep << ',' << s.node_ids[i] << ',' << s.node_ids[j] << ','
            << detail::format_weight(s.weights[e]) << '\n';
      }
    }
  }
}

inline void write_attribute_file(const std::string& path, const std::vector<Snapshot>& snaps) {
  const AttributeTable* first = nullptr;
  for (const auto& s : snaps)
    if (s.attributes) {
      first = &*s.attributes;
      break;
    }
  if (!first) throw data_error("no snapshot carries attributes");
  std::ofstream f = detail::open_out(path);
  f << "t,node_id";
  for (const auto& col : first->columns)
    f << ',' << col.name << ':' << (col.kind == AttrKind::categorical ? "categorical" : "numerical");
  f << '\n';
  for (const auto& s : snaps) {
    if (!s.attributes) continue;
    for (int i = 0; i < s.node_count; ++i) {
      f << s.timestep << ',' << s.node_ids[i];
      for (const auto& col : s.attributes->columns) f << ',' << col.values[i];
      f << '\n';
    }
  }
}

inline void write_truth_json(const std::string& path, const AnomalySchedule& truth) {
  nlohmann::json j;
  j["anomalies"] = nlohmann::json::array();
  for (const auto& a : truth.anomalies)
    j["anomalies"].push_back({{"t", a.timestep}, {"type", to_string(a.type)}});
  detail::open_out(path) << j.dump(2) << '\n';
}

inline AnomalySchedule load_truth_json(const std::string& path) {
  nlohmann::json j;
  try {
    detail::open_in(path) >> j;
  } catch (const nlohmann::json::exception& e) {
    throw data_error(path + ": " + e.what());
  }
  AnomalySchedule truth;
  if (!j.contains("anomalies")) throw data_error(path + ": missing 'anomalies' array");
  for (const auto& a : j["anomalies"])
    truth.anomalies.push_back(
        {a.at("t").get<std::int64_t>(), anomaly_type_from_string(a.at("type").get<std::string>())});
  return truth;
}

/// Signature-vector dump for inspection and cross-language diffing:
/// `t,kind,label,b0..b{k-1}`.
inline void write_signature_csv(const std::string& path,
                                const std::vector<const SignatureVector*>& sigs) {
  if (sigs.empty()) throw data_error("no signature vectors to write");
  std::ofstream f = detail::open_out(path);
  f << "t,kind,label";
  for (std::size_t b = 0; b < sigs.front()->bins.size(); ++b) f << ",b" << b;
  f << '\n';
  for (const SignatureVector* s : sigs) {
    f << s->timestep << ','
      << (s->kind == SignatureKind::global_dos ? "global_dos" : "local_dos") << ',' << s->label;
    for (double b : s->bins) f << ',' << detail::format_weight(b);
    f << '\n';
  }
}

inline void write_scores_csv(const std::string& path, const ScoreSeries& series) {
  std::ofstream f = detail::open_out(path);
  f << "t,Z,Zstar\n";
  for (std::size_t i = 0; i < series.timesteps.size(); ++i)
    f << series.timesteps[i] << ',' << detail::format_weight(series.z[i]) << ','
      << detail::format_weight(series.zstar[i]) << '\n';
}

}  // namespace scpd
