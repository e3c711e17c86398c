// scpd: spectral change point detection for dynamic graphs.
//
// Subcommands:
//   generate  synthetic benchmark series (edge list + optional attributes + truth.json)
//   detect    embed an edge-list dataset and score it (scores.csv, summary.json)
//   eval      Hits@n of a detect summary against a ground-truth file
//   bench     scaling probe and hyperparameter sweeps
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 compute error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "scpd/dos.hpp"
#include "scpd/eval.hpp"
#include "scpd/generators.hpp"
#include "scpd/io.hpp"
#include "scpd/oracle.hpp"
#include "scpd/scoring.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonOpts {
  scpd::DosConfig dos;
  scpd::ScoringConfig scoring;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  int top_n = 7;
  std::string damping = "jackson";

  void add_dos_flags(CLI::App* cmd) {
    cmd->add_option("--nz", dos.n_probe, "number of stochastic trace probes")
        ->capture_default_str();
    cmd->add_option("--nm", dos.n_moments, "number of Chebyshev moments")->capture_default_str();
    cmd->add_option("--bins", dos.n_bins, "signature vector length")->capture_default_str();
    cmd->add_option("--damping", damping, "moment damping: jackson or none")
        ->check(CLI::IsMember({"jackson", "none"}))
        ->capture_default_str();
  }
  void add_scoring_flags(CLI::App* cmd) {
    cmd->add_option("--short-window", scoring.short_window, "short context window")
        ->capture_default_str();
    cmd->add_option("--long-window", scoring.long_window, "long context window")
        ->capture_default_str();
  }
  void finalize() { dos.damping = damping == "none" ? scpd::Damping::none : scpd::Damping::jackson; }
};

json config_json(const CommonOpts& o, const std::string& embedding,
                 const std::optional<std::string>& attribute) {
  json cfg{{"nz", o.dos.n_probe},
           {"nm", o.dos.n_moments},
           {"bins", o.dos.n_bins},
           {"damping", o.damping},
           {"short_window", o.scoring.short_window},
           {"long_window", o.scoring.long_window},
           {"seed", o.seed},
           {"top_n", o.top_n},
           {"embedding", embedding}};
  cfg["attribute"] = attribute ? json(*attribute) : json(nullptr);
  return cfg;
}

scpd::SbmSchedule parse_sbm_schedule(const json& j) {
  scpd::SbmSchedule sch;
  sch.total_steps = j.value("total_steps", std::int64_t{151});
  for (const auto& row : j.at("rows")) {
    scpd::SbmSegment seg;
    seg.start_time = row.at("time").get<std::int64_t>();
    seg.community_sizes = row.at("sizes").get<std::vector<int>>();
    seg.p_in = row.at("p_in").get<double>();
    seg.p_out = row.at("p_out").get<double>();
    seg.event = row.value("event", false);
    const std::string mode = row.value("attributes", "none");
    if (mode == "none")
      seg.attribute_mode = scpd::AttributeMode::none;
    else if (mode == "homogeneous")
      seg.attribute_mode = scpd::AttributeMode::homogeneous;
    else if (mode == "heterogeneous")
      seg.attribute_mode = scpd::AttributeMode::heterogeneous;
    else
      throw scpd::data_error("unknown attribute mode '" + mode + "'");
    sch.rows.push_back(std::move(seg));
  }
  return sch;
}

scpd::BaSchedule parse_ba_schedule(const json& j) {
  scpd::BaSchedule sch;
  sch.total_steps = j.value("total_steps", std::int64_t{151});
  sch.node_count = j.at("nodes").get<int>();
  for (const auto& row : j.at("rows"))
    sch.rows.push_back({row.at("time").get<std::int64_t>(), row.at("m").get<int>()});
  return sch;
}

std::pair<std::vector<scpd::Snapshot>, scpd::AnomalySchedule> generate_from_schedule_file(
    const std::string& path, std::uint64_t seed) {
  json j;
  try {
    std::ifstream f(path);
    if (!f) throw scpd::data_error("cannot open '" + path + "'");
    f >> j;
  } catch (const json::exception& e) {
    throw scpd::data_error(path + ": " + e.what());
  }
  const std::string type = j.value("type", "sbm");
  if (type == "sbm") return scpd::generate_sbm_series(parse_sbm_schedule(j), seed);
  if (type == "ba") return scpd::generate_ba_series(parse_ba_schedule(j), seed);
  throw scpd::data_error(path + ": unknown schedule type '" + type + "'");
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw scpd::data_error("cannot create output directory '" + dir + "': " + ec.message());
}

int cmd_generate(const std::string& experiment, const std::string& schedule_file, double scale,
                 std::uint64_t seed, const std::string& out_dir) {
  ensure_dir(out_dir);
  auto [snaps, truth] = schedule_file.empty()
                            ? scpd::builtin_experiment(experiment, scale, seed)
                            : generate_from_schedule_file(schedule_file, seed);
  scpd::write_edge_list(out_dir + "/edges.csv", snaps);
  bool has_attrs = false;
  for (const auto& s : snaps) has_attrs = has_attrs || s.attributes.has_value();
  if (has_attrs) scpd::write_attribute_file(out_dir + "/attributes.csv", snaps);
  scpd::write_truth_json(out_dir + "/truth.json", truth);
  std::int64_t edges = 0;
  for (const auto& s : snaps) edges += s.edge_count();
  std::cout << "wrote " << snaps.size() << " snapshots (" << edges << " edges) to " << out_dir
            << "\n";
  return 0;
}

int cmd_detect(const std::string& edges_file, const std::string& attrs_file,
               const std::optional<std::string>& attribute, const std::string& embedding,
               const CommonOpts& opts, const std::string& out_dir) {
  ensure_dir(out_dir);
  auto snaps = scpd::load_series(edges_file, attrs_file);
  std::vector<std::int64_t> timesteps;
  for (const auto& s : snaps) timesteps.push_back(s.timestep);

  scpd::DosConfig cfg = opts.dos;
  cfg.rng_seed = opts.seed;

  scpd::ScoreSeries scores;
  json summary;
  if (embedding == "lad") {
    auto columns = scpd::lad_series(snaps, opts.threads);
    scores = scpd::score_series(columns, opts.scoring, timesteps);
  } else {
    scpd::EmbeddedSeries emb = scpd::embed_series(snaps, cfg, attribute, opts.threads);
    std::vector<const scpd::SignatureVector*> dump;
    for (const auto& g : emb.global) dump.push_back(&g);
    for (const auto& per_snap : emb.local)
      for (const auto& sig : per_snap) dump.push_back(&sig);
    scpd::write_signature_csv(out_dir + "/signatures.csv", dump);

    scores = scpd::score_series(scpd::signature_columns(emb.global), opts.scoring,
                                timesteps);
    if (attribute) {
      std::vector<std::map<std::string, std::vector<double>>> per_step(snaps.size());
      for (std::size_t i = 0; i < snaps.size(); ++i)
        for (const auto& sig : emb.local[i]) per_step[i][sig.label] = sig.bins;
      scpd::AttributeScores attr_scores =
          scpd::score_attribute_series(per_step, opts.scoring, timesteps);
      for (const auto& [label, series] : attr_scores.per_label)
        scpd::write_scores_csv(out_dir + "/scores_attr_" + label + ".csv", series);
      scpd::write_scores_csv(out_dir + "/scores_attr_aggregated.csv", attr_scores.aggregated);
      summary["attribute_top_n"] = attr_scores.aggregated.top_n(opts.top_n);
      summary["attribute_ranking"] = attr_scores.aggregated.ranking;
    }
  }
  scpd::write_scores_csv(out_dir + "/scores.csv", scores);

  summary["config"] = config_json(opts, embedding, attribute);
  summary["num_snapshots"] = snaps.size();
  summary["top_n"] = scores.top_n(opts.top_n);
  summary["ranking"] = scores.ranking;
  std::ofstream(out_dir + "/summary.json") << summary.dump(2) << '\n';
  std::cout << "scored " << snaps.size() << " snapshots; top-" << opts.top_n << ":";
  for (auto t : scores.top_n(opts.top_n)) std::cout << ' ' << t;
  std::cout << "\n";
  return 0;
}

int cmd_eval(const std::string& summary_file, const std::string& truth_file, int n,
             const std::string& out_file, bool use_attribute_ranking) {
  json summary;
  try {
    std::ifstream f(summary_file);
    if (!f) throw scpd::data_error("cannot open '" + summary_file + "'");
    f >> summary;
  } catch (const json::exception& e) {
    throw scpd::data_error(summary_file + ": " + e.what());
  }
  scpd::AnomalySchedule truth = scpd::load_truth_json(truth_file);
  const char* key = use_attribute_ranking ? "attribute_ranking" : "ranking";
  if (!summary.contains(key))
    throw scpd::data_error(summary_file + ": missing '" + std::string(key) + "'");
  scpd::ScoreSeries scores;
  scores.ranking = summary[key].get<std::vector<std::int64_t>>();
  scores.timesteps = scores.ranking;  // ranking covers every scored timestep

  if (n == 0) n = static_cast<int>(truth.anomalies.size());
  double hits = scpd::hits_at_n(scores, truth, n);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "hits@%d = %.3f", n, hits);
  std::cout << buf << "\n";
  if (!out_file.empty()) {
    json out{{"n", n}, {"hits", hits}};
    std::ofstream(out_file) << out.dump(2) << '\n';
  }
  return 0;
}

std::map<std::string, std::vector<int>> parse_sweep_spec(const std::string& spec) {
  // e.g. "k=5,10,25,50" or "nm=10,20,40;nz=25,50,100"
  std::map<std::string, std::vector<int>> grid;
  std::size_t start = 0;
  while (start < spec.size()) {
    std::size_t end = spec.find(';', start);
    if (end == std::string::npos) end = spec.size();
    const std::string part = spec.substr(start, end - start);
    const std::size_t eq = part.find('=');
    if (eq == std::string::npos)
      throw scpd::data_error("bad sweep spec '" + part + "' (expected param=v1,v2,...)");
    std::vector<int> values;
    std::stringstream vs(part.substr(eq + 1));
    for (std::string v; std::getline(vs, v, ',');) values.push_back(std::stoi(v));
    grid[part.substr(0, eq)] = values;
    start = end + 1;
  }
  return grid;
}

int cmd_bench(const std::string& experiment, const std::vector<double>& sizes,
              const std::string& sweep_spec, const std::vector<std::uint64_t>& seeds,
              const CommonOpts& opts, double scale, const std::string& out_dir) {
  ensure_dir(out_dir);
  if (sizes.empty() && sweep_spec.empty())
    throw CLI::ValidationError("bench", "need --sizes and/or --sweep");

  if (!sizes.empty()) {
    scpd::ScalingReport rep =
        scpd::scaling_probe(experiment, sizes, opts.dos, opts.seed, opts.threads);
    json j{{"experiment", experiment},
           {"slope_seconds_per_edge", rep.slope},
           {"r_squared", rep.r_squared}};
    for (const auto& p : rep.points)
      j["points"].push_back({{"scale", p.scale}, {"edges", p.edges}, {"embed_s", p.embed_s}});
    std::ofstream(out_dir + "/scaling.json") << j.dump(2) << '\n';
    std::cout << "scaling: ";
    for (const auto& p : rep.points)
      std::cout << "(" << p.edges << " edges, " << p.embed_s << " s) ";
    std::cout << "R^2 = " << rep.r_squared << "\n";
  }

  if (!sweep_spec.empty()) {
    auto grid = parse_sweep_spec(sweep_spec);
    auto rows = scpd::sensitivity_sweep(experiment, scale, opts.dos, opts.scoring, grid, seeds,
                                        opts.threads);
    std::ofstream csv(out_dir + "/sweep.csv");
    csv << "parameter,value,hits_mean,hits_std\n";
    for (const auto& r : rows) {
      csv << r.parameter << ',' << r.value << ',' << r.hits_mean << ',' << r.hits_std << '\n';
      std::cout << r.parameter << " = " << r.value << ": hits = " << r.hits_mean << " +/- "
                << r.hits_std << "\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spectral change point detection for dynamic graphs"};
  app.require_subcommand(1);

  CommonOpts opts;

  // generate
  auto* gen = app.add_subcommand("generate", "emit a synthetic benchmark series");
  std::string experiment = "sbm_hybrid", schedule_file, out_dir = "out";
  double scale = 1.0;
  gen->add_option("--experiment", experiment,
                  "builtin name: sbm_hybrid, sbm_attribute, sbm_evolving, ba_change")
      ->capture_default_str();
  gen->add_option("--schedule", schedule_file, "JSON schedule file (overrides --experiment)");
  gen->add_option("--scale", scale, "node-count multiplier")->capture_default_str();
  gen->add_option("--seed", opts.seed, "RNG seed")->capture_default_str();
  gen->add_option("--out", out_dir, "output directory")->capture_default_str();

  // detect
  auto* det = app.add_subcommand("detect", "embed and score an edge-list dataset");
  std::string edges_file, attrs_file, attribute, embedding = "dos";
  det->add_option("--edges", edges_file, "edge-list file (t,i,j,w per line)")->required();
  det->add_option("--attributes", attrs_file, "attribute CSV file");
  det->add_option("--attribute", attribute, "attribute column to track with local DOS");
  det->add_option("--embedding", embedding, "dos (spectral density) or lad (all eigenvalues)")
      ->check(CLI::IsMember({"dos", "lad"}))
      ->capture_default_str();
  opts.add_dos_flags(det);
  opts.add_scoring_flags(det);
  det->add_option("--seed", opts.seed, "RNG seed")->capture_default_str();
  det->add_option("--threads", opts.threads, "worker threads (default: SCPD_THREADS or all cores)");
  det->add_option("--top-n", opts.top_n, "ranking length in summary.json")->capture_default_str();
  det->add_option("--out", out_dir, "output directory")->capture_default_str();

  // eval
  auto* ev = app.add_subcommand("eval", "Hits@n of a detect summary against ground truth");
  std::string summary_file, truth_file, eval_out;
  int eval_n = 0;
  bool eval_attr = false;
  ev->add_option("--summary", summary_file, "summary.json from detect")->required();
  ev->add_option("--truth", truth_file, "truth.json from generate")->required();
  ev->add_option("--n", eval_n, "ranking depth (default: number of true anomalies)");
  ev->add_option("--out", eval_out, "optional JSON result file");
  ev->add_flag("--attribute-ranking", eval_attr, "evaluate the aggregated attribute ranking");

  // bench
  auto* bench = app.add_subcommand("bench", "scaling probe and hyperparameter sweeps");
  std::vector<double> sizes;
  std::string sweep_spec;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  bench->add_option("--experiment", experiment, "builtin experiment")->capture_default_str();
  bench->add_option("--sizes", sizes, "scale factors for the scaling probe")->delimiter(',');
  bench->add_option("--sweep", sweep_spec, "sweep spec, e.g. k=5,10,25,50;nm=10,20,40");
  bench->add_option("--seeds", seeds, "seeds for sweep runs")->delimiter(',');
  bench->add_option("--scale", scale, "scale for sweep runs")->capture_default_str();
  opts.add_dos_flags(bench);
  opts.add_scoring_flags(bench);
  bench->add_option("--seed", opts.seed, "RNG seed for the scaling probe")->capture_default_str();
  bench->add_option("--threads", opts.threads, "worker threads");
  bench->add_option("--out", out_dir, "output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
    opts.finalize();
    opts.dos.validate();
    opts.scoring.validate();
    if (gen->parsed())
      return cmd_generate(experiment, schedule_file, scale, opts.seed, out_dir);
    if (det->parsed()) {
      std::optional<std::string> attr;
      if (!attribute.empty()) attr = attribute;
      if (!attrs_file.empty() && attribute.empty())
        throw CLI::ValidationError("detect", "--attributes given without --attribute column name");
      return cmd_detect(edges_file, attrs_file, attr, embedding, opts, out_dir);
    }
    if (ev->parsed()) return cmd_eval(summary_file, truth_file, eval_n, eval_out, eval_attr);
    if (bench->parsed())
      return cmd_bench(experiment, sizes, sweep_spec, seeds, opts, scale, out_dir);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const CLI::Error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const scpd::data_error& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "compute error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
