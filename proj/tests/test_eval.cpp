#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "scpd/eval.hpp"

using namespace scpd;

namespace {

ScoreSeries series_with_ranking(std::vector<std::int64_t> ranking) {
  ScoreSeries s;
  s.timesteps = ranking;
  std::sort(s.timesteps.begin(), s.timesteps.end());
  s.ranking = std::move(ranking);
  return s;
}

AnomalySchedule truth_at(std::vector<std::int64_t> ts) {
  AnomalySchedule t;
  for (auto x : ts) t.anomalies.push_back({x, AnomalyType::change_point});
  return t;
}

}  // namespace

TEST_CASE("hits@n fraction over the truth set", "[eval]") {
  ScoreSeries s = series_with_ranking({16, 31, 61, 76, 91, 106, 136, 1, 2, 3});
  AnomalySchedule t = truth_at({16, 31, 61, 76, 91, 106, 136});
  CHECK(hits_at_n(s, t) == 1.0);

  ScoreSeries miss = series_with_ranking({1, 2, 3, 4, 5, 6, 7, 16, 31, 61, 76, 91, 106, 136});
  CHECK(hits_at_n(miss, t) == 0.0);

  ScoreSeries partial = series_with_ranking({16, 31, 61, 76, 91, 2, 3, 106, 136});
  CHECK_THAT(hits_at_n(partial, t), Catch::Matchers::WithinAbs(5.0 / 7.0, 1e-12));
}

TEST_CASE("hits@n is monotone in n and validates inputs", "[eval]") {
  ScoreSeries s = series_with_ranking({5, 4, 3, 2, 1});
  AnomalySchedule t = truth_at({1, 2});
  double prev = 0.0;
  for (int n = 1; n <= 5; ++n) {
    double h = hits_at_n(s, t, n);
    CHECK(h >= prev);
    prev = h;
  }
  CHECK(prev == 1.0);

  AnomalySchedule uncovered = truth_at({99});
  REQUIRE_THROWS_AS(hits_at_n(s, uncovered), data_error);
  REQUIRE_THROWS_AS(hits_at_n(s, AnomalySchedule{}), data_error);
}

TEST_CASE("tied scores rank earlier timesteps first", "[eval]") {
  ScoreSeries s;
  s.timesteps = {1, 2, 3, 4};
  s.z = {0.0, 0.5, 0.5, 0.1};
  s.zstar = {0.0, 0.5, 0.5, 0.1};
  std::vector<std::size_t> order{1, 2, 3, 0};
  s.ranking = {2, 3, 4, 1};
  CHECK(s.top_n(2) == std::vector<std::int64_t>{2, 3});
}

TEST_CASE("experiment reports are deterministic apart from timings", "[eval]") {
  DosConfig dos;
  dos.n_probe = 20;
  ScoringConfig scoring;
  ExperimentReport a = run_experiment("sbm_hybrid", 0.05, dos, scoring, {1, 2});
  ExperimentReport b = run_experiment("sbm_hybrid", 0.05, dos, scoring, {1, 2});
  REQUIRE(a.per_seed.size() == 2);
  CHECK(a.hits_mean == b.hits_mean);
  CHECK(a.hits_std == b.hits_std);
  CHECK(a.total_edges == b.total_edges);
  for (std::size_t i = 0; i < a.per_seed.size(); ++i) {
    CHECK(a.per_seed[i].hits == b.per_seed[i].hits);
    CHECK(a.per_seed[i].top == b.per_seed[i].top);
  }
  CHECK(a.truth.anomalies.size() == 7);
}

TEST_CASE("sweeps cover each axis and tolerate degenerate bins", "[eval]") {
  DosConfig dos;
  dos.n_probe = 10;
  std::map<std::string, std::vector<int>> grid{{"k", {2, 10}}, {"nm", {8}}};
  auto rows = sensitivity_sweep("sbm_hybrid", 0.03, dos, {}, grid, {1});
  REQUIRE(rows.size() == 3);
  for (const auto& r : rows) {
    CHECK(r.hits_mean >= 0.0);
    CHECK(r.hits_mean <= 1.0);
  }
  REQUIRE_THROWS_AS(sensitivity_sweep("sbm_hybrid", 0.03, dos, {}, {}, {1}), data_error);
  REQUIRE_THROWS_AS(
      sensitivity_sweep("sbm_hybrid", 0.03, dos, {}, {{"bogus", {1}}}, {1}), data_error);
}

TEST_CASE("the scaling probe needs at least three sizes", "[eval]") {
  DosConfig dos;
  dos.n_probe = 5;
  REQUIRE_THROWS_AS(scaling_probe("sbm_hybrid", {1.0, 2.0}, dos, 1), data_error);
}

TEST_CASE("unknown embeddings and empty seed lists are rejected", "[eval]") {
  REQUIRE_THROWS_AS(run_experiment("sbm_hybrid", 0.05, {}, {}, {}), data_error);
  REQUIRE_THROWS_AS(run_experiment("sbm_hybrid", 0.05, {}, {}, {1}, "magic"), data_error);
}
