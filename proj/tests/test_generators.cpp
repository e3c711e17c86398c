#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <set>
#include <vector>

#include "scpd/generators.hpp"
#include "scpd/graph.hpp"

using namespace scpd;

namespace {

int count_components(const Snapshot& s) {
  std::vector<int> parent(s.node_count);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (int i = 0; i < s.node_count; ++i)
    for (std::int64_t e = s.row_ptr[i]; e < s.row_ptr[i + 1]; ++e)
      parent[find(i)] = find(s.col_idx[e]);
  std::set<int> roots;
  for (int i = 0; i < s.node_count; ++i) roots.insert(find(i));
  return static_cast<int>(roots.size());
}

}  // namespace

TEST_CASE("deterministic SBM limit: two disjoint triangles", "[generators]") {
  SbmSchedule sch;
  sch.total_steps = 4;
  sch.rows = {{0, {3, 3}, 1.0, 0.0, AttributeMode::none, false}};
  auto [snaps, truth] = generate_sbm_series(sch, 42);
  REQUIRE(snaps.size() == 4);
  CHECK(truth.anomalies.empty());
  for (const auto& s : snaps) {
    CHECK(s.node_count == 6);
    CHECK(s.edge_count() == 6);
    CHECK(count_components(s) == 2);
    CHECK(s.adjacency_at(0, 3) == 0.0);
  }
}

TEST_CASE("SBM edge counts match the binomial expectation", "[generators]") {
  const double p_in = 0.030, p_out = 0.005;
  SbmSchedule sch;
  sch.total_steps = 50;
  sch.rows = {{0, {300, 300, 300, 300}, p_in, p_out, AttributeMode::none, false}};
  auto [snaps, truth] = generate_sbm_series(sch, 7);

  const double intra_pairs = 4.0 * (300.0 * 299.0 / 2.0);
  const double total_pairs = 1200.0 * 1199.0 / 2.0;
  const double inter_pairs = total_pairs - intra_pairs;
  const double expected = intra_pairs * p_in + inter_pairs * p_out;
  const double variance =
      intra_pairs * p_in * (1 - p_in) + inter_pairs * p_out * (1 - p_out);
  const double sigma_mean = std::sqrt(variance / 50.0);

  double mean = 0.0;
  for (const auto& s : snaps) mean += static_cast<double>(s.edge_count()) / 50.0;
  CHECK(std::abs(mean - expected) <= 3.0 * sigma_mean);
}

TEST_CASE("empirical intra/inter densities match the schedule", "[generators]") {
  const double p_in = 0.1, p_out = 0.02;
  SbmSchedule sch;
  sch.total_steps = 50;
  sch.rows = {{0, {40, 40}, p_in, p_out, AttributeMode::none, false}};
  auto [snaps, truth] = generate_sbm_series(sch, 11);

  double intra = 0.0, inter = 0.0;
  for (const auto& s : snaps)
    for (int i = 0; i < s.node_count; ++i)
      for (std::int64_t e = s.row_ptr[i]; e < s.row_ptr[i + 1]; ++e) {
        int j = s.col_idx[e];
        if (i < j) ((i < 40) == (j < 40) ? intra : inter) += 1.0;
      }
  const double intra_trials = 50.0 * 2.0 * (40.0 * 39.0 / 2.0);
  const double inter_trials = 50.0 * 40.0 * 40.0;
  const double se_in = std::sqrt(p_in * (1 - p_in) / intra_trials);
  const double se_out = std::sqrt(p_out * (1 - p_out) / inter_trials);
  CHECK(std::abs(intra / intra_trials - p_in) <= 3.0 * se_in);
  CHECK(std::abs(inter / inter_trials - p_out) <= 3.0 * se_out);
}

TEST_CASE("hybrid schedule reproduces the planted anomaly table", "[generators]") {
  SbmSchedule sch = sbm_hybrid_schedule();
  auto truth = detail::sbm_ground_truth(sch);
  REQUIRE(truth.anomalies.size() == 7);
  const std::vector<std::pair<std::int64_t, AnomalyType>> expected{
      {16, AnomalyType::event},        {31, AnomalyType::change_point},
      {61, AnomalyType::event},        {76, AnomalyType::change_point},
      {91, AnomalyType::event},        {106, AnomalyType::change_point},
      {136, AnomalyType::event}};
  for (std::size_t i = 0; i < expected.size(); ++i) {
    CHECK(truth.anomalies[i].timestep == expected[i].first);
    CHECK(truth.anomalies[i].type == expected[i].second);
  }
}

TEST_CASE("attribute schedule tags structural and attribute changes", "[generators]") {
  auto truth = detail::sbm_ground_truth(sbm_attribute_schedule());
  REQUIRE(truth.anomalies.size() == 7);
  std::set<std::int64_t> attr, structural;
  for (const auto& a : truth.anomalies)
    (a.type == AnomalyType::attribute_change_point ? attr : structural).insert(a.timestep);
  CHECK(attr == std::set<std::int64_t>{16, 61, 91, 136});
  CHECK(structural == std::set<std::int64_t>{31, 76, 106});
}

TEST_CASE("every builtin plants exactly seven anomalies", "[generators]") {
  for (const char* name : {"sbm_hybrid", "sbm_attribute", "sbm_evolving", "ba_change"}) {
    auto [snaps, truth] = builtin_experiment(name, 0.05, 1);
    CHECK(truth.anomalies.size() == 7);
    CHECK(snaps.size() == 151);
  }
  REQUIRE_THROWS_AS(builtin_experiment("nope", 1.0, 1), data_error);
}

TEST_CASE("events apply for exactly one timestep", "[generators]") {
  SbmSchedule sch;
  sch.total_steps = 20;
  sch.rows = {{0, {50, 50}, 0.2, 0.0, AttributeMode::none, false},
              {10, {50, 50}, 0.2, 1.0, AttributeMode::none, true}};
  auto [snaps, truth] = generate_sbm_series(sch, 3);
  REQUIRE(truth.anomalies.size() == 1);
  CHECK(truth.anomalies[0].type == AnomalyType::event);
  for (const auto& s : snaps) {
    bool cross = false;
    for (int i = 0; i < 50 && !cross; ++i)
      for (std::int64_t e = s.row_ptr[i]; e < s.row_ptr[i + 1]; ++e)
        cross = cross || s.col_idx[e] >= 50;
    CHECK(cross == (s.timestep == 10));
  }
}

TEST_CASE("evolving schedule grows the node set and splits communities", "[generators]") {
  auto [snaps, truth] = builtin_experiment("sbm_evolving", 1.0, 5);
  auto node_count_at = [&](std::int64_t t) { return snaps[t - 1].node_count; };
  CHECK(node_count_at(1) == 600);
  CHECK(node_count_at(16) == 900);
  CHECK(node_count_at(31) == 1200);
  CHECK(node_count_at(61) == 1200);
  CHECK(node_count_at(151) == 1200);
  REQUIRE(truth.anomalies.size() == 7);
  CHECK(truth.anomalies.back().timestep == 136);
  CHECK(truth.anomalies.back().type == AnomalyType::event);
  CHECK(truth.anomalies.front().type == AnomalyType::change_point);
}

TEST_CASE("BA with m=1 yields a connected tree", "[generators]") {
  BaSchedule sch;
  sch.node_count = 200;
  sch.total_steps = 3;
  sch.rows = {{0, 1}};
  auto [snaps, truth] = generate_ba_series(sch, 13);
  for (const auto& s : snaps) {
    CHECK(s.edge_count() == 199);
    CHECK(count_components(s) == 1);
  }
}

TEST_CASE("BA edge count is exact for a clique seed", "[generators]") {
  BaSchedule sch;
  sch.node_count = 500;
  sch.total_steps = 1;
  sch.rows = {{0, 3}};
  auto [snaps, truth] = generate_ba_series(sch, 17);
  CHECK(snaps[0].edge_count() == 3 + 3 * 497);  // C(3,2) + m(n-m)
}

TEST_CASE("BA schedule steps m upward at the table times", "[generators]") {
  BaSchedule sch = ba_change_schedule();
  CHECK(sch.node_count == 500);
  REQUIRE(sch.rows.size() == 8);
  for (std::size_t i = 0; i < sch.rows.size(); ++i) CHECK(sch.rows[i].m == static_cast<int>(i + 1));
  auto [snaps, truth] = generate_ba_series([&] {
    BaSchedule small = sch;
    small.node_count = 60;
    small.total_steps = 40;
    return small;
  }(), 19);
  std::set<std::int64_t> cps;
  for (const auto& a : truth.anomalies) {
    CHECK(a.type == AnomalyType::change_point);
    cps.insert(a.timestep);
  }
  CHECK(cps == std::set<std::int64_t>{16, 31});  // only rows within total_steps
  CHECK(snaps[14].edge_count() == 59);          // m=1 tree before the change
}

TEST_CASE("BA degrees are heavy-tailed for m >= 2", "[generators]") {
  BaSchedule sch;
  sch.node_count = 500;
  sch.total_steps = 5;
  sch.rows = {{0, 2}};
  auto [snaps, truth] = generate_ba_series(sch, 23);
  std::vector<double> degrees;
  for (const auto& s : snaps)
    for (double d : s.weighted_degrees()) degrees.push_back(d);
  std::sort(degrees.begin(), degrees.end());
  const double median = degrees[degrees.size() / 2];
  CHECK(degrees.back() >= 5.0 * median);
}

TEST_CASE("generation is reproducible for a fixed seed", "[generators]") {
  auto [a, ta] = builtin_experiment("sbm_hybrid", 0.05, 99);
  auto [b, tb] = builtin_experiment("sbm_hybrid", 0.05, 99);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); i += 17) {
    CHECK(a[i].col_idx == b[i].col_idx);
    CHECK(a[i].weights == b[i].weights);
  }
  auto [c, tc] = builtin_experiment("sbm_hybrid", 0.05, 100);
  CHECK(a[0].col_idx != c[0].col_idx);
}

TEST_CASE("attribute modes populate the label column", "[generators]") {
  auto [snaps, truth] = builtin_experiment("sbm_attribute", 0.1, 3);
  const Snapshot& hom = snaps[0];  // t=1: homogeneous
  REQUIRE(hom.attributes.has_value());
  const auto& col = hom.attributes->columns.front();
  CHECK(col.name == "label");
  const int csize = hom.node_count / 4;
  for (int c = 0; c < 4; ++c)
    for (int i = 1; i < csize; ++i)
      CHECK(col.values[c * csize + i] == col.values[c * csize]);
  CHECK(col.values.front() == "one");
  CHECK(col.values.back() == "two");

  const Snapshot& het = snaps[16];  // t=17: heterogeneous segment
  const auto& hcol = het.attributes->columns.front();
  int ones = 0;
  for (const auto& v : hcol.values) ones += v == "one";
  CHECK(ones > het.node_count / 4);
  CHECK(ones < 3 * het.node_count / 4);
}

TEST_CASE("schedule validation rejects malformed rows", "[generators]") {
  SbmSchedule sch;
  sch.rows = {{0, {10, 10, 10}, 0.5, 0.1, AttributeMode::homogeneous, false}};
  REQUIRE_THROWS_AS(sch.validate(), data_error);  // odd community count, homogeneous

  SbmSchedule order;
  order.rows = {{5, {10}, 0.5, 0.1, AttributeMode::none, false},
                {5, {10}, 0.5, 0.1, AttributeMode::none, false}};
  REQUIRE_THROWS_AS(order.validate(), data_error);

  BaSchedule ba;
  ba.node_count = 4;
  ba.rows = {{0, 5}};
  REQUIRE_THROWS_AS(ba.validate(), data_error);
}
