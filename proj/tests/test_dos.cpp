#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "scpd/dos.hpp"
#include "scpd/generators.hpp"
#include "scpd/graph.hpp"
#include "scpd/laplacian.hpp"
#include "scpd/oracle.hpp"
#include "scpd/rng.hpp"

using namespace scpd;

namespace {

Snapshot sbm_graph(const std::vector<int>& sizes, double p_in, double p_out, std::uint64_t seed) {
  SbmSegment seg{0, sizes, p_in, p_out, AttributeMode::none, false};
  return detail::sample_sbm_snapshot(1, seg, seed);
}

std::vector<double> l1_normalized(std::vector<double> v) {
  double s = std::accumulate(v.begin(), v.end(), 0.0);
  if (s > 0.0)
    for (double& x : v) x /= s;
  return v;
}

double l1_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += std::abs(a[i] - b[i]);
  return d;
}

double kpm_vs_oracle_l1(const Snapshot& s, const DosConfig& cfg) {
  SpectralOperator op(s);
  SignatureVector kpm = kpm_dos(op, cfg);
  SignatureVector exact = exact_histogram(exact_spectrum(s, false), cfg.n_bins);
  return l1_distance(l1_normalized(kpm.bins), l1_normalized(exact.bins));
}

Snapshot k3() { return build_snapshot(1, {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 1.0}}); }

}  // namespace

TEST_CASE("bin layout sends edge values right and clamps the range", "[dos]") {
  CHECK(bin_index(-1.0, 4) == 0);
  CHECK(bin_index(1.0, 4) == 3);
  CHECK(bin_index(0.5, 4) == 3);                 // interior edge goes right
  CHECK(bin_index(0.5 - 1e-14, 4) == 3);         // snapped onto the edge
  CHECK(bin_index(0.25, 4) == 2);
  CHECK(bin_index(0.0, 2) == 1);
}

TEST_CASE("Jackson coefficients start at 1 and decay", "[dos]") {
  auto g = jackson_coefficients(20);
  REQUIRE(g.size() == 20);
  CHECK_THAT(g[0], Catch::Matchers::WithinAbs(1.0, 1e-12));
  for (std::size_t m = 1; m < g.size(); ++m) {
    CHECK(g[m] < g[m - 1]);
    CHECK(g[m] > 0.0);
  }
}

TEST_CASE("moment sanity: d_0 exact, all moments bounded", "[dos]") {
  Snapshot s = sbm_graph({50, 50}, 0.2, 0.05, 3);
  DosConfig cfg;
  cfg.rng_seed = 11;
  ChebyshevMoments m = chebyshev_moments(SpectralOperator(s), cfg);
  REQUIRE(m.raw[0] == 1.0);
  for (double d : m.raw) CHECK(std::abs(d) <= 1.0 + 1e-6);
}

TEST_CASE("full-range bin integrates to exactly |V|", "[dos]") {
  Snapshot s = sbm_graph({40, 40}, 0.2, 0.05, 5);
  DosConfig cfg;
  cfg.rng_seed = 4;
  ChebyshevMoments m = chebyshev_moments(SpectralOperator(s), cfg);
  auto one_bin = moments_to_bins(m, 80.0, 1, Damping::jackson);
  REQUIRE(one_bin.size() == 1);
  CHECK_THAT(one_bin[0], Catch::Matchers::WithinAbs(80.0, 1e-9));
  // telescoping: the k-bin masses also sum to |V| exactly before clipping
  auto bins = moments_to_bins(m, 80.0, 50, Damping::jackson);
  CHECK_THAT(std::accumulate(bins.begin(), bins.end(), 0.0),
             Catch::Matchers::WithinAbs(80.0, 1e-9));
}

TEST_CASE("K_3 spectrum lands in the right bins", "[dos]") {
  // L_sym eigenvalues {0, 1.5, 1.5}; 1.5 sits exactly on the bin-2/bin-3
  // edge at k=4 and goes right, so the exact histogram is [1,0,0,2]. The
  // KPM smoothing splits edge-seated atoms across the two adjacent bins, so
  // it is compared against the oracle per eigenvalue cluster.
  Snapshot s = k3();
  SignatureVector exact = exact_histogram(exact_spectrum(s, false), 4);
  CHECK(exact.bins == std::vector<double>{1.0, 0.0, 0.0, 2.0});

  DosConfig cfg;
  cfg.n_bins = 4;
  cfg.rng_seed = 2;
  SignatureVector kpm = kpm_dos(SpectralOperator(s), cfg);
  CHECK_THAT(kpm.sum(), Catch::Matchers::WithinAbs(3.0, 0.05));
  CHECK_THAT(kpm.bins[0], Catch::Matchers::WithinAbs(1.0, 0.1));
  CHECK(kpm.bins[1] <= 0.1);
  CHECK_THAT(kpm.bins[2] + kpm.bins[3], Catch::Matchers::WithinAbs(2.0, 0.1));
}

TEST_CASE("KPM histogram tracks the oracle on a 4-community graph", "[dos]") {
  DosConfig cfg;
  cfg.rng_seed = 21;
  Snapshot s = sbm_graph({125, 125, 125, 125}, 0.030, 0.005, 21);
  CHECK(kpm_vs_oracle_l1(s, cfg) <= 0.10);
}

TEST_CASE("global mass conservation within 2 percent", "[dos]") {
  Snapshot s = sbm_graph({100, 100}, 0.05, 0.01, 9);
  DosConfig cfg;
  cfg.rng_seed = 13;
  SignatureVector sig = kpm_dos(SpectralOperator(s), cfg);
  CHECK(sig.sum() >= 200.0 * 0.98);
  CHECK(sig.sum() <= 200.0 * 1.02);
  for (double b : sig.bins) CHECK(b >= 0.0);
}

TEST_CASE("KPM-oracle distance shrinks as moments double", "[dos]") {
  double mean_l1[3] = {0.0, 0.0, 0.0};
  const int n_moments[3] = {10, 20, 40};
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Snapshot s = sbm_graph({50, 50, 50, 50}, 0.2, 0.05, seed);
    for (int c = 0; c < 3; ++c) {
      DosConfig cfg;
      cfg.n_moments = n_moments[c];
      cfg.rng_seed = seed * 7 + 1;
      mean_l1[c] += kpm_vs_oracle_l1(s, cfg) / 5.0;
    }
  }
  CHECK(mean_l1[0] >= mean_l1[1]);
  CHECK(mean_l1[1] >= mean_l1[2]);
}

TEST_CASE("zero-eigenvalue bin mass counts connected components", "[dos][oracle]") {
  // two disjoint triangles: two components, eigenvalue 0 with multiplicity 2
  Snapshot s = build_snapshot(
      1, {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 1.0}, {3, 4, 1.0}, {4, 5, 1.0}, {3, 5, 1.0}});
  SignatureVector exact = exact_histogram(exact_spectrum(s, false), 50);
  CHECK(exact.bins[bin_index(-1.0, 50)] == 2.0);
}

TEST_CASE("relabeling nodes leaves both histograms unchanged", "[dos]") {
  const int n = 60;
  Snapshot s = sbm_graph({30, 30}, 0.2, 0.05, 31);
  // permute ids by reversal
  std::vector<EdgeRec> permuted;
  for (int i = 0; i < n; ++i)
    for (std::int64_t e = s.row_ptr[i]; e < s.row_ptr[i + 1]; ++e) {
      int j = s.col_idx[e];
      if (i < j) permuted.push_back({n - 1 - i, n - 1 - j, s.weights[e]});
    }
  Snapshot sp = build_snapshot_dense(1, n, permuted);

  SignatureVector ha = exact_histogram(exact_spectrum(s, false), 50);
  SignatureVector hb = exact_histogram(exact_spectrum(sp, false), 50);
  CHECK(ha.bins == hb.bins);  // integer counts, bit-identical

  auto probes = make_probes(n, 50, 77);
  auto permuted_probes = probes;
  for (auto& z : permuted_probes) std::reverse(z.begin(), z.end());
  ChebyshevMoments ma = chebyshev_moments_with_probes(SpectralOperator(s), probes, 20);
  ChebyshevMoments mb = chebyshev_moments_with_probes(SpectralOperator(sp), permuted_probes, 20);
  for (int m = 0; m < 20; ++m)
    CHECK_THAT(ma.raw[m], Catch::Matchers::WithinAbs(mb.raw[m], 1e-10));
}

TEST_CASE("GQL puts an eigenvector's mass in a single bin", "[dos]") {
  Snapshot s = sbm_graph({20, 20}, 0.4, 0.05, 41);
  ExactSpectrum spec = exact_spectrum(s, true);
  const int pick = 7;
  std::vector<double> v(spec.eigenvectors.col(pick).data(),
                        spec.eigenvectors.col(pick).data() + s.node_count);
  DosConfig cfg;
  SignatureVector sig = gql_ldos(SpectralOperator(s), v, cfg);
  const int expected_bin = bin_index(spec.eigenvalues[pick] - 1.0, cfg.n_bins);
  CHECK_THAT(sig.bins[expected_bin], Catch::Matchers::WithinAbs(1.0, 1e-8));
  CHECK_THAT(sig.sum(), Catch::Matchers::WithinAbs(1.0, 1e-8));
}

TEST_CASE("GQL on the K_3 constant vector hits the zero eigenvalue bin", "[dos]") {
  Snapshot s = k3();
  const double c = 1.0 / std::sqrt(3.0);
  DosConfig cfg;
  SignatureVector sig = gql_ldos(SpectralOperator(s), {c, c, c}, cfg);
  CHECK_THAT(sig.bins[bin_index(-1.0, cfg.n_bins)], Catch::Matchers::WithinAbs(1.0, 1e-10));
}

TEST_CASE("GQL conserves total mass exactly", "[dos]") {
  Snapshot s = sbm_graph({80, 80}, 0.1, 0.02, 51);
  Rng rng(3);
  std::vector<double> v(160);
  for (auto& x : v) x = rng.next_double() * 4.0 - 1.0;
  double vnorm2 = 0.0;
  for (double x : v) vnorm2 += x * x;
  DosConfig cfg;
  SignatureVector sig = gql_ldos(SpectralOperator(s), v, cfg);
  CHECK_THAT(sig.sum(), Catch::Matchers::WithinAbs(vnorm2, 1e-6 * vnorm2));
}

TEST_CASE("GQL matches the oracle on a community indicator", "[dos]") {
  Snapshot s = sbm_graph({125, 125, 125, 125}, 0.2, 0.02, 61);
  std::vector<double> v(500, 0.0);
  for (int i = 0; i < 125; ++i) v[i] = 1.0;
  DosConfig cfg;
  SignatureVector approx = gql_ldos(SpectralOperator(s), v, cfg);
  ExactSpectrum spec = exact_spectrum(s, true);
  SignatureVector exact = exact_histogram(spec, cfg.n_bins, &v);
  CHECK(l1_distance(l1_normalized(approx.bins), l1_normalized(exact.bins)) <= 0.05);
}

TEST_CASE("GQL caps Lanczos steps at the node count and rejects zero vectors", "[dos]") {
  Snapshot s = k3();
  DosConfig cfg;  // n_moments = 20 > 3 nodes
  SignatureVector sig = gql_ldos(SpectralOperator(s), {1.0, 0.0, 0.0}, cfg);
  CHECK_THAT(sig.sum(), Catch::Matchers::WithinAbs(1.0, 1e-9));
  REQUIRE_THROWS_AS(gql_ldos(SpectralOperator(s), {0.0, 0.0, 0.0}, cfg), data_error);
}

TEST_CASE("embedding is deterministic per timestep and thread-independent", "[dos]") {
  Snapshot a = sbm_graph({40, 40}, 0.1, 0.02, 71);
  Snapshot b = a;  // same timestep -> same derived probe stream
  DosConfig cfg;
  cfg.rng_seed = 5;
  EmbeddedSeries two = embed_series({a, b}, cfg);
  CHECK(two.global[0].bins == two.global[1].bins);

  std::vector<Snapshot> series;
  for (int t = 1; t <= 6; ++t) series.push_back(sbm_graph({30, 30}, 0.1, 0.02, 100 + t));
  for (int t = 0; t < 6; ++t) series[t].timestep = t + 1;
  EmbeddedSeries seq = embed_series(series, cfg, std::nullopt, 1);
  EmbeddedSeries par = embed_series(series, cfg, std::nullopt, 4);
  for (int t = 0; t < 6; ++t) CHECK(seq.global[t].bins == par.global[t].bins);
}

TEST_CASE("embedded vectors are unit length", "[dos]") {
  std::vector<Snapshot> series;
  for (int t = 1; t <= 3; ++t) {
    Snapshot s = sbm_graph({25, 25}, 0.2, 0.05, 200 + t);
    s.timestep = t;
    series.push_back(std::move(s));
  }
  DosConfig cfg;
  EmbeddedSeries emb = embed_series(series, cfg);
  for (const auto& sig : emb.global)
    CHECK_THAT(sig.l2_norm(), Catch::Matchers::WithinAbs(1.0, 1e-9));
}

TEST_CASE("degenerate graphs: empty errors, all-isolated concentrates at zero", "[dos]") {
  Snapshot empty;
  REQUIRE_THROWS_AS(kpm_dos(SpectralOperator(empty), DosConfig{}), data_error);

  AttributeRows rows;
  rows.names = {"c"};
  rows.kinds = {AttrKind::categorical};
  for (int i = 0; i < 50; ++i) rows.rows.push_back({i, {"x"}});
  Snapshot isolated = build_snapshot(1, {}, &rows);
  REQUIRE(isolated.node_count == 50);
  DosConfig cfg;
  SignatureVector sig = kpm_dos(SpectralOperator(isolated), cfg);
  // H = 0: the smoothed point mass stays centred on the bin containing 0
  double near_zero = 0.0;
  for (int b = 0; b < cfg.n_bins; ++b) {
    double lo = -1.0 + 2.0 * b / cfg.n_bins;
    if (std::abs(lo + 1.0 / cfg.n_bins) <= 0.2) near_zero += sig.bins[b];
  }
  CHECK(near_zero >= 0.9 * sig.sum());

  SignatureVector exact = exact_histogram(exact_spectrum(isolated, false), 2);
  CHECK(exact.bins[bin_index(0.0, 2)] == 50.0);
}

TEST_CASE("config validation rejects out-of-range parameters", "[dos]") {
  DosConfig cfg;
  cfg.n_probe = 0;
  REQUIRE_THROWS_AS(cfg.validate(), data_error);
  cfg = DosConfig{};
  cfg.n_moments = 1;
  REQUIRE_THROWS_AS(cfg.validate(), data_error);
  cfg = DosConfig{};
  cfg.n_bins = 1;
  REQUIRE_THROWS_AS(cfg.validate(), data_error);
}
