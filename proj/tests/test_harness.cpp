#include <doctest.h>

#include <cmath>
#include <vector>

#include "mmdvar/alloc_tracker.hpp"
#include "mmdvar/harness.hpp"
#include "support.hpp"

using namespace mmdvar;
using support::kind_of;

namespace {

double mean(std::span<const double> v) {
  double s = 0;
  for (double x : v) s += x;
  return s / v.size();
}

double variance(std::span<const double> v) {
  const double mu = mean(v);
  double s = 0;
  for (double x : v) s += (x - mu) * (x - mu);
  return s / (v.size() - 1.0);
}

}  // namespace

TEST_CASE("uniform streams are keyed and strictly inside the unit interval") {
  const auto a = uniform_stream(1, 2, 0, 1000);
  CHECK(a == uniform_stream(1, 2, 0, 1000));
  CHECK(a != uniform_stream(1, 3, 0, 1000));
  CHECK(a != uniform_stream(1, 2, 1, 1000));
  CHECK(a != uniform_stream(2, 2, 0, 1000));
  for (double u : a) {
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
  CHECK(laplace_quantile(0.5, 3.0, 2.0) == 3.0);
  CHECK(laplace_quantile(0.25, 0.0, 1.0) == doctest::Approx(-std::log(2.0)));
}

TEST_CASE("scenario draws") {
  ScenarioConfig cfg;
  cfg.n = 10000;
  cfg.delta = 1.0;
  cfg.seed = 3;
  const auto [x, y] = generate_scenario(cfg);
  const auto [x2, y2] = generate_scenario(cfg);
  CHECK(std::equal(x.values().begin(), x.values().end(), x2.values().begin()));

  // Laplace(0, 1): variance 2 and fourth central moment 24.
  const double se_var = std::sqrt(20.0 / cfg.n);
  CHECK(std::abs(variance(x.values()) - 2.0) <= 4 * se_var);
  CHECK(std::abs(variance(y.values()) - 2.0) <= 4 * se_var);
  CHECK(std::abs(mean(y.values()) - mean(x.values()) - 1.0) <= 4 * std::sqrt(4.0 / cfg.n));

  // The shift is a pure translation of the same draws.
  ScenarioConfig moved = cfg;
  moved.delta = 2.5;
  const auto [x3, y3] = generate_scenario(moved);
  CHECK(std::equal(x.values().begin(), x.values().end(), x3.values().begin()));
  CHECK(y3.values()[7] - y.values()[7] == doctest::Approx(1.5));
}

TEST_CASE("configuration errors") {
  ScenarioConfig cfg;
  cfg.n = 3;
  CHECK(kind_of([&] { cfg.validate(); }) == ErrorKind::Config);
  cfg.n = 10;
  cfg.ratio = 0.2;
  CHECK(kind_of([&] { cfg.validate(); }) == ErrorKind::Config);
  cfg.ratio = -1;
  CHECK(kind_of([&] { cfg.validate(); }) == ErrorKind::Config);
  cfg.ratio = 1;
  cfg.replicates = 50;
  CHECK(kind_of([&] { monte_carlo_variance(cfg); }) == ErrorKind::Config);
  cfg.delta = NAN;
  CHECK(kind_of([&] { cfg.validate(); }) == ErrorKind::Config);
}

TEST_CASE("monte carlo rows are reproducible across runs and thread counts") {
  ScenarioConfig cfg;
  cfg.n = 30;
  cfg.ratio = 1.5;
  cfg.delta = 0.5;
  cfg.replicates = 150;
  cfg.seed = 9;
  const SweepRow a = monte_carlo_variance(cfg, {1});
  const SweepRow b = monte_carlo_variance(cfg, {3});
  SweepResult ra{{a}}, rb{{b}};
  CHECK(ra.to_csv() == rb.to_csv());
  CHECK(ra.to_json() == rb.to_json());
  CHECK(a.m == 45);
  CHECK(a.path == "fast");
  CHECK(a.replicates == 150);
  CHECK(a.mean_sigma > 0.0);
  CHECK(a.mean_var_total == doctest::Approx(a.mean_var_t1 + a.mean_var_t2));

  cfg.kernel = KernelSpec::laplacian(1.0);
  const SweepRow fixed = monte_carlo_variance(cfg, {2});
  CHECK(fixed.mean_sigma == 1.0);
  cfg.kernel = KernelSpec::gaussian(1.0);
  CHECK(monte_carlo_variance(cfg, {2}).path == "matrix");
}

TEST_CASE("shift sweep") {
  ScenarioConfig cfg;
  cfg.n = 20;
  cfg.replicates = 100;
  cfg.seed = 4;
  const std::vector<double> deltas{0.0, 1.0};
  const SweepResult r = shift_sweep(cfg, deltas, {2});
  REQUIRE(r.rows.size() == 2);
  CHECK(r.rows[1].delta == 1.0);
  CHECK(r.rows[1].mean_mmd2 > r.rows[0].mean_mmd2);

  const SweepRow mc = monte_carlo_variance(cfg, {1});
  CHECK(mc.mean_mmd2 == r.rows[0].mean_mmd2);
  CHECK(mc.mean_var_total == r.rows[0].mean_var_total);

  const std::string csv = r.to_csv();
  CHECK(csv.rfind("label,path,n,m,delta,replicates,", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
  CHECK(r.to_json().size() == 2);
}

TEST_CASE("swapping sample sizes under the null") {
  ScenarioConfig a;
  a.n = 40;
  a.ratio = 1.5;
  a.replicates = 2000;
  a.seed = 100;
  a.kernel = KernelSpec::laplacian(1.0);
  ScenarioConfig b = a;
  b.n = 60;
  b.ratio = 40.0 / 60.0;
  b.seed = 200;
  const SweepRow ra = monte_carlo_variance(a), rb = monte_carlo_variance(b);
  REQUIRE(rb.m == 40);
  CHECK(std::abs(ra.mean_mmd2 - rb.mean_mmd2) <= 3 * std::hypot(ra.se_mmd2, rb.se_mmd2));
  CHECK(std::abs(ra.mean_var_total - rb.mean_var_total) <= 3 * std::hypot(ra.se_var_total, rb.se_var_total));
}

TEST_CASE("log-log slope") {
  const std::vector<double> x{10, 100, 1000}, y{3e-2, 3e-4, 3e-6};
  CHECK(loglog_slope(x, y) == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(kind_of([&] { loglog_slope(std::span(x).first(1), std::span(y).first(1)); }) == ErrorKind::InvalidInput);
}

TEST_CASE("allocation tracking") {
  const alloc::PeakScope scope;
  {
    std::vector<char> block(1 << 20);
    block[5] = 1;
  }
  CHECK(scope.peak_additional() >= (1u << 20));
  CHECK(scope.peak_additional() < (1u << 20) + 4096);
}

TEST_CASE("scaling benchmark rows") {
  const std::vector<std::size_t> sizes{200, 400};
  const std::vector<EstimatorPath> paths{EstimatorPath::FastLaplace, EstimatorPath::Matrix};
  BenchmarkOptions opt;
  opt.runs = 2;
  opt.matrix_runs = 1;
  opt.matrix_cap = 300;
  const SweepResult r = scaling_benchmark(sizes, 1.2, paths, opt);
  REQUIRE(r.rows.size() == 4);
  CHECK(r.rows[0].path == "fast");
  CHECK(r.rows[0].m == 240);
  CHECK(r.rows[0].replicates == 2);
  CHECK(r.rows[0].peak_bytes > 0);
  CHECK(r.rows[0].time_min_s <= r.rows[0].time_max_s);
  CHECK_FALSE(r.rows[1].capped);
  CHECK(r.rows[1].peak_bytes > 3 * 200 * 240 * sizeof(double) / 2);
  CHECK(r.rows[1].mean_mmd2 == doctest::Approx(r.rows[0].mean_mmd2).epsilon(1e-9));
  CHECK(r.rows[3].capped);
}

namespace {

std::vector<double> second_order_share(double delta) {
  std::vector<double> out;
  for (const std::size_t n : {50u, 200u, 800u}) {
    ScenarioConfig cfg;
    cfg.n = n;
    cfg.delta = delta;
    cfg.replicates = 2000;
    cfg.seed = 77;
    cfg.kernel = KernelSpec::laplacian(1.0);
    const SweepRow r = monte_carlo_variance(cfg);
    out.push_back(r.mean_var_t2 / r.mean_var_total);
  }
  return out;
}

}  // namespace

TEST_CASE("second-order share falls with n under the alternative") {
  const auto share = second_order_share(1.0);
  CHECK(share[0] > share[1]);
  CHECK(share[1] > share[2]);
}

// Under the null the first-order projections vanish, but the empirical
// projection variance still carries second-order noise of the same order, so
// the share settles near a constant instead of growing. Kept strict and
// reported; see the README.
TEST_CASE("second-order share grows with n under the null" * doctest::may_fail()) {
  const auto share = second_order_share(0.0);
  MESSAGE("shares at n = 50, 200, 800: " << share[0] << ", " << share[1] << ", " << share[2]);
  CHECK(share[0] < share[1]);
  CHECK(share[1] < share[2]);
}
