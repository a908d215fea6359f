#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "mmdvar/error.hpp"
#include "mmdvar/kernel.hpp"
#include "oracle.hpp"
#include "support.hpp"

using namespace mmdvar;

using support::draws;
using support::kind_of;

TEST_CASE("kernel values") {
  const std::vector<double> zero{0.0}, one{1.0};
  CHECK(kernel_eval(KernelSpec::laplacian(1.0), zero, zero) == 1.0);
  CHECK(kernel_eval(KernelSpec::laplacian(1.0), zero, one) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(kernel_eval(KernelSpec::gaussian(1.0), zero, one) == doctest::Approx(std::exp(-0.5)).epsilon(1e-15));

  const std::vector<double> a{0.0, 0.0}, b{1.0, 1.0};
  CHECK(kernel_eval(KernelSpec::laplacian(1.0), a, b) == doctest::Approx(std::exp(-2.0)));
  CHECK(kernel_eval(KernelSpec::gaussian(1.0), a, b) == doctest::Approx(std::exp(-1.0)));
}

TEST_CASE("kernel is symmetric and bounded") {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 200; ++t) {
    const auto x = draws(rng, 3, false), y = draws(rng, 3, false);
    for (const auto spec : {KernelSpec::laplacian(0.7), KernelSpec::gaussian(2.0)}) {
      const double k = kernel_eval(spec, x, y);
      CHECK(k == kernel_eval(spec, y, x));
      CHECK(k > 0.0);
      CHECK(k <= 1.0);
    }
  }
}

TEST_CASE("kernel input validation") {
  const std::vector<double> one{1.0}, two{1.0, 2.0};
  const std::vector<double> bad{std::numeric_limits<double>::quiet_NaN()};
  CHECK(kind_of([&] { kernel_eval(KernelSpec::laplacian(1.0), one, two); }) == ErrorKind::InvalidInput);
  CHECK(kind_of([&] { kernel_eval(KernelSpec::laplacian(1.0), one, bad); }) == ErrorKind::InvalidInput);
  CHECK(kind_of([] { KernelSpec::laplacian(0.0); }) == ErrorKind::InvalidInput);
  CHECK(kind_of([] { KernelSpec::gaussian(-1.0); }) == ErrorKind::InvalidInput);
  CHECK(kind_of([] { KernelSpec::laplacian(std::numeric_limits<double>::infinity()); }) ==
        ErrorKind::InvalidInput);
}

TEST_CASE("sample construction") {
  CHECK(kind_of([] { Sample::univariate({}); }) == ErrorKind::InvalidInput);
  CHECK(kind_of([] { Sample({1.0, 2.0, 3.0}, 2); }) == ErrorKind::InvalidInput);
  CHECK(kind_of([] { Sample::univariate({1.0, std::numeric_limits<double>::infinity()}); }) ==
        ErrorKind::InvalidInput);
  CHECK(kind_of([] { Sample::sorted_univariate({2.0, 1.0}); }) == ErrorKind::Unsorted);

  const Sample s({1.0, 2.0, 3.0, 4.0}, 2);
  CHECK(s.size() == 2);
  CHECK(s.row(1)[0] == 3.0);
  CHECK_FALSE(s.is_sorted());

  const Sample sorted = Sample::univariate({3.0, 1.0, 2.0}).sorted();
  CHECK(sorted.is_sorted());
  CHECK(sorted.values()[0] == 1.0);
  CHECK(sorted.values()[2] == 3.0);
}

TEST_CASE("median heuristic examples") {
  CHECK(median_heuristic(Sample::univariate({0.0}), Sample::univariate({2.0})) == 2.0);
  CHECK(median_heuristic(Sample::univariate({0.0, 1.0}), Sample::univariate({2.0})) == 1.0);
  // Six of ten pairwise gaps are zero, so the smallest positive gap is used.
  CHECK(median_heuristic(Sample::univariate({0.0, 0.0, 0.0}), Sample::univariate({0.0, 1.0})) == 1.0);
  CHECK(kind_of([] {
          median_heuristic(Sample::univariate({5.0, 5.0}), Sample::univariate({5.0}));
        }) == ErrorKind::BandwidthUndefined);
  CHECK(median_heuristic(Sample({0.0, 0.0}, 2), Sample({3.0, 4.0}, 2)) == 5.0);
  CHECK(kind_of([] { median_heuristic(Sample({0.0, 0.0}, 2), Sample::univariate({1.0})); }) ==
        ErrorKind::InvalidInput);
}

TEST_CASE("univariate median matches full enumeration") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 300; ++t) {
    const bool grid = t % 2 == 0;
    const auto x = draws(rng, 1 + t % 17, grid), y = draws(rng, 1 + t % 13, grid);
    std::vector<double> pooled = x;
    pooled.insert(pooled.end(), y.begin(), y.end());
    CHECK(median_heuristic(Sample::univariate(x), Sample::univariate(y)) ==
          oracle::median_pairwise(pooled));
  }
}

TEST_CASE("median heuristic invariances") {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 50; ++t) {
    auto x = draws(rng, 9, true), y = draws(rng, 6, true);
    const double base = median_heuristic(Sample::univariate(x), Sample::univariate(y));

    std::shuffle(x.begin(), x.end(), rng);
    CHECK(median_heuristic(Sample::univariate(x), Sample::univariate(y)) == base);
    CHECK(median_heuristic(Sample::univariate(y), Sample::univariate(x)) == base);

    // Quarter-grid data shifted by an integer keeps every gap exact.
    for (auto& v : x) v += 17.0;
    for (auto& v : y) v += 17.0;
    CHECK(median_heuristic(Sample::univariate(x), Sample::univariate(y)) == base);

    std::vector<double> x2, y2;
    for (double v : x) x2.insert(x2.end(), {v, 0.0});
    for (double v : y) y2.insert(y2.end(), {v, 0.0});
    CHECK(median_heuristic(Sample(x2, 2), Sample(y2, 2)) == doctest::Approx(base).epsilon(1e-15));
  }
}

TEST_CASE("power bandwidth") {
  CHECK(power_bandwidth(KernelSpec::laplacian(1.0), 2).sigma() == 0.5);
  CHECK(power_bandwidth(KernelSpec::laplacian(3.0), 1).sigma() == 3.0);
  CHECK(kind_of([] { power_bandwidth(KernelSpec::gaussian(1.0), 2); }) == ErrorKind::UnsupportedFamily);
  CHECK(kind_of([] { power_bandwidth(KernelSpec::laplacian(1.0), 0); }) == ErrorKind::InvalidInput);

  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-5.0, 5.0), s(0.05, 5.0);
  for (int t = 0; t < 1000; ++t) {
    const std::vector<double> a{u(rng)}, b{u(rng)};
    const KernelSpec spec = KernelSpec::laplacian(s(rng));
    const int p = 1 + t % 5;
    const double lhs = kernel_eval(power_bandwidth(spec, p), a, b);
    const double rhs = std::pow(kernel_eval(spec, a, b), p);
    CHECK(std::abs(lhs - rhs) <= 1e-14);
  }
}
