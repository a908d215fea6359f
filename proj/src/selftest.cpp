#include "mmdvar/selftest.hpp"

#include <algorithm>
#include <cmath>

#include "mmdvar/exact.hpp"
#include "mmdvar/fast_laplace.hpp"
#include "mmdvar/harness.hpp"

namespace mmdvar {

namespace {

double rel_error(double a, double b, double floor = 0.0) {
  const double scale = std::max({std::abs(a), std::abs(b), floor});
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

double laplace_kernel(double a, double b, double sigma) { return std::exp(-std::abs(a - b) / sigma); }

// Two-component Laplace mixture; every third instance is snapped to a coarse
// grid so that ties exercise the zero-gap branches.
std::vector<double> mixture_draw(std::uint64_t seed, std::uint64_t instance, std::uint64_t stream,
                                 std::size_t count) {
  const std::vector<double> u = uniform_stream(seed, instance, 2 * stream, count);
  const std::vector<double> pick = uniform_stream(seed, instance, 2 * stream + 1, count);
  std::vector<double> out(count);
  for (std::size_t k = 0; k < count; ++k) {
    out[k] = pick[k] < 0.6 ? laplace_quantile(u[k], 0.0, 1.0) : laplace_quantile(u[k], 2.5, 0.5);
    if (instance % 3 == 0) out[k] = std::round(out[k] * 2.0) / 2.0;
  }
  return out;
}

class Suite {
 public:
  Suite(std::string name, double tolerance) {
    result_.name = std::move(name);
    result_.tolerance = tolerance;
  }

  // `floor` bounds the denominator from below for quantities that cancel
  // towards zero.
  void check(double got, double want, double floor = 0.0) {
    const double err = rel_error(got, want, floor);
    ++result_.cases;
    result_.worst_rel_error = std::max(result_.worst_rel_error, err);
    if (!(err <= result_.tolerance)) ++result_.failures;
  }

  SuiteResult result() const { return result_; }

 private:
  SuiteResult result_;
};

SuiteResult row_sum_suite(const SelftestOptions& opt, std::size_t instances) {
  Suite suite("prefix/suffix row sums", 1e-12);
  for (std::size_t t = 0; t < instances; ++t) {
    const std::size_t len = 1 + t % 40;
    const double sigma = std::pow(10.0, static_cast<double>(t % 3) - 1.0);
    const Sample s = Sample::univariate(mixture_draw(opt.seed, t, 0, len)).sorted();
    const std::vector<double> fast = prefix_suffix(s, sigma).row_sums();
    const auto v = s.values();
    for (std::size_t i = 0; i < len; ++i) {
      double brute = 0.0;
      for (std::size_t j = 0; j < len; ++j) {
        if (j != i) brute += laplace_kernel(v[i], v[j], sigma);
      }
      suite.check(fast[i], brute);
    }
  }
  return suite.result();
}

SuiteResult cross_suite(const SelftestOptions& opt, std::size_t instances) {
  Suite suite("cross accumulators", 1e-12);
  for (std::size_t t = 0; t < instances; ++t) {
    const double sigma = std::pow(10.0, static_cast<double>(t % 3) - 1.0);
    const Sample x = Sample::univariate(mixture_draw(opt.seed, t, 1, 1 + t % 23)).sorted();
    const Sample y = Sample::univariate(mixture_draw(opt.seed, t, 2, 1 + t % 31)).sorted();
    const CrossAccumulatorSet acc = cross_prefix_suffix(x, y, sigma);
    const std::vector<double> xs = acc.x_row_sums();
    const std::vector<double> ys = acc.y_row_sums();
    for (std::size_t i = 0; i < x.size(); ++i) {
      double brute = 0.0;
      for (const double yv : y.values()) brute += laplace_kernel(x.values()[i], yv, sigma);
      suite.check(xs[i], brute);
    }
    for (std::size_t j = 0; j < y.size(); ++j) {
      double brute = 0.0;
      for (const double xv : x.values()) brute += laplace_kernel(xv, y.values()[j], sigma);
      suite.check(ys[j], brute);
    }
  }
  return suite.result();
}

SuiteResult frobenius_suite(const SelftestOptions& opt, std::size_t instances) {
  Suite suite("squared-kernel (sigma/2) pass", 1e-12);
  const int power = opt.corrupt_squared_pass ? 1 : 2;
  for (std::size_t t = 0; t < instances; ++t) {
    const double sigma = std::pow(10.0, static_cast<double>(t % 3) - 1.0);
    const Sample s = Sample::univariate(mixture_draw(opt.seed, t, 3, 2 + t % 40)).sorted();
    const double half = power_bandwidth(KernelSpec::laplacian(sigma), power).sigma();
    const std::vector<double> rows = prefix_suffix(s, half).row_sums();
    double fast = 0.0;
    for (const double r : rows) fast += r;
    double brute = 0.0;
    const auto v = s.values();
    for (std::size_t i = 0; i < v.size(); ++i) {
      for (std::size_t j = 0; j < v.size(); ++j) {
        if (i != j) brute += std::pow(laplace_kernel(v[i], v[j], sigma), 2);
      }
    }
    suite.check(fast, brute);
  }
  return suite.result();
}

SuiteResult equivalence_suite(const SelftestOptions& opt, std::size_t instances) {
  Suite suite("fast vs matrix path", 1e-9);
  for (std::size_t t = 0; t < instances; ++t) {
    const double sigma = std::pow(10.0, static_cast<double>(t % 3) - 1.0);
    const Sample x = Sample::univariate(mixture_draw(opt.seed, t, 4, 4 + (t * 7) % 61));
    const Sample y = Sample::univariate(mixture_draw(opt.seed, t, 5, 4 + (t * 13) % 61));
    const MmdReport fast = variance_fast(x, y, sigma);
    const MmdReport full = variance_full(x, y, KernelSpec::laplacian(sigma));
    suite.check(fast.mmd2, full.mmd2);
    suite.check(fast.var_t1, full.var_t1);
    suite.check(fast.var_t2, full.var_t2);
    suite.check(fast.var_total, full.var_total);
    suite.check(mmd2_fast_triangular(x, y, sigma), full.mmd2);
  }
  return suite.result();
}

// Averages the plug-in products over every admissible index tuple.
SecondOrderMoments enumerate_moments(const std::vector<double>& x, const std::vector<double>& y,
                                     double sigma) {
  const auto within = [&](const std::vector<double>& s) {
    const std::size_t n = s.size();
    double sq = 0.0, chain = 0.0, disjoint = 0.0;
    double c_sq = 0.0, c_chain = 0.0, c_disjoint = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        const double kij = laplace_kernel(s[i], s[j], sigma);
        sq += kij * kij;
        c_sq += 1.0;
        for (std::size_t l = 0; l < n; ++l) {
          if (l == i || l == j) continue;
          chain += kij * laplace_kernel(s[i], s[l], sigma);
          c_chain += 1.0;
          for (std::size_t p = 0; p < n; ++p) {
            if (p == i || p == j || p == l) continue;
            disjoint += kij * laplace_kernel(s[l], s[p], sigma);
            c_disjoint += 1.0;
          }
        }
      }
    }
    return sq / c_sq - 2.0 * chain / c_chain + disjoint / c_disjoint;
  };

  const std::size_t n = x.size(), m = y.size();
  double sq = 0.0, share_x = 0.0, share_y = 0.0, disjoint = 0.0;
  double c_sq = 0.0, c_x = 0.0, c_y = 0.0, c_d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double kij = laplace_kernel(x[i], y[j], sigma);
      sq += kij * kij;
      c_sq += 1.0;
      for (std::size_t jj = 0; jj < m; ++jj) {
        if (jj == j) continue;
        share_x += kij * laplace_kernel(x[i], y[jj], sigma);
        c_x += 1.0;
      }
      for (std::size_t ii = 0; ii < n; ++ii) {
        if (ii == i) continue;
        share_y += kij * laplace_kernel(x[ii], y[j], sigma);
        c_y += 1.0;
        for (std::size_t jj = 0; jj < m; ++jj) {
          if (jj == j) continue;
          disjoint += kij * laplace_kernel(x[ii], y[jj], sigma);
          c_d += 1.0;
        }
      }
    }
  }
  return {within(x), within(y), sq / c_sq - share_x / c_x - share_y / c_y + disjoint / c_d};
}

SuiteResult enumeration_suite(const SelftestOptions& opt, std::size_t per_size) {
  Suite suite("second-order moment enumeration", 1e-10);
  for (std::size_t n = 4; n <= 6; ++n) {
    for (std::size_t m = 4; m <= 6; ++m) {
      for (std::size_t t = 0; t < per_size; ++t) {
        const std::uint64_t inst = 1000 * n + 100 * m + t;
        const double sigma = std::pow(10.0, static_cast<double>(t % 3) - 1.0);
        const std::vector<double> xv = mixture_draw(opt.seed, inst, 6, n);
        const std::vector<double> yv = mixture_draw(opt.seed, inst, 7, m);
        const SecondOrderMoments want = enumerate_moments(xv, yv, sigma);
        const SecondOrderMoments got = second_order_moments(
            matrix_stats(Sample::univariate(xv), Sample::univariate(yv),
                         KernelSpec::laplacian(sigma)),
            n, m);
        suite.check(got.g2a, want.g2a, 1e-3);
        suite.check(got.g2b, want.g2b, 1e-3);
        suite.check(got.g2c, want.g2c, 1e-3);
      }
    }
  }
  return suite.result();
}

}  // namespace

std::vector<SuiteResult> run_selftest(const SelftestOptions& options) {
  const std::size_t scale = options.quick ? 1 : 5;
  return {
      row_sum_suite(options, 40 * scale),
      cross_suite(options, 40 * scale),
      frobenius_suite(options, 40 * scale),
      equivalence_suite(options, 40 * scale),
      enumeration_suite(options, 2 * scale),
  };
}

}  // namespace mmdvar
