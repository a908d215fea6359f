#include "mmdvar/fast_laplace.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <span>
#include <string>

#include "mmdvar/compensated_sum.hpp"
#include "mmdvar/error.hpp"
#include "mmdvar/exact.hpp"

namespace mmdvar {

namespace {

double checked_inverse_bandwidth(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw Error(ErrorKind::InvalidInput,
                "kernel bandwidth must be positive and finite, got " + std::to_string(sigma));
  }
  return 1.0 / sigma;
}

void require_univariate(const Sample& s) {
  if (s.dim() != 1) {
    throw Error(ErrorKind::InvalidInput, "the Laplacian fast path is univariate only, got d=" +
                                             std::to_string(s.dim()));
  }
}

void require_sorted(const Sample& s) {
  require_univariate(s);
  if (!s.is_sorted()) {
    throw Error(ErrorKind::Unsorted, "accumulator recursions require a sorted sample");
  }
}

// Holds either a view of an already-certified sample or a sorted copy.
class SortedView {
 public:
  explicit SortedView(const Sample& s) {
    require_univariate(s);
    if (s.is_sorted()) {
      view_ = s.values();
    } else {
      owned_.assign(s.values().begin(), s.values().end());
      std::sort(owned_.begin(), owned_.end());
      view_ = owned_;
    }
  }
  std::span<const double> values() const noexcept { return view_; }
  std::size_t size() const noexcept { return view_.size(); }

 private:
  std::vector<double> owned_;
  std::span<const double> view_;
};

// R_1 = 0, R_i = (R_{i-1} + 1) exp(-(s_i - s_{i-1}) / sigma).
template <typename Visit>
void sweep_prefix(std::span<const double> s, double inv_sigma, Visit&& visit) {
  double r = 0.0;
  visit(std::size_t{0}, r);
  for (std::size_t i = 1; i < s.size(); ++i) {
    r = (r + 1.0) * std::exp(-(s[i] - s[i - 1]) * inv_sigma);
    visit(i, r);
  }
}

// L_l = 0, L_i = (L_{i+1} + 1) exp(-(s_{i+1} - s_i) / sigma).
template <typename Visit>
void sweep_suffix(std::span<const double> s, double inv_sigma, Visit&& visit) {
  if (s.empty()) return;
  double l = 0.0;
  visit(s.size() - 1, l);
  for (std::size_t i = s.size() - 1; i-- > 0;) {
    l = (l + 1.0) * std::exp(-(s[i + 1] - s[i]) * inv_sigma);
    visit(i, l);
  }
}

// Forward pass over the merge of x and y (x first on ties). The running
// accumulator for each direction is decayed to the current position, read at
// points of the other origin, and bumped by one at points of its own origin.
// visit(origin, index within its sample, merged position, gap, accumulator).
template <typename Visit>
void sweep_cross_prefix(std::span<const double> x, std::span<const double> y,
                        double inv_sigma, Visit&& visit) {
  double from_y = 0.0;  // A_{x->y}
  double from_x = 0.0;  // A_{y->x}
  std::size_t i = 0, j = 0;
  double prev = 0.0;
  for (std::size_t k = 0; k < x.size() + y.size(); ++k) {
    const bool take_x = j == y.size() || (i < x.size() && x[i] <= y[j]);
    const double z = take_x ? x[i] : y[j];
    const double gap = k == 0 ? 0.0 : z - prev;
    if (k > 0) {
      const double decay = std::exp(-gap * inv_sigma);
      from_y *= decay;
      from_x *= decay;
    }
    if (take_x) {
      visit(Origin::X, i, k, gap, from_y);
      from_x += 1.0;
      ++i;
    } else {
      visit(Origin::Y, j, k, gap, from_x);
      from_y += 1.0;
      ++j;
    }
    prev = z;
  }
}

// Mirror of sweep_cross_prefix walking the merge from the end.
template <typename Visit>
void sweep_cross_suffix(std::span<const double> x, std::span<const double> y,
                        double inv_sigma, Visit&& visit) {
  double from_y = 0.0;  // Z_{x->y}
  double from_x = 0.0;  // Z_{y->x}
  std::size_t i = x.size(), j = y.size();
  double next = 0.0;
  for (std::size_t k = x.size() + y.size(); k-- > 0;) {
    const bool take_y = i == 0 || (j > 0 && y[j - 1] >= x[i - 1]);
    const double z = take_y ? y[j - 1] : x[i - 1];
    if (k + 1 < x.size() + y.size()) {
      const double decay = std::exp(-(next - z) * inv_sigma);
      from_y *= decay;
      from_x *= decay;
    }
    if (take_y) {
      --j;
      visit(Origin::Y, j, k, from_x);
      from_y += 1.0;
    } else {
      --i;
      visit(Origin::X, i, k, from_y);
      from_x += 1.0;
    }
    next = z;
  }
}

// Per-point off-diagonal row sums, written into `out`.
void within_row_sums(std::span<const double> s, double inv_sigma, std::span<double> out) {
  sweep_prefix(s, inv_sigma, [&](std::size_t i, double r) { out[i] = r; });
  sweep_suffix(s, inv_sigma, [&](std::size_t i, double l) { out[i] += l; });
}

double within_total(std::span<const double> s, double inv_sigma) {
  CompensatedSum total;
  sweep_prefix(s, inv_sigma, [&](std::size_t, double r) { total += r; });
  sweep_suffix(s, inv_sigma, [&](std::size_t, double l) { total += l; });
  return total.value();
}

void cross_row_sums(std::span<const double> x, std::span<const double> y, double inv_sigma,
                    std::span<double> x_out, std::span<double> y_out) {
  sweep_cross_prefix(x, y, inv_sigma,
                     [&](Origin o, std::size_t idx, std::size_t, double, double acc) {
                       (o == Origin::X ? x_out : y_out)[idx] = acc;
                     });
  sweep_cross_suffix(x, y, inv_sigma, [&](Origin o, std::size_t idx, std::size_t, double acc) {
    (o == Origin::X ? x_out : y_out)[idx] += acc;
  });
}

// sum_{i,j} k(x_i, y_j) accumulated over the X points only.
double cross_total(std::span<const double> x, std::span<const double> y, double inv_sigma) {
  CompensatedSum total;
  sweep_cross_prefix(x, y, inv_sigma,
                     [&](Origin o, std::size_t, std::size_t, double, double acc) {
                       if (o == Origin::X) total += acc;
                     });
  sweep_cross_suffix(x, y, inv_sigma, [&](Origin o, std::size_t, std::size_t, double acc) {
    if (o == Origin::X) total += acc;
  });
  return total.value();
}

double triangular_sum(std::span<const double> s, double inv_sigma) {
  CompensatedSum total;
  sweep_prefix(s, inv_sigma, [&](std::size_t, double r) { total += r; });
  return total.value();
}

}  // namespace

std::vector<double> AccumulatorSet::row_sums() const {
  std::vector<double> out(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) out[i] = r[i] + l[i];
  return out;
}

std::vector<double> CrossAccumulatorSet::x_row_sums() const {
  std::vector<double> out(a_xy.size());
  for (std::size_t i = 0; i < a_xy.size(); ++i) out[i] = a_xy[i] + z_xy[i];
  return out;
}

std::vector<double> CrossAccumulatorSet::y_row_sums() const {
  std::vector<double> out(a_yx.size());
  for (std::size_t j = 0; j < a_yx.size(); ++j) out[j] = a_yx[j] + z_yx[j];
  return out;
}

double trissl(const Sample& s, double sigma) {
  const double inv = checked_inverse_bandwidth(sigma);
  require_sorted(s);
  return triangular_sum(s.values(), inv);
}

AccumulatorSet prefix_suffix(const Sample& s, double sigma) {
  const double inv = checked_inverse_bandwidth(sigma);
  require_sorted(s);
  AccumulatorSet acc;
  acc.sigma_used = sigma;
  acc.r.resize(s.size());
  acc.l.resize(s.size());
  sweep_prefix(s.values(), inv, [&](std::size_t i, double r) { acc.r[i] = r; });
  sweep_suffix(s.values(), inv, [&](std::size_t i, double l) { acc.l[i] = l; });
  return acc;
}

CrossAccumulatorSet cross_prefix_suffix(const Sample& x, const Sample& y, double sigma) {
  const double inv = checked_inverse_bandwidth(sigma);
  require_sorted(x);
  require_sorted(y);
  CrossAccumulatorSet acc;
  acc.sigma_used = sigma;
  acc.a_xy.resize(x.size());
  acc.z_xy.resize(x.size());
  acc.a_yx.resize(y.size());
  acc.z_yx.resize(y.size());
  acc.labels.resize(x.size() + y.size());
  acc.deltas.resize(x.size() + y.size());
  sweep_cross_prefix(x.values(), y.values(), inv,
                     [&](Origin o, std::size_t idx, std::size_t k, double gap, double a) {
                       acc.labels[k] = o;
                       acc.deltas[k] = gap;
                       (o == Origin::X ? acc.a_xy : acc.a_yx)[idx] = a;
                     });
  sweep_cross_suffix(x.values(), y.values(), inv,
                     [&](Origin o, std::size_t idx, std::size_t, double z) {
                       (o == Origin::X ? acc.z_xy : acc.z_yx)[idx] = z;
                     });
  return acc;
}

double mmd2_fast(const Sample& x, const Sample& y, double sigma) {
  const double inv = checked_inverse_bandwidth(sigma);
  const SortedView xs(x);
  const SortedView ys(y);
  const std::size_t n = xs.size();
  const std::size_t m = ys.size();
  if (n < 2 || m < 2) {
    throw Error(ErrorKind::InsufficientSample, "need n, m >= 2, got n=" + std::to_string(n) +
                                                   ", m=" + std::to_string(m));
  }
  const double sum_x = within_total(xs.values(), inv);
  const double sum_y = within_total(ys.values(), inv);
  const double sum_xy = cross_total(xs.values(), ys.values(), inv);
  return sum_x / falling_factorial(n, 2) + sum_y / falling_factorial(m, 2) -
         2.0 * sum_xy / (static_cast<double>(n) * static_cast<double>(m));
}

double mmd2_fast_triangular(const Sample& x, const Sample& y, double sigma) {
  const double inv = checked_inverse_bandwidth(sigma);
  const SortedView xs(x);
  const SortedView ys(y);
  const std::size_t n = xs.size();
  const std::size_t m = ys.size();
  if (n < 2 || m < 2) {
    throw Error(ErrorKind::InsufficientSample, "need n, m >= 2, got n=" + std::to_string(n) +
                                                   ", m=" + std::to_string(m));
  }
  std::vector<double> merged(n + m);
  std::merge(xs.values().begin(), xs.values().end(), ys.values().begin(), ys.values().end(),
             merged.begin());
  const double t1 = triangular_sum(xs.values(), inv);
  const double t2 = triangular_sum(ys.values(), inv);
  const double t4 = triangular_sum(merged, inv);
  const double t3 = t4 - t1 - t2;
  const double dn = static_cast<double>(n);
  const double dm = static_cast<double>(m);
  return 2.0 * (t1 / (dn * (dn - 1.0)) + t2 / (dm * (dm - 1.0)) - t3 / (dn * dm));
}

MmdReport variance_fast(const Sample& x, const Sample& y, double sigma) {
  const double inv = checked_inverse_bandwidth(sigma);
  const SortedView xs(x);
  const SortedView ys(y);
  const std::size_t n = xs.size();
  const std::size_t m = ys.size();
  if (n < 4 || m < 4) {
    throw Error(ErrorKind::InsufficientSampleForVariance,
                "need n, m >= 4, got n=" + std::to_string(n) + ", m=" + std::to_string(m));
  }
  const double dn = static_cast<double>(n);
  const double dm = static_cast<double>(m);

  // Row sums at sigma.
  std::vector<double> s_x(n), s_y(m), s_xy(n), s_yx(m);
  within_row_sums(xs.values(), inv, s_x);
  within_row_sums(ys.values(), inv, s_y);
  cross_row_sums(xs.values(), ys.values(), inv, s_xy, s_yx);

  // Squared-kernel totals: k(.;sigma)^2 is the Laplacian kernel at sigma/2.
  const double inv_sq = 1.0 / power_bandwidth(KernelSpec::laplacian(sigma), 2).sigma();

  KernelMatrixStats stats;
  stats.xx.frob_sq = within_total(xs.values(), inv_sq);
  stats.xx.rowsum_sq = compensated_sum_of_squares(s_x);
  stats.xx.grand_sum = compensated_total(s_x);
  stats.yy.frob_sq = within_total(ys.values(), inv_sq);
  stats.yy.rowsum_sq = compensated_sum_of_squares(s_y);
  stats.yy.grand_sum = compensated_total(s_y);
  stats.xy.frob_sq = cross_total(xs.values(), ys.values(), inv_sq);
  stats.xy.rowsum_sq = compensated_sum_of_squares(s_xy);
  stats.xy.colsum_sq = compensated_sum_of_squares(s_yx);
  stats.xy.grand_sum = compensated_total(s_xy);

  MmdReport report;
  report.mmd2 = stats.xx.grand_sum / falling_factorial(n, 2) +
                stats.yy.grand_sum / falling_factorial(m, 2) -
                2.0 * stats.xy.grand_sum / (dn * dm);

  // Projections overwrite the within-sample row sums in place.
  ProjectionVectors proj;
  proj.u_hat = std::move(s_x);
  proj.v_hat = std::move(s_y);
  for (std::size_t i = 0; i < n; ++i) proj.u_hat[i] = proj.u_hat[i] / (dn - 1.0) - s_xy[i] / dm;
  for (std::size_t j = 0; j < m; ++j) proj.v_hat[j] = proj.v_hat[j] / (dm - 1.0) - s_yx[j] / dn;
  proj.u_mean = compensated_total(proj.u_hat) / dn;
  proj.v_mean = compensated_total(proj.v_hat) / dm;

  report.var_t1 = var_t1(proj, n, m);
  report.var_t2 = var_t2(second_order_moments(stats, n, m), n, m);
  report.var_total = report.var_t1 + report.var_t2;
  report.n = n;
  report.m = m;
  report.spec = KernelSpec::laplacian(sigma);
  report.path = EstimatorPath::FastLaplace;
  return report;
}

namespace {

void write_row(std::ostream& out, std::size_t index, char label, double delta, double prefix,
               double suffix) {
  char line[160];
  std::snprintf(line, sizeof line, "%zu %c %.17g %.17g %.17g %.17g\n", index, label, delta,
                prefix, suffix, prefix + suffix);
  out << line;
}

}  // namespace

void write_accumulators(std::ostream& out, const AccumulatorSet& acc, const Sample& s) {
  require_sorted(s);
  if (s.size() != acc.length()) {
    throw Error(ErrorKind::InvalidInput, "accumulator length does not match the sample");
  }
  out << "index label delta prefix suffix value\n";
  const auto v = s.values();
  for (std::size_t i = 0; i < acc.length(); ++i) {
    write_row(out, i + 1, 'X', i == 0 ? 0.0 : v[i] - v[i - 1], acc.r[i], acc.l[i]);
  }
}

void write_accumulators(std::ostream& out, const CrossAccumulatorSet& acc) {
  out << "index label delta prefix suffix value\n";
  std::size_t i = 0, j = 0;
  for (std::size_t k = 0; k < acc.labels.size(); ++k) {
    if (acc.labels[k] == Origin::X) {
      write_row(out, k + 1, 'X', acc.deltas[k], acc.a_xy[i], acc.z_xy[i]);
      ++i;
    } else {
      write_row(out, k + 1, 'Y', acc.deltas[k], acc.a_yx[j], acc.z_yx[j]);
      ++j;
    }
  }
}

}  // namespace mmdvar
