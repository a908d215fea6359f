#include "mmdvar/exact.hpp"

#include <algorithm>
#include <string>

#include "mmdvar/compensated_sum.hpp"
#include "mmdvar/error.hpp"

namespace mmdvar {

namespace {

void require_pair(const Sample& x, const Sample& y, std::size_t min_size, ErrorKind kind) {
  if (x.dim() != y.dim()) {
    throw Error(ErrorKind::InvalidInput, "samples have different dimensions (" +
                                             std::to_string(x.dim()) + " vs " +
                                             std::to_string(y.dim()) + ")");
  }
  if (x.size() < min_size || y.size() < min_size) {
    throw Error(kind, "need n, m >= " + std::to_string(min_size) + ", got n=" +
                          std::to_string(x.size()) + ", m=" + std::to_string(y.size()));
  }
}

void require_sizes(std::size_t n, std::size_t m, std::size_t min_size, ErrorKind kind) {
  if (n < min_size || m < min_size) {
    throw Error(kind, "need n, m >= " + std::to_string(min_size) + ", got n=" +
                          std::to_string(n) + ", m=" + std::to_string(m));
  }
}

// Per-row (and for the cross block per-column) reductions of one kernel
// block. Every accumulator receives its addends in row-major order whatever
// the tiling, so tiled and materialised runs agree bit for bit.
struct BlockReduction {
  std::vector<double> row_sum;
  std::vector<double> row_sq;
  std::vector<double> col_sum;
};

class BlockReducer {
 public:
  BlockReducer(const Sample& a, const Sample& b, const KernelSpec& spec, bool within)
      : a_(a), b_(b), family_(spec.family()), scale_(detail::kernel_scale(spec)),
        within_(within), row_sum_(a.size()), row_sq_(a.size()),
        col_sum_(within ? 0 : b.size()) {}

  // Evaluates the whole block up front; reduce() then folds it.
  void materialize() {
    full_.resize(a_.size() * b_.size());
    fill(0, a_.size(), 0, b_.size(), full_);
  }

  BlockReduction reduce(const MatrixOptions& options) {
    if (!full_.empty()) {
      fold(0, a_.size(), 0, b_.size(), full_);
      std::vector<double>().swap(full_);
    } else {
      const std::size_t edge = std::max<std::size_t>(options.tile, 1);
      std::vector<double> tile(edge * edge);
      for (std::size_t r0 = 0; r0 < a_.size(); r0 += edge) {
        const std::size_t r1 = std::min(r0 + edge, a_.size());
        for (std::size_t c0 = 0; c0 < b_.size(); c0 += edge) {
          const std::size_t c1 = std::min(c0 + edge, b_.size());
          fill(r0, r1, c0, c1, tile);
          fold(r0, r1, c0, c1, tile);
        }
      }
    }
    BlockReduction out;
    out.row_sum.resize(row_sum_.size());
    out.row_sq.resize(row_sq_.size());
    out.col_sum.resize(col_sum_.size());
    std::transform(row_sum_.begin(), row_sum_.end(), out.row_sum.begin(),
                   [](const CompensatedSum& s) { return s.value(); });
    std::transform(row_sq_.begin(), row_sq_.end(), out.row_sq.begin(),
                   [](const CompensatedSum& s) { return s.value(); });
    std::transform(col_sum_.begin(), col_sum_.end(), out.col_sum.begin(),
                   [](const CompensatedSum& s) { return s.value(); });
    return out;
  }

 private:
  void fill(std::size_t r0, std::size_t r1, std::size_t c0, std::size_t c1,
            std::vector<double>& buf) const {
    const std::size_t width = c1 - c0;
    const std::size_t dim = a_.dim();
    for (std::size_t i = r0; i < r1; ++i) {
      const double* xi = a_.row(i).data();
      double* out = buf.data() + (i - r0) * width;
      for (std::size_t j = c0; j < c1; ++j) {
        out[j - c0] = (within_ && i == j)
                          ? 0.0
                          : detail::kernel_value(family_, scale_, xi, b_.row(j).data(), dim);
      }
    }
  }

  void fold(std::size_t r0, std::size_t r1, std::size_t c0, std::size_t c1,
            const std::vector<double>& buf) {
    const std::size_t width = c1 - c0;
    for (std::size_t i = r0; i < r1; ++i) {
      const double* vals = buf.data() + (i - r0) * width;
      CompensatedSum& rs = row_sum_[i];
      CompensatedSum& rq = row_sq_[i];
      for (std::size_t j = 0; j < width; ++j) {
        const double v = vals[j];
        rs += v;
        rq += v * v;
        if (!within_) col_sum_[c0 + j] += v;
      }
    }
  }

  const Sample& a_;
  const Sample& b_;
  KernelFamily family_;
  double scale_;
  bool within_;
  std::vector<CompensatedSum> row_sum_;
  std::vector<CompensatedSum> row_sq_;
  std::vector<CompensatedSum> col_sum_;
  std::vector<double> full_;
};

struct Reductions {
  BlockReduction xx;
  BlockReduction yy;
  BlockReduction xy;
};

Reductions reduce_all(const Sample& x, const Sample& y, const KernelSpec& spec,
                      const MatrixOptions& options) {
  BlockReducer xx(x, x, spec, true);
  BlockReducer yy(y, y, spec, true);
  BlockReducer xy(x, y, spec, false);
  if (options.materialize) {
    xx.materialize();
    yy.materialize();
    xy.materialize();
  }
  Reductions r;
  r.xx = xx.reduce(options);
  r.yy = yy.reduce(options);
  r.xy = xy.reduce(options);
  return r;
}

BlockStats block_stats(const BlockReduction& red) {
  BlockStats s;
  s.frob_sq = compensated_total(red.row_sq);
  s.rowsum_sq = compensated_sum_of_squares(red.row_sum);
  s.grand_sum = compensated_total(red.row_sum);
  s.colsum_sq = compensated_sum_of_squares(red.col_sum);
  return s;
}

KernelMatrixStats stats_from(const Reductions& r) {
  return {block_stats(r.xx), block_stats(r.yy), block_stats(r.xy)};
}

double mmd2_from(const KernelMatrixStats& s, std::size_t n, std::size_t m) {
  const double a = s.xx.grand_sum / falling_factorial(n, 2);
  const double b = s.yy.grand_sum / falling_factorial(m, 2);
  const double c = s.xy.grand_sum / (static_cast<double>(n) * static_cast<double>(m));
  return a + b - 2.0 * c;
}

ProjectionVectors projections_from(const Reductions& r, std::size_t n, std::size_t m) {
  ProjectionVectors p;
  p.u_hat.resize(n);
  p.v_hat.resize(m);
  const double dn = static_cast<double>(n);
  const double dm = static_cast<double>(m);
  for (std::size_t i = 0; i < n; ++i) {
    p.u_hat[i] = r.xx.row_sum[i] / (dn - 1.0) - r.xy.row_sum[i] / dm;
  }
  for (std::size_t j = 0; j < m; ++j) {
    p.v_hat[j] = r.yy.row_sum[j] / (dm - 1.0) - r.xy.col_sum[j] / dn;
  }
  p.u_mean = compensated_total(p.u_hat) / dn;
  p.v_mean = compensated_total(p.v_hat) / dm;
  return p;
}

double centered_sum_of_squares(const std::vector<double>& values, double mean) {
  CompensatedSum acc;
  for (const double v : values) {
    const double d = v - mean;
    acc += d * d;
  }
  return acc.value();
}

// Unbiased E[g2^2] for a within-sample block with zero diagonal.
double within_moment(const BlockStats& s, std::size_t n) {
  const double f = s.frob_sq;
  const double r = s.rowsum_sq;
  const double g = s.grand_sum;
  return f / falling_factorial(n, 2) - 2.0 * (r - f) / falling_factorial(n, 3) +
         (g * g - 4.0 * r + 2.0 * f) / falling_factorial(n, 4);
}

// Unbiased E[g2^2] for the cross block. ||K 1_m||^2 - ||K||_F^2 sums the
// n (m)_2 products k(x_i, y_j) k(x_i, y_j'), j != j', and the column-sum term
// the m (n)_2 products sharing a y.
double cross_moment(const BlockStats& s, std::size_t n, std::size_t m) {
  const double dn = static_cast<double>(n);
  const double dm = static_cast<double>(m);
  const double f = s.frob_sq;
  const double rows = s.rowsum_sq;
  const double cols = s.colsum_sq;
  const double g = s.grand_sum;
  return f / (dn * dm) - (rows - f) / (dn * falling_factorial(m, 2)) -
         (cols - f) / (dm * falling_factorial(n, 2)) +
         (g * g - rows - cols + f) / (falling_factorial(n, 2) * falling_factorial(m, 2));
}

}  // namespace

double mmd2_unbiased(const Sample& x, const Sample& y, const KernelSpec& spec) {
  require_pair(x, y, 2, ErrorKind::InsufficientSample);
  return mmd2_from(stats_from(reduce_all(x, y, spec, {})), x.size(), y.size());
}

ProjectionVectors empirical_projections(const Sample& x, const Sample& y, const KernelSpec& spec) {
  require_pair(x, y, 2, ErrorKind::InsufficientSample);
  return projections_from(reduce_all(x, y, spec, {}), x.size(), y.size());
}

double var_t1(const ProjectionVectors& proj, std::size_t n, std::size_t m) {
  require_sizes(n, m, 2, ErrorKind::InsufficientSample);
  if (proj.u_hat.size() != n || proj.v_hat.size() != m) {
    throw Error(ErrorKind::InvalidInput, "projection lengths do not match the sample sizes");
  }
  const double dn = static_cast<double>(n);
  const double dm = static_cast<double>(m);
  const double su = centered_sum_of_squares(proj.u_hat, proj.u_mean);
  const double sv = centered_sum_of_squares(proj.v_hat, proj.v_mean);
  return 4.0 * (dn - 2.0) / (dn * (dn - 1.0) * (dn - 1.0)) * su +
         4.0 * (dm - 2.0) / (dm * (dm - 1.0) * (dm - 1.0)) * sv;
}

KernelMatrixStats matrix_stats(const Sample& x, const Sample& y, const KernelSpec& spec,
                               const MatrixOptions& options) {
  require_pair(x, y, 2, ErrorKind::InsufficientSample);
  return stats_from(reduce_all(x, y, spec, options));
}

SecondOrderMoments second_order_moments(const KernelMatrixStats& stats, std::size_t n,
                                        std::size_t m) {
  require_sizes(n, m, 4, ErrorKind::InsufficientSampleForVariance);
  return {within_moment(stats.xx, n), within_moment(stats.yy, m), cross_moment(stats.xy, n, m)};
}

double var_t2(const SecondOrderMoments& moments, std::size_t n, std::size_t m) {
  require_sizes(n, m, 2, ErrorKind::InsufficientSample);
  const double dn = static_cast<double>(n);
  const double dm = static_cast<double>(m);
  return 2.0 / (dn * (dn - 1.0)) * moments.g2a + 2.0 / (dm * (dm - 1.0)) * moments.g2b +
         4.0 / (dn * dm) * moments.g2c;
}

MmdReport variance_full(const Sample& x, const Sample& y, const KernelSpec& spec,
                        const MatrixOptions& options) {
  require_pair(x, y, 4, ErrorKind::InsufficientSampleForVariance);
  const std::size_t n = x.size();
  const std::size_t m = y.size();
  const Reductions red = reduce_all(x, y, spec, options);
  const KernelMatrixStats stats = stats_from(red);

  MmdReport report;
  report.mmd2 = mmd2_from(stats, n, m);
  report.var_t1 = var_t1(projections_from(red, n, m), n, m);
  report.var_t2 = var_t2(second_order_moments(stats, n, m), n, m);
  report.var_total = report.var_t1 + report.var_t2;
  report.n = n;
  report.m = m;
  report.spec = spec;
  report.path = EstimatorPath::Matrix;
  return report;
}

}  // namespace mmdvar
