#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "mmdvar/kernel.hpp"
#include "mmdvar/report.hpp"

namespace mmdvar {

/// Prefix (r) and suffix (l) Laplacian row sums over one sorted sample:
/// r[i] = sum_{i' < i} k(s_i, s_i'), l[i] = sum_{i' > i} k(s_i, s_i').
struct AccumulatorSet {
  std::vector<double> r;
  std::vector<double> l;
  double sigma_used = 0.0;

  std::size_t length() const noexcept { return r.size(); }
  /// Off-diagonal kernel row sums r[i] + l[i].
  std::vector<double> row_sums() const;
};

enum class Origin : unsigned char { X, Y };

/// Cross-sample accumulators over the merged sorted sequence.
///
/// a_xy / z_xy hold, for each X point in sorted order, the kernel mass of
/// the Y points strictly before / after it in the merge; a_yx / z_yx are
/// the mirror image for Y points. Equal values merge X before Y.
struct CrossAccumulatorSet {
  std::vector<double> a_xy;
  std::vector<double> z_xy;
  std::vector<double> a_yx;
  std::vector<double> z_yx;
  std::vector<Origin> labels;  // merged order
  std::vector<double> deltas;  // z_k - z_{k-1}; deltas[0] = 0
  double sigma_used = 0.0;

  /// sum_j k(x_i, y_j) per sorted X point.
  std::vector<double> x_row_sums() const;
  /// sum_i k(x_i, y_j) per sorted Y point.
  std::vector<double> y_row_sums() const;
};

/// Lower-triangular sum sum_{i' < i} k(s_i, s_i') of a sorted sample in O(l).
/// Requires the sortedness certificate.
double trissl(const Sample& s, double sigma);

AccumulatorSet prefix_suffix(const Sample& s, double sigma);

CrossAccumulatorSet cross_prefix_suffix(const Sample& x, const Sample& y, double sigma);

/// Unbiased MMD^2 from per-row accumulator sums. Unsorted univariate input
/// is sorted first.
double mmd2_fast(const Sample& x, const Sample& y, double sigma);

/// Same statistic through the triangular sums T1, T2 and the merged-sample
/// T4, with the cross sum recovered as T4 - T1 - T2.
double mmd2_fast_triangular(const Sample& x, const Sample& y, double sigma);

/// MMD^2 and its full variance for the univariate Laplacian kernel in
/// O(n log n + m log m) time and O(n + m) memory. Same contract as
/// variance_full with a Laplacian spec.
MmdReport variance_fast(const Sample& x, const Sample& y, double sigma);

/// Columnar text dumps (index label delta prefix suffix value) for trace
/// comparison between implementations.
void write_accumulators(std::ostream& out, const AccumulatorSet& acc, const Sample& s);
void write_accumulators(std::ostream& out, const CrossAccumulatorSet& acc);

}  // namespace mmdvar
