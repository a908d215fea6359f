#pragma once

#include <cstddef>
#include <vector>

#include "mmdvar/kernel.hpp"
#include "mmdvar/report.hpp"

namespace mmdvar {

/// Empirical first-order projections: per-point within-sample kernel mean
/// minus cross-sample kernel mean.
struct ProjectionVectors {
  std::vector<double> u_hat;
  std::vector<double> v_hat;
  double u_mean = 0.0;
  double v_mean = 0.0;
};

/// Scalar functionals of one kernel block. Within-sample blocks have their
/// diagonal zeroed; colsum_sq is only meaningful for the cross block.
struct BlockStats {
  double frob_sq = 0.0;    // sum of squared entries
  double rowsum_sq = 0.0;  // ||K 1||^2
  double colsum_sq = 0.0;  // ||K^T 1||^2
  double grand_sum = 0.0;  // 1^T K 1
};

struct KernelMatrixStats {
  BlockStats xx;
  BlockStats yy;
  BlockStats xy;
};

/// Unbiased estimates of E[g2^2] for the within-X, within-Y and cross
/// second-order Hoeffding components.
struct SecondOrderMoments {
  double g2a = 0.0;
  double g2b = 0.0;
  double g2c = 0.0;
};

struct MatrixOptions {
  /// Edge of the square tile evaluated at a time.
  std::size_t tile = 1024;
  /// Build the three kernel matrices in full before reducing them (the
  /// textbook quadratic-memory algorithm). Results are bit-identical to the
  /// tiled mode.
  bool materialize = false;
};

double mmd2_unbiased(const Sample& x, const Sample& y, const KernelSpec& spec);

ProjectionVectors empirical_projections(const Sample& x, const Sample& y, const KernelSpec& spec);

/// First-order variance 4(n-2)/(n(n-1)^2) sum (U_i - U)^2 + the Y analogue.
double var_t1(const ProjectionVectors& proj, std::size_t n, std::size_t m);

KernelMatrixStats matrix_stats(const Sample& x, const Sample& y, const KernelSpec& spec,
                               const MatrixOptions& options = {});

/// Requires n, m >= 4.
SecondOrderMoments second_order_moments(const KernelMatrixStats& stats, std::size_t n,
                                        std::size_t m);

double var_t2(const SecondOrderMoments& moments, std::size_t n, std::size_t m);

/// MMD^2 and its full unbiased variance via the quadratic matrix path.
/// Works for any kernel and dimension; requires n, m >= 4.
MmdReport variance_full(const Sample& x, const Sample& y, const KernelSpec& spec,
                        const MatrixOptions& options = {});

/// (n)_k = n (n-1) ... (n-k+1), in floating point.
constexpr double falling_factorial(std::size_t n, std::size_t k) noexcept {
  double out = 1.0;
  for (std::size_t i = 0; i < k; ++i) out *= static_cast<double>(n - i);
  return out;
}

}  // namespace mmdvar
