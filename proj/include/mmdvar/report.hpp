#pragma once

#include <cstddef>
#include <string_view>

#include "mmdvar/kernel.hpp"

namespace mmdvar {

enum class EstimatorPath { Matrix, FastLaplace };

std::string_view path_name(EstimatorPath path) noexcept;

/// Unbiased MMD^2 with its variance split into first-order (t1) and
/// second-order (t2) parts. var_total is always var_t1 + var_t2 as computed;
/// var_t2 and var_total can be slightly negative on tiny samples.
struct MmdReport {
  double mmd2 = 0.0;
  double var_t1 = 0.0;
  double var_t2 = 0.0;
  double var_total = 0.0;
  std::size_t n = 0;
  std::size_t m = 0;
  KernelSpec spec = KernelSpec::laplacian(1.0);
  EstimatorPath path = EstimatorPath::Matrix;
};

/// Copy with var_t2 floored at zero and var_total recomputed, for consumers
/// that need a usable standard error. Breaks unbiasedness.
MmdReport clamp_variance(MmdReport report);

}  // namespace mmdvar
