#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace mmdvar {

enum class KernelFamily { Laplacian, Gaussian };

std::string_view family_name(KernelFamily family) noexcept;

/// Kernel family plus bandwidth. Construction rejects sigma <= 0 or
/// non-finite sigma, so a live KernelSpec is always usable.
class KernelSpec {
 public:
  KernelSpec(KernelFamily family, double sigma);

  static KernelSpec laplacian(double sigma) { return {KernelFamily::Laplacian, sigma}; }
  static KernelSpec gaussian(double sigma) { return {KernelFamily::Gaussian, sigma}; }

  KernelFamily family() const noexcept { return family_; }
  double sigma() const noexcept { return sigma_; }

  friend bool operator==(const KernelSpec&, const KernelSpec&) = default;

 private:
  KernelFamily family_;
  double sigma_;
};

/// A batch of n observations of dimension d, stored row-major.
///
/// All values are finite. The sortedness certificate can only be held by
/// univariate samples and is checked when granted.
class Sample {
 public:
  Sample(std::vector<double> data, std::size_t dim);

  static Sample univariate(std::vector<double> values);
  /// Throws Unsorted if the values are not non-decreasing.
  static Sample sorted_univariate(std::vector<double> values);

  std::size_t size() const noexcept { return data_.size() / dim_; }
  std::size_t dim() const noexcept { return dim_; }
  bool is_sorted() const noexcept { return sorted_; }

  std::span<const double> row(std::size_t i) const noexcept {
    return {data_.data() + i * dim_, dim_};
  }
  std::span<const double> values() const noexcept { return data_; }

  /// Sorted copy with the certificate set. Univariate only.
  Sample sorted() const;

 private:
  std::vector<double> data_;
  std::size_t dim_;
  bool sorted_ = false;
};

/// exp(-||x-y||_1 / sigma) for Laplacian, exp(-||x-y||_2^2 / (2 sigma^2)) for
/// Gaussian. Validates dimensions and finiteness.
double kernel_eval(const KernelSpec& spec, std::span<const double> x,
                   std::span<const double> y);

/// Median of the pairwise distances over the pooled sample, off-diagonal
/// pairs only. Falls back to the smallest positive distance when the median
/// is zero; throws BandwidthUndefined when every point coincides.
double median_heuristic(const Sample& x, const Sample& y);

/// Laplacian bandwidth whose kernel equals the p-th power of `spec`'s kernel.
KernelSpec power_bandwidth(const KernelSpec& spec, int p);

namespace detail {

/// Unchecked hot-loop evaluation; `scale` is 1/sigma (Laplacian) or
/// 1/(2 sigma^2) (Gaussian).
inline double kernel_value(KernelFamily family, double scale, const double* x,
                           const double* y, std::size_t dim) noexcept {
  double dist = 0.0;
  if (family == KernelFamily::Laplacian) {
    for (std::size_t c = 0; c < dim; ++c) dist += std::abs(x[c] - y[c]);
  } else {
    for (std::size_t c = 0; c < dim; ++c) {
      const double diff = x[c] - y[c];
      dist += diff * diff;
    }
  }
  return std::exp(-dist * scale);
}

inline double kernel_scale(const KernelSpec& spec) noexcept {
  return spec.family() == KernelFamily::Laplacian
             ? 1.0 / spec.sigma()
             : 1.0 / (2.0 * spec.sigma() * spec.sigma());
}

}  // namespace detail

}  // namespace mmdvar
