#pragma once

#include <cmath>
#include <span>

namespace mmdvar {

/// Neumaier's variant of Kahan summation. Unlike plain Kahan it stays
/// accurate when an addend is larger in magnitude than the running sum.
class CompensatedSum {
 public:
  constexpr CompensatedSum() = default;
  constexpr explicit CompensatedSum(double initial) : sum_(initial) {}

  constexpr CompensatedSum& operator+=(double value) noexcept {
    const double t = sum_ + value;
    if (std::abs(sum_) >= std::abs(value)) {
      compensation_ += (sum_ - t) + value;
    } else {
      compensation_ += (value - t) + sum_;
    }
    sum_ = t;
    return *this;
  }

  constexpr CompensatedSum& operator-=(double value) noexcept {
    return *this += -value;
  }

  constexpr double value() const noexcept { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

inline double compensated_total(std::span<const double> values) noexcept {
  CompensatedSum acc;
  for (const double v : values) acc += v;
  return acc.value();
}

inline double compensated_sum_of_squares(std::span<const double> values) noexcept {
  CompensatedSum acc;
  for (const double v : values) acc += v * v;
  return acc.value();
}

}  // namespace mmdvar
