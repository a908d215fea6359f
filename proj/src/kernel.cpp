#include "mmdvar/kernel.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <string>

#include "mmdvar/error.hpp"

namespace mmdvar {

std::string_view error_kind_name(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidInput: return "invalid_input";
    case ErrorKind::BandwidthUndefined: return "bandwidth_undefined";
    case ErrorKind::UnsupportedFamily: return "unsupported_family";
    case ErrorKind::InsufficientSample: return "insufficient_sample";
    case ErrorKind::InsufficientSampleForVariance: return "insufficient_sample_for_variance";
    case ErrorKind::Unsorted: return "unsorted_input";
    case ErrorKind::Config: return "config";
    case ErrorKind::Ingest: return "ingest";
  }
  return "unknown";
}

std::string_view family_name(KernelFamily family) noexcept {
  return family == KernelFamily::Laplacian ? "laplacian" : "gaussian";
}

KernelSpec::KernelSpec(KernelFamily family, double sigma)
    : family_(family), sigma_(sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw Error(ErrorKind::InvalidInput,
                "kernel bandwidth must be positive and finite, got " + std::to_string(sigma));
  }
}

Sample::Sample(std::vector<double> data, std::size_t dim)
    : data_(std::move(data)), dim_(dim) {
  if (dim_ == 0) throw Error(ErrorKind::InvalidInput, "sample dimension must be at least 1");
  if (data_.empty()) throw Error(ErrorKind::InvalidInput, "sample must contain at least one observation");
  if (data_.size() % dim_ != 0) {
    throw Error(ErrorKind::InvalidInput, "sample data length is not a multiple of its dimension");
  }
  for (std::size_t k = 0; k < data_.size(); ++k) {
    if (!std::isfinite(data_[k])) {
      throw Error(ErrorKind::InvalidInput,
                  "non-finite value in sample at row " + std::to_string(k / dim_));
    }
  }
}

Sample Sample::univariate(std::vector<double> values) { return Sample(std::move(values), 1); }

Sample Sample::sorted_univariate(std::vector<double> values) {
  Sample s(std::move(values), 1);
  if (!std::is_sorted(s.data_.begin(), s.data_.end())) {
    throw Error(ErrorKind::Unsorted, "sample is not non-decreasing");
  }
  s.sorted_ = true;
  return s;
}

Sample Sample::sorted() const {
  if (dim_ != 1) throw Error(ErrorKind::InvalidInput, "only univariate samples can be sorted");
  if (sorted_) return *this;
  Sample copy = *this;
  std::sort(copy.data_.begin(), copy.data_.end());
  copy.sorted_ = true;
  return copy;
}

double kernel_eval(const KernelSpec& spec, std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.empty()) {
    throw Error(ErrorKind::InvalidInput, "kernel arguments must share a dimension of at least 1");
  }
  const auto finite = [](double v) { return std::isfinite(v); };
  if (!std::all_of(x.begin(), x.end(), finite) || !std::all_of(y.begin(), y.end(), finite)) {
    throw Error(ErrorKind::InvalidInput, "kernel arguments must be finite");
  }
  return detail::kernel_value(spec.family(), detail::kernel_scale(spec), x.data(), y.data(),
                              x.size());
}

KernelSpec power_bandwidth(const KernelSpec& spec, int p) {
  if (spec.family() != KernelFamily::Laplacian) {
    throw Error(ErrorKind::UnsupportedFamily, "bandwidth power identity holds only for the Laplacian kernel");
  }
  if (p < 1) throw Error(ErrorKind::InvalidInput, "kernel power must be a positive integer");
  return KernelSpec::laplacian(spec.sigma() / p);
}

namespace {

// Number of pairs i < j with z[j] - z[i] <= t over a sorted sequence.
std::uint64_t count_gaps_at_most(const std::vector<double>& z, double t) {
  std::uint64_t count = 0;
  std::size_t lo = 0;
  for (std::size_t j = 1; j < z.size(); ++j) {
    while (z[j] - z[lo] > t) ++lo;
    count += j - lo;
  }
  return count;
}

// k-th smallest (1-based) pairwise gap. Non-negative doubles order like their
// bit patterns, so bisecting over the integer representation lands exactly on
// a gap value after at most 64 counting passes.
double kth_smallest_gap(const std::vector<double>& z, std::uint64_t k) {
  std::uint64_t lo = 0;
  std::uint64_t hi = std::bit_cast<std::uint64_t>(z.back() - z.front());
  while (lo < hi) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    if (count_gaps_at_most(z, std::bit_cast<double>(mid)) >= k) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return std::bit_cast<double>(lo);
}

double univariate_median_gap(const Sample& x, const Sample& y) {
  std::vector<double> z;
  z.reserve(x.size() + y.size());
  z.insert(z.end(), x.values().begin(), x.values().end());
  z.insert(z.end(), y.values().begin(), y.values().end());
  std::sort(z.begin(), z.end());

  const std::uint64_t n = z.size();
  const std::uint64_t pairs = n * (n - 1) / 2;
  double median = 0.0;
  if (pairs % 2 == 1) {
    median = kth_smallest_gap(z, (pairs + 1) / 2);
  } else {
    median = 0.5 * (kth_smallest_gap(z, pairs / 2) + kth_smallest_gap(z, pairs / 2 + 1));
  }
  if (median > 0.0) return median;

  const std::uint64_t zeros = count_gaps_at_most(z, 0.0);
  if (zeros == pairs) {
    throw Error(ErrorKind::BandwidthUndefined, "all pooled points coincide; median heuristic is undefined");
  }
  return kth_smallest_gap(z, zeros + 1);
}

double multivariate_median_distance(const Sample& x, const Sample& y) {
  const std::size_t dim = x.dim();
  std::vector<const double*> rows;
  rows.reserve(x.size() + y.size());
  for (std::size_t i = 0; i < x.size(); ++i) rows.push_back(x.row(i).data());
  for (std::size_t j = 0; j < y.size(); ++j) rows.push_back(y.row(j).data());

  std::vector<double> dist;
  dist.reserve(rows.size() * (rows.size() - 1) / 2);
  for (std::size_t a = 1; a < rows.size(); ++a) {
    for (std::size_t b = 0; b < a; ++b) {
      double sq = 0.0;
      for (std::size_t c = 0; c < dim; ++c) {
        const double diff = rows[a][c] - rows[b][c];
        sq += diff * diff;
      }
      dist.push_back(std::sqrt(sq));
    }
  }

  const std::size_t half = dist.size() / 2;
  std::nth_element(dist.begin(), dist.begin() + half, dist.end());
  double median = dist[half];
  if (dist.size() % 2 == 0) {
    median = 0.5 * (median + *std::max_element(dist.begin(), dist.begin() + half));
  }
  if (median > 0.0) return median;

  double smallest = 0.0;
  for (const double d : dist) {
    if (d > 0.0 && (smallest == 0.0 || d < smallest)) smallest = d;
  }
  if (smallest == 0.0) {
    throw Error(ErrorKind::BandwidthUndefined, "all pooled points coincide; median heuristic is undefined");
  }
  return smallest;
}

}  // namespace

double median_heuristic(const Sample& x, const Sample& y) {
  if (x.dim() != y.dim()) throw Error(ErrorKind::InvalidInput, "samples have different dimensions");
  return x.dim() == 1 ? univariate_median_gap(x, y) : multivariate_median_distance(x, y);
}

}  // namespace mmdvar
