#pragma once

#include <cstddef>

namespace mmdvar::alloc {

/// Bytes currently held through global operator new (malloc_usable_size
/// granularity). Counting is process-wide.
std::size_t current_bytes() noexcept;

/// Measures the high-water mark of heap usage above the level at
/// construction. Scopes must not overlap.
class PeakScope {
 public:
  PeakScope() noexcept;
  std::size_t peak_additional() const noexcept;

 private:
  std::size_t baseline_;
};

}  // namespace mmdvar::alloc
