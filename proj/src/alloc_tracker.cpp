#include "mmdvar/alloc_tracker.hpp"

#include <malloc.h>

#include <atomic>
#include <cstdlib>
#include <new>

namespace mmdvar::alloc {

namespace {

std::atomic<std::size_t> g_current{0};
std::atomic<std::size_t> g_peak{0};

void note_alloc(void* p) noexcept {
  const std::size_t size = malloc_usable_size(p);
  const std::size_t now = g_current.fetch_add(size, std::memory_order_relaxed) + size;
  std::size_t peak = g_peak.load(std::memory_order_relaxed);
  while (now > peak && !g_peak.compare_exchange_weak(peak, now, std::memory_order_relaxed)) {
  }
}

void note_free(void* p) noexcept {
  g_current.fetch_sub(malloc_usable_size(p), std::memory_order_relaxed);
}

void* tracked_new(std::size_t size) {
  void* p = std::malloc(size == 0 ? 1 : size);
  if (p == nullptr) throw std::bad_alloc();
  note_alloc(p);
  return p;
}

void* tracked_new_nothrow(std::size_t size) noexcept {
  void* p = std::malloc(size == 0 ? 1 : size);
  if (p != nullptr) note_alloc(p);
  return p;
}

void tracked_delete(void* p) noexcept {
  if (p == nullptr) return;
  note_free(p);
  std::free(p);
}

}  // namespace

std::size_t current_bytes() noexcept { return g_current.load(std::memory_order_relaxed); }

PeakScope::PeakScope() noexcept : baseline_(current_bytes()) {
  g_peak.store(baseline_, std::memory_order_relaxed);
}

std::size_t PeakScope::peak_additional() const noexcept {
  const std::size_t peak = g_peak.load(std::memory_order_relaxed);
  return peak > baseline_ ? peak - baseline_ : 0;
}

}  // namespace mmdvar::alloc

// Replacements for the unaligned global allocation functions. Over-aligned
// requests keep the library defaults and are not counted.
void* operator new(std::size_t size) { return mmdvar::alloc::tracked_new(size); }
void* operator new[](std::size_t size) { return mmdvar::alloc::tracked_new(size); }
void* operator new(std::size_t size, const std::nothrow_t&) noexcept {
  return mmdvar::alloc::tracked_new_nothrow(size);
}
void* operator new[](std::size_t size, const std::nothrow_t&) noexcept {
  return mmdvar::alloc::tracked_new_nothrow(size);
}
void operator delete(void* p) noexcept { mmdvar::alloc::tracked_delete(p); }
void operator delete[](void* p) noexcept { mmdvar::alloc::tracked_delete(p); }
void operator delete(void* p, std::size_t) noexcept { mmdvar::alloc::tracked_delete(p); }
void operator delete[](void* p, std::size_t) noexcept { mmdvar::alloc::tracked_delete(p); }
void operator delete(void* p, const std::nothrow_t&) noexcept { mmdvar::alloc::tracked_delete(p); }
void operator delete[](void* p, const std::nothrow_t&) noexcept {
  mmdvar::alloc::tracked_delete(p);
}
