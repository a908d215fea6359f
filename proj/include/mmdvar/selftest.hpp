#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace mmdvar {

struct SelftestOptions {
  bool quick = false;
  /// Fault injection: run the squared-kernel pass at sigma instead of
  /// sigma/2. The Frobenius suite must catch it.
  bool corrupt_squared_pass = false;
  std::uint64_t seed = 20240601;
};

struct SuiteResult {
  std::string name;
  std::size_t cases = 0;
  std::size_t failures = 0;
  double worst_rel_error = 0.0;
  double tolerance = 0.0;

  bool passed() const noexcept { return failures == 0; }
};

/// Built-in oracle suites: accumulator identities against double loops,
/// fast/matrix path equivalence and small-instance enumeration of the
/// second-order moments.
std::vector<SuiteResult> run_selftest(const SelftestOptions& options);

}  // namespace mmdvar
