#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mmdvar {

enum class ErrorKind {
  InvalidInput,
  BandwidthUndefined,
  UnsupportedFamily,
  InsufficientSample,
  InsufficientSampleForVariance,
  Unsorted,
  Config,
  Ingest,
};

/// Stable machine-readable name used in CLI diagnostics.
std::string_view error_kind_name(ErrorKind kind) noexcept;

/// Every failure raised by the library carries a kind so callers (and the
/// CLI's exit-code mapping) can dispatch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace mmdvar
