#pragma once

#include <filesystem>
#include <string_view>

#include "mmdvar/kernel.hpp"

namespace mmdvar {

enum class InputFormat {
  Csv,   // one observation per line, comma-separated coordinates
  Raw,   // little-endian float64 column, d = 1
};

/// Parses CSV text. Dimension is fixed by the first row; blank lines are
/// skipped. Errors name the offending 1-based line.
Sample parse_csv(std::string_view text);

/// Decodes a little-endian float64 column.
Sample parse_raw(std::string_view bytes);

Sample ingest(const std::filesystem::path& path, InputFormat format);

}  // namespace mmdvar
