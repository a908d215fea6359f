#include "mmdvar/ingest.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "mmdvar/error.hpp"

namespace mmdvar {

namespace {

[[noreturn]] void fail_at(std::size_t line, const std::string& what) {
  throw Error(ErrorKind::Ingest, "line " + std::to_string(line) + ": " + what);
}

std::string_view trim(std::string_view s) {
  const auto space = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
  while (!s.empty() && space(s.front())) s.remove_prefix(1);
  while (!s.empty() && space(s.back())) s.remove_suffix(1);
  return s;
}

}  // namespace

Sample parse_csv(std::string_view text) {
  std::vector<double> data;
  std::size_t dim = 0;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const std::size_t eol = text.find('\n');
    const std::string_view line = trim(text.substr(0, eol));
    text.remove_prefix(eol == std::string_view::npos ? text.size() : eol + 1);
    if (line.empty()) continue;

    std::size_t fields = 0;
    std::string_view rest = line;
    while (true) {
      const std::size_t comma = rest.find(',');
      const std::string_view field = trim(rest.substr(0, comma));
      double value = 0.0;
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
      if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
        fail_at(line_no, "cannot parse '" + std::string(field) + "' as a number");
      }
      if (!std::isfinite(value)) fail_at(line_no, "non-finite value");
      data.push_back(value);
      ++fields;
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (dim == 0) {
      dim = fields;
    } else if (fields != dim) {
      fail_at(line_no, "ragged row: expected " + std::to_string(dim) + " columns, found " +
                           std::to_string(fields));
    }
  }
  if (data.empty()) throw Error(ErrorKind::Ingest, "input contains no observations");
  return Sample(std::move(data), dim);
}

Sample parse_raw(std::string_view bytes) {
  if (bytes.empty()) throw Error(ErrorKind::Ingest, "input contains no observations");
  if (bytes.size() % sizeof(double) != 0) {
    throw Error(ErrorKind::Ingest, "raw input length " + std::to_string(bytes.size()) +
                                       " is not a multiple of 8 bytes");
  }
  std::vector<double> values(bytes.size() / sizeof(double));
  for (std::size_t k = 0; k < values.size(); ++k) {
    std::uint64_t word = 0;
    std::memcpy(&word, bytes.data() + k * sizeof(double), sizeof word);
    if constexpr (std::endian::native == std::endian::big) word = __builtin_bswap64(word);
    values[k] = std::bit_cast<double>(word);
    if (!std::isfinite(values[k])) {
      throw Error(ErrorKind::Ingest, "record " + std::to_string(k + 1) + ": non-finite value");
    }
  }
  return Sample::univariate(std::move(values));
}

Sample ingest(const std::filesystem::path& path, InputFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Ingest, "cannot open " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return format == InputFormat::Csv ? parse_csv(bytes) : parse_raw(bytes);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

}  // namespace mmdvar
