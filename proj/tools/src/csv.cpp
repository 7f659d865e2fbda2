#include "csv.hpp"

#include <array>
#include <charconv>

namespace suprec::cli {

std::string format_real(double value) {
  std::array<char, 64> buf{};
  const auto r = std::to_chars(buf.data(), buf.data() + buf.size(), value,
                               std::chars_format::general, 17);
  return std::string(buf.data(), r.ptr);
}

std::string format_fixed(double value, int decimals) {
  std::array<char, 512> buf{};
  const auto r = std::to_chars(buf.data(), buf.data() + buf.size(), value,
                               std::chars_format::fixed, decimals);
  return std::string(buf.data(), r.ptr);
}

std::string format_int(std::uint64_t value) { return std::to_string(value); }

std::string comment_block(std::string_view text) {
  std::string out;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    const std::string_view line = text.substr(0, eol);
    out += line.empty() ? "#" : "# ";
    out += line;
    out += '\n';
    if (eol == std::string_view::npos) break;
    text.remove_prefix(eol + 1);
  }
  return out;
}

std::string csv_row(std::span<const std::string> fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += fields[i];
  }
  out += '\n';
  return out;
}

}  // namespace suprec::cli
