#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace suprec::cli {

/// 17 significant digits, '.' decimal point, no locale.
std::string format_real(double value);
/// Fixed notation with `decimals` digits after the point.
std::string format_fixed(double value, int decimals);
std::string format_int(std::uint64_t value);

/// Prefixes each line of `text` with "# " (blank lines become "#").
std::string comment_block(std::string_view text);

/// Comma-joined fields followed by '\n'. Fields are emitted verbatim.
std::string csv_row(std::span<const std::string> fields);

}  // namespace suprec::cli
