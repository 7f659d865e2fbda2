#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace suprec::cli {

/// One `key = value` line of a config file.
struct IniEntry {
  std::string section;
  std::string key;
  std::string value;
  std::size_t line = 0;
};

/// Flat sectioned key-value text. Blank lines and lines starting with '#' or
/// ';' are ignored. Entries before the first [section] header, malformed
/// lines and repeated keys throw ConfigError with the line number.
std::vector<IniEntry> parse_ini(std::string_view text);

}  // namespace suprec::cli
