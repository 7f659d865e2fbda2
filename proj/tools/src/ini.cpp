#include "ini.hpp"

#include <set>
#include <utility>

#include "suprec/errors.hpp"

namespace suprec::cli {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void fail(std::size_t line, const std::string& message) {
  throw ConfigError("line " + std::to_string(line) + ": " + message);
}

}  // namespace

std::vector<IniEntry> parse_ini(std::string_view text) {
  std::vector<IniEntry> entries;
  std::set<std::pair<std::string, std::string>> seen;
  std::string section;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto eol = text.find('\n');
    const std::string_view raw = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);

    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(line_no, "unterminated section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (section.empty()) fail(line_no, "empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail(line_no, "expected 'key = value'");
    if (section.empty()) fail(line_no, "entry outside of any [section]");
    IniEntry e{section, std::string(trim(line.substr(0, eq))),
               std::string(trim(line.substr(eq + 1))), line_no};
    if (e.key.empty()) fail(line_no, "empty key");
    if (!seen.emplace(e.section, e.key).second) {
      fail(line_no, "duplicate key '" + e.key + "' in [" + e.section + "]");
    }
    entries.push_back(std::move(e));
  }
  return entries;
}

}  // namespace suprec::cli
