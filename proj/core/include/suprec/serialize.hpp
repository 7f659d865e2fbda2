#pragma once

#include <string>
#include <string_view>

#include "suprec/model.hpp"

namespace suprec {

/// Self-describing JSON dump of an instance. Reals are written in shortest
/// round-trip form, so load_instance(dump_instance(x)) is bit-identical to x.
std::string dump_instance(const ProblemInstance& instance);

/// Inverse of dump_instance. Throws ConfigError on malformed input.
ProblemInstance load_instance(std::string_view text);

}  // namespace suprec
