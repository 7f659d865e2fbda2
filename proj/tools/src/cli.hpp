#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace suprec::cli {

/// Full command-line entry point. `args` excludes the program name. Returns
/// the process exit code (0 ok, 1 verification failure, 2 configuration
/// error, 3 I/O error).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace suprec::cli
