#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>

#include "commands.hpp"
#include "suprec/errors.hpp"

namespace suprec::cli {
namespace {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CommonFlags {
  std::string config_path;
  std::string out_path;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
  bool to_stdout = false;
  bool quiet = false;
};

void add_common_flags(CLI::App* sub, CommonFlags& flags, bool with_config) {
  if (with_config) {
    sub->add_option("--config", flags.config_path, "Experiment config file");
    sub->add_option("--seed", flags.seed, "Master seed (overrides [problem] seed)");
    sub->add_option("--threads", flags.threads, "Worker threads; 0 = auto")
        ->check(CLI::NonNegativeNumber);
    sub->add_flag("--quiet", flags.quiet, "No progress output on stderr");
  }
  sub->add_option("--out", flags.out_path, "Write the artifact to this path");
  sub->add_flag("--stdout", flags.to_stdout, "Write the artifact to standard output");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("cannot read config file '" + path + "'");
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("failed writing '" + path + "'");
}

std::string summary_path_for(const std::string& out_path) {
  const auto slash = out_path.find_last_of('/');
  const auto dot = out_path.find_last_of('.');
  if (dot != std::string::npos && (slash == std::string::npos || dot > slash)) {
    return out_path.substr(0, dot) + "_summary" + out_path.substr(dot);
  }
  return out_path + "_summary.csv";
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Support recovery from multiple Gaussian measurement vectors", "suprec"};
  app.require_subcommand(1);

  CommonFlags flags;
  struct Command {
    std::string name;
    std::string help;
  };
  const std::vector<Command> config_commands = {
      {"trial", "Estimate the success rate at fixed n"},
      {"sweep", "Search n* over a list of m (phase transition)"},
      {"nstar", "Search n* at one parameter point"},
      {"verify-bounds", "Monte Carlo dominance checks of the tail bounds"},
      {"verify-separation", "Fraction of ensembles satisfying the separation condition"},
      {"generate", "Dump one problem instance as JSON"},
  };
  for (const auto& c : config_commands) add_common_flags(app.add_subcommand(c.name, c.help), flags, true);

  std::string bound_name;
  std::vector<std::string> bound_args;
  auto* eval = app.add_subcommand("bounds-eval", "Evaluate one closed-form bound");
  eval->add_option("name", bound_name, "Bound name")->required();
  eval->add_option("args", bound_args, "key=value arguments");
  add_common_flags(eval, flags, false);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfigError;
  }
  if (!flags.out_path.empty() && flags.to_stdout) {
    err << "error: --out and --stdout are mutually exclusive\n";
    return kExitConfigError;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    CommandResult result;
    if (command == "bounds-eval") {
      result = cmd_bounds_eval(bound_name, bound_args);
    } else {
      ExperimentConfig config;
      if (!flags.config_path.empty()) config = parse_experiment_config(read_file(flags.config_path));
      if (flags.seed) config.problem.seed = *flags.seed;
      config.validate();

      EngineOptions engine;
      engine.threads = flags.threads;
      if (!flags.quiet) {
        engine.progress = [&err](std::string_view line) { err << line << '\n'; };
      }
      if (command == "trial") result = cmd_trial(config, engine);
      else if (command == "sweep") result = cmd_sweep(config, engine);
      else if (command == "nstar") result = cmd_nstar(config, engine);
      else if (command == "verify-bounds") result = cmd_verify_bounds(config, engine);
      else if (command == "verify-separation") result = cmd_verify_separation(config, engine);
      else result = cmd_generate(config);

      if (!result.summary.empty()) {
        std::string path = config.sweep.summary_out;
        if (path.empty() && !flags.out_path.empty()) path = summary_path_for(flags.out_path);
        if (path.empty()) {
          result.text += '\n' + result.summary;
        } else {
          write_file(path, result.summary);
        }
      }
    }
    if (flags.out_path.empty()) {
      out << result.text;
      out.flush();
      if (!out) throw IoError("failed writing to standard output");
    } else {
      write_file(flags.out_path, result.text);
    }
    return result.exit_code;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIoError;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const SizeError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const DegenerateError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfigError;
  }
}

}  // namespace suprec::cli
