#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "experiment_config.hpp"
#include "suprec/montecarlo.hpp"

namespace suprec::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerificationFailed = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitIoError = 3;

struct CommandResult {
  int exit_code = kExitOk;
  std::string text;     // primary artifact
  std::string summary;  // secondary artifact; only `sweep` fills it
};

// Each command validates its inputs and throws ConfigError (or the core
// library's argument errors) on bad configuration. Artifacts are pure
// functions of the config; the engine options only affect speed.

CommandResult cmd_trial(const ExperimentConfig& config, const EngineOptions& engine);
CommandResult cmd_sweep(const ExperimentConfig& config, const EngineOptions& engine);
CommandResult cmd_nstar(const ExperimentConfig& config, const EngineOptions& engine);
CommandResult cmd_verify_bounds(const ExperimentConfig& config, const EngineOptions& engine);
CommandResult cmd_verify_separation(const ExperimentConfig& config, const EngineOptions& engine);
CommandResult cmd_generate(const ExperimentConfig& config);

/// Names accepted by cmd_bounds_eval, in listing order.
std::vector<std::string_view> bound_names();

/// `args` are `key=value` strings. Unknown names, unknown or missing keys
/// throw ConfigError.
CommandResult cmd_bounds_eval(std::string_view name, std::span<const std::string> args);

}  // namespace suprec::cli
