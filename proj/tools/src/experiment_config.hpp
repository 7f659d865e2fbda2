#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "suprec/bounds.hpp"
#include "suprec/model.hpp"

namespace suprec::cli {

struct SweepSettings {
  std::vector<std::size_t> m_list;
  std::size_t n_max = 1u << 20;
  double fit_low = 1.5;   // k/m window of the log-log fit
  double fit_high = 5.0;
  std::string summary_out;  // empty: derived from --out
};

struct NStarSettings {
  std::size_t n_max = 1u << 20;
};

struct VerifyBoundsSettings {
  std::vector<std::string> lemmas{"chisq_lower_tail", "chisq_upper_tail", "heavy_q3",
                                  "heavy_q2", "max_chisq"};
  // heavy_q3, heavy_q2, max_chisq
  std::vector<std::size_t> n_list{10, 100};
  std::vector<std::size_t> m_list{4, 16};
  std::vector<double> t_grid{0.1, 0.3, 1.0};
  // chisq_lower_tail, chisq_upper_tail
  std::vector<std::size_t> chisq_n_list{1, 20};
  std::vector<double> chisq_mu_list{0.0, 1.0};
  double chisq_sigma2 = 1.0;
  std::vector<double> chisq_t_grid{0.2, 0.5, 1.0, 2.0};

  std::size_t replications = 100000;
  std::size_t calibration_replications = 100000;
};

struct VerifySeparationSettings {
  std::size_t instances = 100;
  /// > 0: n = ceil(n_factor * sample_complexity_upper), overriding [problem] n.
  double n_factor = 0.0;
  unsigned max_exponent = 12;  // c_sample = auto searches 2^0 .. 2^max_exponent
};

struct GenerateSettings {
  std::uint64_t trial = 0;
};

/// Everything one invocation needs. Every field has a default, so an empty
/// file is a valid (if small) experiment.
struct ExperimentConfig {
  ProblemConfig problem;
  double delta = 0.1;
  std::size_t trials = 200;

  BoundConstants constants;
  bool c_heavy_auto = false;
  bool c_sample_auto = false;

  SweepSettings sweep;
  NStarSettings nstar;
  VerifyBoundsSettings verify_bounds;
  VerifySeparationSettings verify_separation;
  GenerateSettings generate;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

/// Parses config text. Unknown sections or keys and malformed values throw
/// ConfigError carrying the line number and field name.
ExperimentConfig parse_experiment_config(std::string_view text);

/// Canonical `[section]` / `key = value` rendering of every resolved field,
/// defaults included, in the same syntax parse_experiment_config accepts.
std::string render_experiment_config(const ExperimentConfig& config);

}  // namespace suprec::cli
