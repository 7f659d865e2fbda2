#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "suprec/rng.hpp"

namespace suprec {

enum class SignalMode {
  ConstantMax,
  ConstantMin,
  UniformMagnitudeRandomSign,
  FixedVector,
};

enum class SupportMode {
  UniformRandom,
  Fixed,
};

std::string_view to_string(SignalMode mode) noexcept;
std::string_view to_string(SupportMode mode) noexcept;
/// Accepts the snake_case names produced by to_string. Throws ConfigError.
SignalMode parse_signal_mode(std::string_view text);
SupportMode parse_support_mode(std::string_view text);

/// Scalar parameters of one support-recovery problem plus generation options.
struct ProblemConfig {
  std::size_t d = 1;
  std::size_t k = 1;
  std::size_t m = 1;
  std::size_t n = 1;
  double x_min = 1.0;
  double x_max = 1.0;
  double sigma2 = 0.0;
  SignalMode signal_mode = SignalMode::ConstantMin;
  SupportMode support_mode = SupportMode::UniformRandom;
  /// Support indices when support_mode == Fixed (any order).
  std::vector<std::size_t> fixed_support;
  /// On-support values (in increasing support-index order) when
  /// signal_mode == FixedVector. Length k.
  std::vector<double> fixed_pattern;
  std::uint64_t seed = 0;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

/// The common support S: strictly increasing indices in [0, d).
class Support {
 public:
  Support() = default;
  /// Sorts and validates; throws ConfigError on duplicates or out-of-range.
  Support(std::vector<std::size_t> indices, std::size_t d);

  [[nodiscard]] std::span<const std::size_t> indices() const noexcept { return indices_; }
  [[nodiscard]] std::size_t size() const noexcept { return indices_.size(); }
  [[nodiscard]] std::size_t dimension() const noexcept { return d_; }
  [[nodiscard]] bool contains(std::size_t u) const noexcept;
  /// Indices in [0, d) not in the support, increasing.
  [[nodiscard]] std::vector<std::size_t> complement() const;

  friend bool operator==(const Support& a, const Support& b) noexcept {
    return a.d_ == b.d_ && a.indices_ == b.indices_;
  }

 private:
  std::vector<std::size_t> indices_;
  std::size_t d_ = 0;
};

/// x_1..x_n, each of length d, supported on S.
struct SignalSet {
  std::vector<Eigen::VectorXd> vectors;

  /// True iff |x_iu| in [x_min, x_max] on S and x_iu == 0 off S for all i.
  [[nodiscard]] bool satisfies(const ProblemConfig& config, const Support& support) const;
};

/// Phi_1..Phi_n (m x d), W_1..W_n and Y_i = Phi_i x_i + W_i.
struct MeasurementSet {
  std::vector<Eigen::MatrixXd> matrices;
  std::vector<Eigen::VectorXd> noises;
  std::vector<Eigen::VectorXd> observations;

  /// Dimensions match the config and Y_i reproduces Phi_i x_i + W_i to 1e-10 relative.
  [[nodiscard]] bool consistent(const ProblemConfig& config, const SignalSet& signals) const;
};

/// One realization of the experiment. Immutable once built.
struct ProblemInstance {
  ProblemConfig config;
  Support support;
  SignalSet signals;
  MeasurementSet measurements;

  [[nodiscard]] bool valid() const;
};

// Per-sample kernels. Every generator below routes through these, so the
// batch and streaming code paths produce bit-identical numbers.

/// x_i for one sample; draws from `rng` only in UniformMagnitudeRandomSign mode.
Eigen::VectorXd draw_signal(const ProblemConfig& config, const Support& support, Rng& rng);
/// m x d matrix with i.i.d. N(0, 1/m) entries, filled column by column.
Eigen::MatrixXd draw_measurement_matrix(std::size_t m, std::size_t d, Rng& rng);
/// Standard-normal draws scaled by sigma. The draws do not depend on sigma2.
Eigen::VectorXd draw_noise(std::size_t m, double sigma2, Rng& rng);
/// Phi x + w.
Eigen::VectorXd observe(const Eigen::MatrixXd& phi, const Eigen::VectorXd& x,
                        const Eigen::VectorXd& w);

Support gen_support(const ProblemConfig& config, const TrialStreams& streams);
SignalSet gen_signals(const ProblemConfig& config, const Support& support,
                      const TrialStreams& streams);
MeasurementSet gen_measurements(const ProblemConfig& config, const SignalSet& signals,
                                const TrialStreams& streams);
/// Full instance for (config, trial). Sample i only consumes sample-i substreams,
/// so the instance with n samples is a prefix of the one with n + 1.
ProblemInstance gen_instance(const ProblemConfig& config, std::uint64_t trial = 0);

}  // namespace suprec
