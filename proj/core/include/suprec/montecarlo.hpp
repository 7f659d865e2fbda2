#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "suprec/bounds.hpp"
#include "suprec/estimator.hpp"
#include "suprec/model.hpp"

namespace suprec {

struct EngineOptions {
  /// Worker threads; 0 = hardware concurrency. Never changes results.
  unsigned threads = 0;
  /// Optional progress sink (one short line per call).
  std::function<void(std::string_view)> progress;
};

// ---------------------------------------------------------------------------
// Recovery trials

struct TrialResult {
  bool success = false;   // top-k estimate == S
  double min_in = 0.0;    // min over u in S of lambda_u
  double max_out = 0.0;   // max over u' not in S of lambda_u' (-inf when S = [d])
  std::uint64_t seed = 0; // fingerprint of the trial's substreams
};

/// One end-to-end trial on the substreams of (config.seed, trial_index).
TrialResult run_trial(const ProblemConfig& config, std::uint64_t trial_index);

/// Incrementally grown trial: sample i is generated from the same substreams
/// gen_instance uses, so success_at(n) equals run_trial with config.n = n.
class TrialTrajectory {
 public:
  TrialTrajectory(const ProblemConfig& config, std::uint64_t trial_index);

  /// Generate samples up to n (no-op if already there).
  void extend_to(std::size_t n);
  [[nodiscard]] std::size_t extent() const noexcept { return success_.size(); }
  /// Requires 1 <= n <= extent().
  [[nodiscard]] bool success_at(std::size_t n) const;
  [[nodiscard]] const Support& support() const noexcept { return support_; }

 private:
  ProblemConfig config_;
  TrialStreams streams_;
  Support support_;
  StatisticAccumulator accumulator_;
  std::vector<std::uint8_t> success_;
};

struct SuccessEstimate {
  std::size_t trials = 0;
  std::size_t successes = 0;
  double rate = 0.0;
  double ci_low = 0.0;   // 95% Wilson interval
  double ci_high = 0.0;
};

inline constexpr double kWilsonZ95 = 1.959963984540054;

/// Wilson score interval. Throws ArgumentError if trials == 0 or successes > trials.
SuccessEstimate wilson_estimate(std::size_t successes, std::size_t trials,
                                double z = kWilsonZ95);

/// Runs trials 0..trials-1 and reduces in trial order.
SuccessEstimate estimate_success(const ProblemConfig& config, std::size_t trials,
                                 const EngineOptions& options = {});

// ---------------------------------------------------------------------------
// Empirical sample complexity

struct NStarResult {
  bool found = false;
  std::size_t nstar = 0;        // valid when found
  double rate = 0.0;            // empirical rate at nstar
  double rate_below = 0.0;      // empirical rate at nstar - 1 (0 when nstar == 1)
  std::size_t last_n = 0;       // largest n probed
  double last_rate = 0.0;       // rate at last_n
};

/// Minimal n with empirical success rate >= 1 - delta: doubling from n = 1,
/// then bisection. Trials are trajectories, so rate(n) is a fixed function of
/// n for a given seed and the result satisfies rate(N) >= 1 - delta > rate(N-1).
/// config.n is ignored.
NStarResult find_nstar(const ProblemConfig& config, double delta, std::size_t trials,
                       std::size_t n_max, const EngineOptions& options = {});

struct SweepRecord {
  std::size_t d = 0, k = 0, m = 0, n = 0;
  double sigma2 = 0.0, x_min = 0.0, x_max = 0.0;
  double delta = 0.0;
  std::size_t trials = 0;
  std::optional<SuccessEstimate> estimate;  // set by fixed-n experiments
  std::optional<std::size_t> nstar;         // set by n* searches when found
  double last_rate = 0.0;
  bool outside_regime = false;              // m < 2 log(d / delta)
  std::uint64_t master_seed = 0;

  [[nodiscard]] double k_over_m() const noexcept {
    return static_cast<double>(k) / static_cast<double>(m);
  }
};

/// One n* record per entry of m_list, in order, all from the same master seed.
std::vector<SweepRecord> sweep_phase_transition(const ProblemConfig& base,
                                                std::span<const std::size_t> m_list,
                                                double delta, std::size_t trials,
                                                std::size_t n_max,
                                                const EngineOptions& options = {});

struct LogLogFit {
  std::size_t points = 0;
  double slope = 0.0;
  double intercept = 0.0;
};

/// Least-squares fit of log n* on log(k/m) over found records with k/m in
/// [low, high]. Returns nullopt with fewer than two distinct abscissae.
std::optional<LogLogFit> fit_loglog_slope(std::span<const SweepRecord> records, double low,
                                          double high);

// ---------------------------------------------------------------------------
// Empirical tails and bound verification

enum class TailStatistic {
  SumChiSq4,            // |(1/n) sum ||Phi_iu||^4 - E|
  SumChiSq6,            // |(1/n) sum ||Phi_iu||^6 - E|
  MaxChiSq,             // max_i ||Phi_iu||^2 - mu_max
  NoncentralChiSqMean,  // +-((1/n) sum X_i^2 - E), X_i ~ N(mu, sigma2)
};

enum class TailSide { Upper, Lower };

struct TailProbe {
  TailStatistic statistic = TailStatistic::SumChiSq4;
  std::size_t n = 1;
  std::size_t m = 1;                 // unused by NoncentralChiSqMean
  std::vector<double> t_grid;
  std::size_t replications = 100000;
  TailSide side = TailSide::Upper;   // NoncentralChiSqMean only
  double mu = 0.0;                   // NoncentralChiSqMean only
  double sigma2 = 1.0;               // NoncentralChiSqMean only
  /// MaxChiSq only: E max_i ||Phi_iu||^2; estimated when unset.
  std::optional<double> mu_max;

  void validate() const;
};

struct TailPoint {
  double t = 0.0;
  double frequency = 0.0;
  double std_err = 0.0;  // binomial sqrt(f (1 - f) / R)
};

std::vector<TailPoint> empirical_tail(const TailProbe& probe, std::uint64_t seed,
                                      const EngineOptions& options = {});

/// Monte Carlo estimate of E max_{i<n} ||Phi_iu||^2.
double estimate_mu_max(std::size_t n, std::size_t m, std::size_t replications,
                       std::uint64_t seed, const EngineOptions& options = {});

enum class BoundSelector {
  HeavyTailQ3,    // SumChiSq6
  HeavyTailQ2,    // SumChiSq4
  MaxChiSq,       // MaxChiSq
  ChiSqLower,     // NoncentralChiSqMean, Lower
  ChiSqUpper,     // NoncentralChiSqMean, Upper
};

std::string_view to_string(BoundSelector selector) noexcept;
/// Throws ConfigError on unknown names.
BoundSelector parse_bound_selector(std::string_view text);
/// The probe statistic (and side) a selector is checked against.
bool selector_matches(BoundSelector selector, const TailProbe& probe) noexcept;

struct BoundCheck {
  double t = 0.0;
  double empirical = 0.0;
  double std_err = 0.0;
  double analytic = 0.0;
  bool pass = false;  // empirical <= analytic + 3 std_err
};

struct BoundReport {
  BoundSelector selector = BoundSelector::HeavyTailQ2;
  TailProbe probe;              // with mu_max resolved for MaxChiSq
  std::vector<BoundCheck> checks;
  bool pass = true;             // vacuously true for an empty grid
};

/// Analytic bound of `selector` at t for the probe's parameters.
double analytic_bound(BoundSelector selector, const TailProbe& probe, double t,
                      const BoundConstants& constants);

/// Throws ArgumentError when the selector does not match the probe.
BoundReport verify_bound(const TailProbe& probe, BoundSelector selector,
                         const BoundConstants& constants, std::uint64_t seed,
                         const EngineOptions& options = {});

struct HeavyTailCalibration {
  bool found = false;
  double c_heavy = 0.0;            // largest grid value with strict dominance
  std::vector<double> grid;        // candidates, increasing
};

/// Reference grid for calibrating c_heavy: n in {10, 100}, m in {4, 16},
/// t in {0.1, 0.3, 1.0}, both heavy-tail statistics.
std::vector<TailProbe> heavy_tail_reference_probes(std::size_t replications);

/// Largest c_heavy in {2^-6, ..., 2^6} whose bounds dominate every empirical
/// frequency of the reference probes without the 3-standard-error allowance.
HeavyTailCalibration calibrate_c_heavy(std::size_t replications, std::uint64_t seed,
                                       const EngineOptions& options = {});

// ---------------------------------------------------------------------------
// Separation condition over random ensembles

inline constexpr std::size_t kSeparationPairLimit = 100000;

struct SeparationSummary {
  std::size_t instances = 0;
  std::size_t satisfied = 0;  // instances where every (u, u') pair satisfies it
  double fraction = 0.0;
};

/// Fraction of instances (trials 0..instances-1 of config.seed, config.n
/// samples) whose measurement matrices satisfy the separation condition for
/// all (u, u') in S x S^c. Throws SizeError when d * k > kSeparationPairLimit.
SeparationSummary verify_separation(const ProblemConfig& config, double delta,
                                    std::size_t instances, const EngineOptions& options = {});

struct SampleConstantCalibration {
  bool found = false;
  double c_sample = 0.0;
  std::size_t n = 0;
  double fraction = 0.0;
};

/// Smallest c_sample in {2^0, ..., 2^max_exponent} for which verify_separation at
/// n = sample_complexity_upper(c_sample) reaches 1 - delta.
SampleConstantCalibration calibrate_c_sample(const ProblemConfig& config, double delta,
                                             std::size_t instances, unsigned max_exponent = 12,
                                             const EngineOptions& options = {});

// ---------------------------------------------------------------------------
// Conditional-moment and moment-bound checks

struct MomentEstimate {
  double mean = 0.0;
  double variance = 0.0;
  double mean_std_err = 0.0;
  double variance_std_err = 0.0;
};

/// Moments of Xhat_iu for one sample i with column u of Phi_i held fixed and
/// the other columns and the noise redrawn.
MomentEstimate empirical_proxy_moments(const ProblemInstance& instance, std::size_t sample,
                                       std::size_t u, std::size_t redraws, std::uint64_t seed,
                                       const EngineOptions& options = {});

/// Moments of lambda_u with column u of every Phi_i held fixed and the other
/// columns and the noise redrawn.
MomentEstimate empirical_statistic_moments(const ProblemInstance& instance, std::size_t u,
                                           std::size_t redraws, std::uint64_t seed,
                                           const EngineOptions& options = {});

/// Estimate of ||V^3 - E V^3||_p for V ~ chi^2_m.
double empirical_cube_moment_norm(double p, std::size_t m, std::size_t draws,
                                  std::uint64_t seed, const EngineOptions& options = {});

/// Estimate of ||sum_{i<n} (V_i^3 - E V_i^3)||_p for V_i ~ chi^2_m i.i.d.
double empirical_cube_sum_moment_norm(double p, std::size_t n, std::size_t m,
                                      std::size_t replications, std::uint64_t seed,
                                      const EngineOptions& options = {});

}  // namespace suprec
