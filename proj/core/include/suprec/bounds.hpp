#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "suprec/model.hpp"

namespace suprec {

/// Absolute constants left unspecified by the tail-bound lemmas. Defaults are 1;
/// the Monte Carlo engine can calibrate c_heavy and c_sample.
struct BoundConstants {
  double c_heavy = 1.0;      // exponent constant of the heavy-tail bounds
  double c_sample = 1.0;     // leading constant of the sample-complexity formula
  double rosenthal_c = 1.0;  // constant of Rosenthal's inequality

  /// Throws ConfigError unless every constant is finite and > 0.
  void validate() const;
};

// ---------------------------------------------------------------------------
// Conditional moments and the threshold window

/// Moments of the proxies conditioned on the columns Phi_iu (u in S) and
/// Phi_iu' (u' not in S).
struct ConditionalMoments {
  std::vector<double> mu_i;    // ||Phi_iu||^2 x_iu
  std::vector<double> nu2_i;   // conditional variance of Xhat_iu
  std::vector<double> nu2p_i;  // conditional variance of Xhat_iu'
  double mu = 0.0;             // E[lambda_u | Phi_u]
  double mu_prime = 0.0;       // E[lambda_u' | Phi_u']
};

/// Throws ArgumentError unless u is in S and u_prime is not.
ConditionalMoments conditional_moments(const ProblemInstance& instance, std::size_t u,
                                       std::size_t u_prime);

/// log(3d / delta): the per-coordinate error budget delta / (3d).
double union_log_term(std::size_t d, double delta);

/// [tau_low, tau_high]; any tau inside keeps both conditional error
/// probabilities at most delta / (3d).
struct ThresholdWindow {
  double tau_low = 0.0;
  double tau_high = 0.0;
  [[nodiscard]] bool nonempty() const noexcept { return tau_low < tau_high; }
};

ThresholdWindow threshold_window(const ConditionalMoments& cm, std::size_t d, double delta);

// ---------------------------------------------------------------------------
// Separation condition on the measurement ensemble

/// Power sums of one column's squared norms ||Phi_iu||^2 over the samples.
struct ColumnNormSummary {
  std::size_t n = 0;
  double sum2 = 0.0;  // sum_i ||Phi_iu||^2
  double sum4 = 0.0;  // sum_i ||Phi_iu||^4
  double sum6 = 0.0;  // sum_i ||Phi_iu||^6
  double max2 = 0.0;  // max_i ||Phi_iu||^2

  /// Appends one sample's squared norm; sums accumulate in call order.
  void add(double norm2) noexcept;
  static ColumnNormSummary from_squared_norms(std::span<const double> norm2);
};

struct SeparationParams {
  std::size_t k = 1;
  std::size_t m = 1;
  double sigma2 = 0.0;
  double x_min = 1.0;
  double x_max = 1.0;
  double log_term = 1.0;  // log(3d / delta)
};

struct SeparationReport {
  double lhs = 0.0;
  std::array<double, 4> rhs_terms{};
  double rhs = 0.0;
  bool satisfied = false;  // lhs > rhs
};

/// Evaluates the separation inequality for one (u, u') pair from the column
/// summaries of u (on support) and u' (off support).
SeparationReport separation_condition(const ColumnNormSummary& on_support,
                                      const ColumnNormSummary& off_support,
                                      const SeparationParams& params);

/// Same, reading column norms from an instance.
SeparationReport separation_condition(const ProblemInstance& instance, double delta,
                                      std::size_t u, std::size_t u_prime);

// ---------------------------------------------------------------------------
// Tail and moment bounds. Probability bounds are clamped to (0, 1] and accept
// t >= 0 (t == 0 yields 1); negative t is an ArgumentError.

/// P((1/n) sum X_i^2 <= E - t), X_i ~ N(mu_i, sigma2_i) independent.
double chisq_lower_tail_bound(std::span<const double> mu, std::span<const double> sigma2,
                              double t);
/// P((1/n) sum X_i^2 >= E + t).
double chisq_upper_tail_bound(std::span<const double> mu, std::span<const double> sigma2,
                              double t);

/// P(|(1/n) sum (||Phi_iu||^6 - E)| >= t).
double heavy_tail_bound_q3(std::size_t n, std::size_t m, double t,
                           const BoundConstants& constants);
/// P(|(1/n) sum (||Phi_iu||^4 - E)| >= t).
double heavy_tail_bound_q2(std::size_t n, std::size_t m, double t,
                           const BoundConstants& constants);

/// P(max_i ||Phi_iu||^2 >= mu_max + t). Requires mu_max >= 1.
double max_chisq_bound(std::size_t n, std::size_t m, double mu_max, double t);

/// Rosenthal moment bound c (p n^{1/p} ||Z_1||_p + sqrt(p n) ||Z_1||_2), p >= 2.
double rosenthal_bound(double p, std::size_t n, double lp_norm, double l2_norm,
                       const BoundConstants& constants);

/// 2^6 (3p + m/2)^3: bound on ||V^3 - E V^3||_p for V ~ chi^2_m, p >= 2.
double chisq_cube_moment_bound(double p, std::size_t m);

struct SampleComplexityQuery {
  std::size_t k = 1;
  std::size_t m = 1;
  std::size_t d = 1;
  double delta = 0.1;
  double x_min = 1.0;
  double x_max = 1.0;
  double sigma2 = 0.0;
};

struct SampleComplexity {
  std::uint64_t n = 0;
  /// m < 2 log(d / delta): the guarantee is not claimed there.
  bool outside_regime = false;
};

/// ceil(c (x_max/x_min)^4 max{A, A^2} log(d/delta)), A = k/m + sigma2/x_max^2.
SampleComplexity sample_complexity_upper(const SampleComplexityQuery& query,
                                         const BoundConstants& constants);

// ---------------------------------------------------------------------------
// Exact moments used by the bounds and their checks

/// E ||Phi_u||^{2q} for a column with i.i.d. N(0, 1/m) entries:
/// prod_{j<q} (1 + 2j/m).
double gaussian_column_moment(std::size_t m, unsigned q);

/// E V^r for V ~ chi^2_m: prod_{j<r} (m + 2j).
double chi_square_raw_moment(std::size_t m, unsigned r);

}  // namespace suprec
