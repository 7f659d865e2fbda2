#include "suprec/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "suprec/errors.hpp"

namespace suprec {
namespace {

void require_nonnegative_t(double t, const char* who) {
  if (!(t >= 0.0) || std::isnan(t)) {
    throw ArgumentError(std::string(who) + ": t must be >= 0");
  }
}

// Probability bounds live in (0, 1]; underflow is lifted to the smallest normal.
double clamp_probability(double value) {
  return std::clamp(value, std::numeric_limits<double>::min(), 1.0);
}

double column_norm2(const Eigen::MatrixXd& phi, std::size_t u) {
  return phi.col(static_cast<Eigen::Index>(u)).squaredNorm();
}

struct TailInputs {
  double n = 0.0;
  double variance_sum = 0.0;  // sum sigma_i^4 + sigma_i^2 mu_i^2
  double max_sigma2 = 0.0;
};

TailInputs tail_inputs(std::span<const double> mu, std::span<const double> sigma2,
                       double t, const char* who) {
  require_nonnegative_t(t, who);
  if (mu.size() != sigma2.size() || mu.empty()) {
    throw ArgumentError(std::string(who) + ": mu and sigma2 must be nonempty and equal length");
  }
  TailInputs in;
  in.n = static_cast<double>(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (sigma2[i] < 0.0) throw ArgumentError(std::string(who) + ": sigma2 must be >= 0");
    in.variance_sum += sigma2[i] * sigma2[i] + sigma2[i] * mu[i] * mu[i];
    in.max_sigma2 = std::max(in.max_sigma2, sigma2[i]);
  }
  if (in.max_sigma2 == 0.0) {
    throw DegenerateError(std::string(who) + ": all sigma_i are zero");
  }
  return in;
}

double heavy_tail(std::size_t n, std::size_t m, double t, double c, double root,
                  double m_power, const char* who) {
  require_nonnegative_t(t, who);
  const double nt = static_cast<double>(n) * t;
  const double middle = std::pow(std::pow(static_cast<double>(m), m_power) * nt, 1.0 / root);
  const double exponent = std::min({nt, middle, nt * t});
  return clamp_probability(std::exp(-c * exponent));
}

}  // namespace

void BoundConstants::validate() const {
  const auto check = [](double v, const char* field) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ConfigError(std::string("field '") + field + "': must be finite and > 0");
    }
  };
  check(c_heavy, "c_heavy");
  check(c_sample, "c_sample");
  check(rosenthal_c, "rosenthal_c");
}

ConditionalMoments conditional_moments(const ProblemInstance& instance, std::size_t u,
                                       std::size_t u_prime) {
  const auto& support = instance.support;
  if (!support.contains(u)) {
    throw ArgumentError("conditional_moments: u = " + std::to_string(u) + " is not in S");
  }
  if (u_prime >= instance.config.d || support.contains(u_prime)) {
    throw ArgumentError("conditional_moments: u' = " + std::to_string(u_prime) +
                        " must be outside S");
  }
  const auto& cfg = instance.config;
  const double inv_m = 1.0 / static_cast<double>(cfg.m);
  const std::size_t n = instance.measurements.matrices.size();

  ConditionalMoments cm;
  cm.mu_i.reserve(n);
  cm.nu2_i.reserve(n);
  cm.nu2p_i.reserve(n);
  double mu_sum = 0.0;
  double mu_prime_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& phi = instance.measurements.matrices[i];
    const auto& x = instance.signals.vectors[i];
    double energy_all = 0.0;
    for (auto v : support.indices()) {
      const double xv = x[static_cast<Eigen::Index>(v)];
      energy_all += xv * xv;
    }
    const double xu = x[static_cast<Eigen::Index>(u)];
    double energy_others = 0.0;
    for (auto v : support.indices()) {
      if (v == u) continue;
      const double xv = x[static_cast<Eigen::Index>(v)];
      energy_others += xv * xv;
    }
    const double a = column_norm2(phi, u);
    const double b = column_norm2(phi, u_prime);
    cm.mu_i.push_back(a * xu);
    cm.nu2_i.push_back(a * inv_m * energy_others + cfg.sigma2 * a);
    cm.nu2p_i.push_back(b * inv_m * energy_all + cfg.sigma2 * b);
    mu_sum += xu * xu * a * a + a * (inv_m * energy_others + cfg.sigma2);
    mu_prime_sum += b * (inv_m * energy_all + cfg.sigma2);
  }
  cm.mu = mu_sum / static_cast<double>(n);
  cm.mu_prime = mu_prime_sum / static_cast<double>(n);
  return cm;
}

double union_log_term(std::size_t d, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw ArgumentError("delta must lie in (0, 1)");
  return std::log(3.0 * static_cast<double>(d) / delta);
}

ThresholdWindow threshold_window(const ConditionalMoments& cm, std::size_t d, double delta) {
  const std::size_t count = cm.mu_i.size();
  if (count == 0 || cm.nu2_i.size() != count || cm.nu2p_i.size() != count) {
    throw ArgumentError("threshold_window: per-sample moment arrays must be nonempty and equal length");
  }
  const double log_term = union_log_term(d, delta);
  const double n = static_cast<double>(count);
  double in_sum = 0.0;
  double out_sum = 0.0;
  double out_max = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const double nu2 = cm.nu2_i[i];
    in_sum += nu2 * nu2 + cm.mu_i[i] * cm.mu_i[i] * nu2;
    out_sum += cm.nu2p_i[i] * cm.nu2p_i[i];
    out_max = std::max(out_max, cm.nu2p_i[i]);
  }
  ThresholdWindow w;
  w.tau_high = cm.mu - std::sqrt(4.0 / (n * n) * in_sum * log_term);
  w.tau_low = cm.mu_prime + std::max(std::sqrt(16.0 / (n * n) * out_sum * log_term),
                                     8.0 / n * out_max * log_term);
  return w;
}

void ColumnNormSummary::add(double a) noexcept {
  ++n;
  sum2 += a;
  sum4 += a * a;
  sum6 += a * a * a;
  max2 = std::max(max2, a);
}

ColumnNormSummary ColumnNormSummary::from_squared_norms(std::span<const double> norm2) {
  ColumnNormSummary s;
  for (double a : norm2) s.add(a);
  return s;
}

SeparationReport separation_condition(const ColumnNormSummary& on_support,
                                      const ColumnNormSummary& off_support,
                                      const SeparationParams& p) {
  if (on_support.n == 0 || on_support.n != off_support.n) {
    throw ArgumentError("separation_condition: column summaries must cover the same n >= 1 samples");
  }
  const double n = static_cast<double>(on_support.n);
  const double m = static_cast<double>(p.m);
  const double k = static_cast<double>(p.k);
  const double noise_ratio = p.sigma2 / (p.x_max * p.x_max);
  const double a = (k - 1.0) / m + noise_ratio;
  const double b = k / m + noise_ratio;
  const double L = p.log_term;

  SeparationReport r;
  r.lhs = (p.x_min * p.x_min) / (p.x_max * p.x_max) * (1.0 / n) *
          (on_support.sum4 - on_support.sum2 / m);
  r.rhs_terms[0] = std::sqrt(4.0 / (n * n) * a * a * on_support.sum4 * L);
  r.rhs_terms[1] = std::sqrt(4.0 / (n * n) * a * on_support.sum6 * L);
  r.rhs_terms[2] = std::sqrt(16.0 / (n * n) * b * b * off_support.sum4 * L);
  r.rhs_terms[3] = 8.0 / n * b * off_support.max2 * L;
  r.rhs = r.rhs_terms[0] + r.rhs_terms[1] + r.rhs_terms[2] + r.rhs_terms[3];
  r.satisfied = r.lhs > r.rhs;
  return r;
}

SeparationReport separation_condition(const ProblemInstance& instance, double delta,
                                      std::size_t u, std::size_t u_prime) {
  const auto& support = instance.support;
  if (!support.contains(u)) {
    throw ArgumentError("separation_condition: u = " + std::to_string(u) + " is not in S");
  }
  if (u_prime >= instance.config.d || support.contains(u_prime)) {
    throw ArgumentError("separation_condition: u' = " + std::to_string(u_prime) +
                        " must be outside S");
  }
  std::vector<double> on, off;
  for (const auto& phi : instance.measurements.matrices) {
    on.push_back(column_norm2(phi, u));
    off.push_back(column_norm2(phi, u_prime));
  }
  const auto& c = instance.config;
  const SeparationParams params{c.k, c.m, c.sigma2, c.x_min, c.x_max, union_log_term(c.d, delta)};
  return separation_condition(ColumnNormSummary::from_squared_norms(on),
                              ColumnNormSummary::from_squared_norms(off), params);
}

double chisq_lower_tail_bound(std::span<const double> mu, std::span<const double> sigma2,
                              double t) {
  const auto in = tail_inputs(mu, sigma2, t, "chisq_lower_tail_bound");
  return clamp_probability(std::exp(-in.n * in.n * t * t / (4.0 * in.variance_sum)));
}

double chisq_upper_tail_bound(std::span<const double> mu, std::span<const double> sigma2,
                              double t) {
  const auto in = tail_inputs(mu, sigma2, t, "chisq_upper_tail_bound");
  const double quadratic = in.n * in.n * t * t / (16.0 * in.variance_sum);
  const double linear = in.n * t / (8.0 * in.max_sigma2);
  return clamp_probability(std::exp(-std::min(quadratic, linear)));
}

double heavy_tail_bound_q3(std::size_t n, std::size_t m, double t,
                           const BoundConstants& constants) {
  return heavy_tail(n, m, t, constants.c_heavy, 4.0, 3.0, "heavy_tail_bound_q3");
}

double heavy_tail_bound_q2(std::size_t n, std::size_t m, double t,
                           const BoundConstants& constants) {
  return heavy_tail(n, m, t, constants.c_heavy, 3.0, 2.0, "heavy_tail_bound_q2");
}

double max_chisq_bound(std::size_t n, std::size_t m, double mu_max, double t) {
  require_nonnegative_t(t, "max_chisq_bound");
  if (!(mu_max >= 1.0)) throw ArgumentError("max_chisq_bound: mu_max must be >= 1");
  const double excess = mu_max + t - 1.0;
  const double exponent = static_cast<double>(m) / 8.0 * std::min(excess * excess, excess);
  return clamp_probability(static_cast<double>(n) * std::exp(-exponent));
}

double rosenthal_bound(double p, std::size_t n, double lp_norm, double l2_norm,
                       const BoundConstants& constants) {
  if (!(p >= 2.0)) throw ArgumentError("rosenthal_bound: p must be >= 2");
  if (!(lp_norm >= 0.0) || !(l2_norm >= 0.0)) {
    throw ArgumentError("rosenthal_bound: norms must be >= 0");
  }
  const double nn = static_cast<double>(n);
  return constants.rosenthal_c *
         (p * std::pow(nn, 1.0 / p) * lp_norm + std::sqrt(p * nn) * l2_norm);
}

double chisq_cube_moment_bound(double p, std::size_t m) {
  if (!(p >= 2.0)) throw ArgumentError("chisq_cube_moment_bound: p must be >= 2");
  const double base = 3.0 * p + static_cast<double>(m) / 2.0;
  return 64.0 * base * base * base;
}

SampleComplexity sample_complexity_upper(const SampleComplexityQuery& q,
                                         const BoundConstants& constants) {
  if (!(q.delta > 0.0 && q.delta < 1.0)) {
    throw ArgumentError("sample_complexity_upper: delta must lie in (0, 1)");
  }
  if (q.m == 0 || q.d == 0 || q.k == 0) {
    throw ArgumentError("sample_complexity_upper: k, m, d must be >= 1");
  }
  if (!(q.x_min > 0.0) || !(q.x_max >= q.x_min) || !(q.sigma2 >= 0.0)) {
    throw ArgumentError("sample_complexity_upper: need 0 < x_min <= x_max and sigma2 >= 0");
  }
  const double log_term = std::log(static_cast<double>(q.d) / q.delta);
  const double a = static_cast<double>(q.k) / static_cast<double>(q.m) +
                   q.sigma2 / (q.x_max * q.x_max);
  const double ratio = q.x_max / q.x_min;
  const double ratio4 = ratio * ratio * ratio * ratio;
  const double raw = constants.c_sample * ratio4 * std::max(a * log_term, a * a * log_term);
  SampleComplexity out;
  out.n = static_cast<std::uint64_t>(std::ceil(raw));
  if (out.n == 0) out.n = 1;
  out.outside_regime = static_cast<double>(q.m) < 2.0 * log_term;
  return out;
}

double gaussian_column_moment(std::size_t m, unsigned q) {
  double product = 1.0;
  const double mm = static_cast<double>(m);
  for (unsigned j = 0; j < q; ++j) product *= 1.0 + 2.0 * j / mm;
  return product;
}

double chi_square_raw_moment(std::size_t m, unsigned r) {
  double product = 1.0;
  for (unsigned j = 0; j < r; ++j) product *= static_cast<double>(m) + 2.0 * j;
  return product;
}

}  // namespace suprec
