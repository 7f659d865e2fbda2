#include "suprec/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "suprec/errors.hpp"
#include "suprec/parallel.hpp"

namespace suprec {
namespace {

void report(const EngineOptions& options, const std::string& line) {
  if (options.progress) options.progress(line);
}

bool same_indices(const SupportEstimate& est, const Support& support) {
  const auto idx = support.indices();
  return std::equal(est.indices.begin(), est.indices.end(), idx.begin(), idx.end());
}

void require_delta(double delta, const char* who) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw ArgumentError(std::string(who) + ": delta must lie in (0, 1)");
  }
}

MomentEstimate summarize(std::span<const double> values) {
  const double count = static_cast<double>(values.size());
  MomentEstimate out;
  if (values.empty()) return out;
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / count;
  double m2 = 0.0;
  double m4 = 0.0;
  for (double v : values) {
    const double c = v - out.mean;
    m2 += c * c;
    m4 += c * c * c * c;
  }
  out.variance = values.size() > 1 ? m2 / (count - 1.0) : 0.0;
  const double pop_var = m2 / count;
  out.mean_std_err = std::sqrt(out.variance / count);
  out.variance_std_err = std::sqrt(std::max(0.0, m4 / count - pop_var * pop_var) / count);
  return out;
}

// Gaussian-ensemble column norm ||Phi_u||^2 = V / m with V ~ chi^2_m.
double draw_column_norm2(std::chi_squared_distribution<double>& chi, double m, Rng& rng) {
  return chi(rng) / m;
}

}  // namespace

// ---------------------------------------------------------------------------
// Trials

TrialResult run_trial(const ProblemConfig& config, std::uint64_t trial_index) {
  const ProblemInstance inst = gen_instance(config, trial_index);
  const SupportStatistic stat = support_statistic(proxy_samples(inst));
  const SupportEstimate est = top_k_support(stat, config.k);

  TrialResult r;
  r.success = same_indices(est, inst.support);
  r.min_in = std::numeric_limits<double>::infinity();
  r.max_out = -std::numeric_limits<double>::infinity();
  for (std::size_t u = 0; u < config.d; ++u) {
    const double v = stat.lambda_tilde[static_cast<Eigen::Index>(u)];
    if (inst.support.contains(u)) {
      r.min_in = std::min(r.min_in, v);
    } else {
      r.max_out = std::max(r.max_out, v);
    }
  }
  r.seed = TrialStreams(config.seed, trial_index).fingerprint();
  return r;
}

TrialTrajectory::TrialTrajectory(const ProblemConfig& config, std::uint64_t trial_index)
    : config_(config),
      streams_(config.seed, trial_index),
      support_(gen_support(config, streams_)),
      accumulator_(config.d) {}

void TrialTrajectory::extend_to(std::size_t n) {
  while (success_.size() < n) {
    const std::size_t i = success_.size();
    Rng signal_rng = streams_.sample(i, StreamPurpose::Signal);
    Rng phi_rng = streams_.sample(i, StreamPurpose::Measurement);
    Rng noise_rng = streams_.sample(i, StreamPurpose::Noise);
    const Eigen::VectorXd x = draw_signal(config_, support_, signal_rng);
    const Eigen::MatrixXd phi = draw_measurement_matrix(config_.m, config_.d, phi_rng);
    const Eigen::VectorXd w = draw_noise(config_.m, config_.sigma2, noise_rng);
    accumulator_.add(proxy_sample(phi, observe(phi, x, w)));
    const SupportEstimate est = top_k_support(accumulator_.statistic(), config_.k);
    success_.push_back(same_indices(est, support_) ? 1 : 0);
  }
}

bool TrialTrajectory::success_at(std::size_t n) const {
  if (n == 0 || n > success_.size()) {
    throw ArgumentError("TrialTrajectory::success_at: n outside [1, extent]");
  }
  return success_[n - 1] != 0;
}

SuccessEstimate wilson_estimate(std::size_t successes, std::size_t trials, double z) {
  if (trials == 0) throw ArgumentError("wilson_estimate: trials must be >= 1");
  if (successes > trials) throw ArgumentError("wilson_estimate: successes exceed trials");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  SuccessEstimate e;
  e.trials = trials;
  e.successes = successes;
  e.rate = p;
  e.ci_low = std::max(0.0, std::min(p, center - half));
  e.ci_high = std::min(1.0, std::max(p, center + half));
  return e;
}

SuccessEstimate estimate_success(const ProblemConfig& config, std::size_t trials,
                                 const EngineOptions& options) {
  if (trials == 0) throw ArgumentError("estimate_success: trials must be >= 1");
  config.validate();
  std::vector<std::uint8_t> outcome(trials, 0);
  parallel_for(trials, options.threads, [&](std::size_t t) {
    outcome[t] = run_trial(config, t).success ? 1 : 0;
  });
  const std::size_t successes = std::accumulate(outcome.begin(), outcome.end(), std::size_t{0});
  return wilson_estimate(successes, trials);
}

// ---------------------------------------------------------------------------
// n* search

NStarResult find_nstar(const ProblemConfig& config, double delta, std::size_t trials,
                       std::size_t n_max, const EngineOptions& options) {
  require_delta(delta, "find_nstar");
  if (trials == 0) throw ArgumentError("find_nstar: trials must be >= 1");
  if (n_max == 0) throw ArgumentError("find_nstar: n_max must be >= 1");
  ProblemConfig cfg = config;
  cfg.n = 1;
  cfg.validate();

  std::vector<TrialTrajectory> trajectories;
  trajectories.reserve(trials);
  for (std::size_t t = 0; t < trials; ++t) trajectories.emplace_back(cfg, t);

  const double target = 1.0 - delta;
  const double count = static_cast<double>(trials);
  auto rate_at = [&](std::size_t n) {
    parallel_for(trials, options.threads, [&](std::size_t t) { trajectories[t].extend_to(n); });
    std::size_t s = 0;
    for (const auto& tr : trajectories) s += tr.success_at(n) ? 1 : 0;
    return static_cast<double>(s) / count;
  };

  NStarResult result;
  std::size_t lo = 0;  // largest probed n known to miss the target (0 = none)
  std::size_t hi = 0;
  for (std::size_t n = 1;; n = std::min(2 * n, n_max)) {
    const double r = rate_at(n);
    result.last_n = n;
    result.last_rate = r;
    std::ostringstream os;
    os << "m=" << cfg.m << " n=" << n << " rate=" << r;
    report(options, os.str());
    if (r >= target) {
      hi = n;
      break;
    }
    lo = n;
    if (n >= n_max) return result;
  }
  while (hi - lo > 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (rate_at(mid) >= target) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  result.found = true;
  result.nstar = hi;
  result.rate = rate_at(hi);
  result.rate_below = hi > 1 ? rate_at(hi - 1) : 0.0;
  return result;
}

std::vector<SweepRecord> sweep_phase_transition(const ProblemConfig& base,
                                                std::span<const std::size_t> m_list,
                                                double delta, std::size_t trials,
                                                std::size_t n_max,
                                                const EngineOptions& options) {
  if (m_list.empty()) throw ArgumentError("sweep_phase_transition: m_list is empty");
  std::vector<SweepRecord> records;
  records.reserve(m_list.size());
  for (std::size_t m : m_list) {
    ProblemConfig cfg = base;
    cfg.m = m;
    const NStarResult r = find_nstar(cfg, delta, trials, n_max, options);
    SweepRecord rec;
    rec.d = cfg.d;
    rec.k = cfg.k;
    rec.m = m;
    rec.sigma2 = cfg.sigma2;
    rec.x_min = cfg.x_min;
    rec.x_max = cfg.x_max;
    rec.delta = delta;
    rec.trials = trials;
    rec.master_seed = cfg.seed;
    rec.last_rate = r.found ? r.rate : r.last_rate;
    if (r.found) {
      rec.nstar = r.nstar;
      rec.n = r.nstar;
    }
    rec.outside_regime =
        static_cast<double>(m) < 2.0 * std::log(static_cast<double>(cfg.d) / delta);
    records.push_back(rec);
  }
  return records;
}

std::optional<LogLogFit> fit_loglog_slope(std::span<const SweepRecord> records, double low,
                                          double high) {
  std::vector<double> xs, ys;
  for (const auto& r : records) {
    const double ratio = r.k_over_m();
    if (!r.nstar || ratio < low || ratio > high) continue;
    xs.push_back(std::log(ratio));
    ys.push_back(std::log(static_cast<double>(*r.nstar)));
  }
  if (xs.size() < 2) return std::nullopt;
  const double count = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / count;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / count;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx == 0.0) return std::nullopt;
  LogLogFit fit;
  fit.points = xs.size();
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  return fit;
}

// ---------------------------------------------------------------------------
// Tails

void TailProbe::validate() const {
  if (n == 0) throw ArgumentError("tail probe: n must be >= 1");
  if (statistic != TailStatistic::NoncentralChiSqMean && m == 0) {
    throw ArgumentError("tail probe: m must be >= 1");
  }
  if (replications == 0) throw ArgumentError("tail probe: replications must be >= 1");
  if (statistic == TailStatistic::NoncentralChiSqMean && !(sigma2 > 0.0)) {
    throw ArgumentError("tail probe: sigma2 must be > 0");
  }
  for (double t : t_grid) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw ArgumentError("tail probe: t must be finite and >= 0");
  }
}

double estimate_mu_max(std::size_t n, std::size_t m, std::size_t replications,
                       std::uint64_t seed, const EngineOptions& options) {
  if (n == 0 || m == 0 || replications == 0) {
    throw ArgumentError("estimate_mu_max: n, m, replications must be >= 1");
  }
  std::vector<double> maxima(replications);
  const double mm = static_cast<double>(m);
  parallel_for(replications, options.threads, [&](std::size_t r) {
    Rng rng = TrialStreams(seed, r).sample(0, StreamPurpose::Auxiliary);
    std::chi_squared_distribution<double> chi(mm);
    double best = 0.0;
    for (std::size_t i = 0; i < n; ++i) best = std::max(best, draw_column_norm2(chi, mm, rng));
    maxima[r] = best;
  });
  return std::accumulate(maxima.begin(), maxima.end(), 0.0) / static_cast<double>(replications);
}

namespace {

TailProbe resolve_probe(const TailProbe& probe, std::uint64_t seed,
                        const EngineOptions& options) {
  TailProbe out = probe;
  if (out.statistic == TailStatistic::MaxChiSq && !out.mu_max) {
    const double estimate =
        estimate_mu_max(out.n, out.m, 10000, splitmix64(seed ^ 0x6d755f6d6178ULL), options);
    // E max of mean-one variables is at least one; Monte Carlo noise must not push it below.
    out.mu_max = std::max(1.0, estimate);
  }
  return out;
}

}  // namespace

std::vector<TailPoint> empirical_tail(const TailProbe& input, std::uint64_t seed,
                                      const EngineOptions& options) {
  input.validate();
  const TailProbe probe = resolve_probe(input, seed, options);
  const std::size_t reps = probe.replications;
  std::vector<double> stat(reps);
  const double n = static_cast<double>(probe.n);
  const double m = static_cast<double>(probe.m);

  parallel_for(reps, options.threads, [&](std::size_t r) {
    Rng rng = TrialStreams(seed, r).sample(0, StreamPurpose::Probe);
    switch (probe.statistic) {
      case TailStatistic::SumChiSq4:
      case TailStatistic::SumChiSq6: {
        const unsigned q = probe.statistic == TailStatistic::SumChiSq4 ? 2 : 3;
        std::chi_squared_distribution<double> chi(m);
        double sum = 0.0;
        for (std::size_t i = 0; i < probe.n; ++i) {
          const double a = draw_column_norm2(chi, m, rng);
          sum += q == 2 ? a * a : a * a * a;
        }
        stat[r] = std::abs(sum / n - gaussian_column_moment(probe.m, q));
        break;
      }
      case TailStatistic::MaxChiSq: {
        std::chi_squared_distribution<double> chi(m);
        double best = 0.0;
        for (std::size_t i = 0; i < probe.n; ++i) best = std::max(best, draw_column_norm2(chi, m, rng));
        stat[r] = best - *probe.mu_max;
        break;
      }
      case TailStatistic::NoncentralChiSqMean: {
        std::normal_distribution<double> normal(probe.mu, std::sqrt(probe.sigma2));
        double sum = 0.0;
        for (std::size_t i = 0; i < probe.n; ++i) {
          const double x = normal(rng);
          sum += x * x;
        }
        const double deviation = sum / n - (probe.sigma2 + probe.mu * probe.mu);
        stat[r] = probe.side == TailSide::Upper ? deviation : -deviation;
        break;
      }
    }
  });

  std::vector<TailPoint> out;
  out.reserve(probe.t_grid.size());
  const double count = static_cast<double>(reps);
  for (double t : probe.t_grid) {
    const auto hits = std::count_if(stat.begin(), stat.end(), [t](double s) { return s >= t; });
    const double f = static_cast<double>(hits) / count;
    out.push_back(TailPoint{t, f, std::sqrt(f * (1.0 - f) / count)});
  }
  return out;
}

std::string_view to_string(BoundSelector selector) noexcept {
  switch (selector) {
    case BoundSelector::HeavyTailQ3: return "heavy_q3";
    case BoundSelector::HeavyTailQ2: return "heavy_q2";
    case BoundSelector::MaxChiSq: return "max_chisq";
    case BoundSelector::ChiSqLower: return "chisq_lower_tail";
    case BoundSelector::ChiSqUpper: return "chisq_upper_tail";
  }
  return "?";
}

BoundSelector parse_bound_selector(std::string_view text) {
  for (auto s : {BoundSelector::HeavyTailQ3, BoundSelector::HeavyTailQ2, BoundSelector::MaxChiSq,
                 BoundSelector::ChiSqLower, BoundSelector::ChiSqUpper}) {
    if (text == to_string(s)) return s;
  }
  throw ConfigError("unknown bound '" + std::string(text) +
                    "' (expected heavy_q3, heavy_q2, max_chisq, chisq_lower_tail or "
                    "chisq_upper_tail)");
}

bool selector_matches(BoundSelector selector, const TailProbe& probe) noexcept {
  switch (selector) {
    case BoundSelector::HeavyTailQ3: return probe.statistic == TailStatistic::SumChiSq6;
    case BoundSelector::HeavyTailQ2: return probe.statistic == TailStatistic::SumChiSq4;
    case BoundSelector::MaxChiSq: return probe.statistic == TailStatistic::MaxChiSq;
    case BoundSelector::ChiSqLower:
      return probe.statistic == TailStatistic::NoncentralChiSqMean && probe.side == TailSide::Lower;
    case BoundSelector::ChiSqUpper:
      return probe.statistic == TailStatistic::NoncentralChiSqMean && probe.side == TailSide::Upper;
  }
  return false;
}

double analytic_bound(BoundSelector selector, const TailProbe& probe, double t,
                      const BoundConstants& constants) {
  switch (selector) {
    case BoundSelector::HeavyTailQ3: return heavy_tail_bound_q3(probe.n, probe.m, t, constants);
    case BoundSelector::HeavyTailQ2: return heavy_tail_bound_q2(probe.n, probe.m, t, constants);
    case BoundSelector::MaxChiSq:
      if (!probe.mu_max) throw ArgumentError("analytic_bound: MaxChiSq probe needs mu_max");
      return max_chisq_bound(probe.n, probe.m, *probe.mu_max, t);
    case BoundSelector::ChiSqLower:
    case BoundSelector::ChiSqUpper: {
      const std::vector<double> mu(probe.n, probe.mu);
      const std::vector<double> s2(probe.n, probe.sigma2);
      return selector == BoundSelector::ChiSqLower ? chisq_lower_tail_bound(mu, s2, t)
                                                   : chisq_upper_tail_bound(mu, s2, t);
    }
  }
  throw ArgumentError("analytic_bound: unknown selector");
}

BoundReport verify_bound(const TailProbe& probe, BoundSelector selector,
                         const BoundConstants& constants, std::uint64_t seed,
                         const EngineOptions& options) {
  if (!selector_matches(selector, probe)) {
    throw ArgumentError("verify_bound: bound '" + std::string(to_string(selector)) +
                        "' does not apply to the probe statistic");
  }
  BoundReport report_out;
  report_out.selector = selector;
  report_out.probe = resolve_probe(probe, seed, options);
  if (probe.t_grid.empty()) return report_out;
  const auto tail = empirical_tail(report_out.probe, seed, options);
  for (const auto& point : tail) {
    BoundCheck c;
    c.t = point.t;
    c.empirical = point.frequency;
    c.std_err = point.std_err;
    c.analytic = analytic_bound(selector, report_out.probe, point.t, constants);
    c.pass = c.empirical <= c.analytic + 3.0 * c.std_err;
    report_out.pass = report_out.pass && c.pass;
    report_out.checks.push_back(c);
  }
  return report_out;
}

std::vector<TailProbe> heavy_tail_reference_probes(std::size_t replications) {
  std::vector<TailProbe> probes;
  for (auto statistic : {TailStatistic::SumChiSq6, TailStatistic::SumChiSq4}) {
    for (std::size_t n : {10, 100}) {
      for (std::size_t m : {4, 16}) {
        TailProbe p;
        p.statistic = statistic;
        p.n = n;
        p.m = m;
        p.t_grid = {0.1, 0.3, 1.0};
        p.replications = replications;
        probes.push_back(p);
      }
    }
  }
  return probes;
}

HeavyTailCalibration calibrate_c_heavy(std::size_t replications, std::uint64_t seed,
                                       const EngineOptions& options) {
  HeavyTailCalibration cal;
  for (int e = -6; e <= 6; ++e) cal.grid.push_back(std::ldexp(1.0, e));

  struct Observed {
    BoundSelector selector;
    TailProbe probe;
    std::vector<TailPoint> tail;
  };
  std::vector<Observed> observed;
  const auto probes = heavy_tail_reference_probes(replications);
  for (std::size_t j = 0; j < probes.size(); ++j) {
    const auto selector = probes[j].statistic == TailStatistic::SumChiSq6
                              ? BoundSelector::HeavyTailQ3
                              : BoundSelector::HeavyTailQ2;
    const std::uint64_t probe_seed = derive_seed(seed, j, 0, StreamPurpose::Probe);
    observed.push_back({selector, probes[j], empirical_tail(probes[j], probe_seed, options)});
  }
  for (auto it = cal.grid.rbegin(); it != cal.grid.rend(); ++it) {
    BoundConstants constants;
    constants.c_heavy = *it;
    bool dominates = true;
    for (const auto& o : observed) {
      for (const auto& point : o.tail) {
        if (point.frequency > analytic_bound(o.selector, o.probe, point.t, constants)) {
          dominates = false;
        }
      }
    }
    if (dominates) {
      cal.found = true;
      cal.c_heavy = *it;
      break;
    }
  }
  return cal;
}

// ---------------------------------------------------------------------------
// Separation

SeparationSummary verify_separation(const ProblemConfig& config, double delta,
                                    std::size_t instances, const EngineOptions& options) {
  require_delta(delta, "verify_separation");
  config.validate();
  if (config.d * config.k > kSeparationPairLimit) {
    throw SizeError("verify_separation: d * k = " + std::to_string(config.d * config.k) +
                    " exceeds the limit of " + std::to_string(kSeparationPairLimit));
  }
  if (instances == 0) throw ArgumentError("verify_separation: instances must be >= 1");

  const SeparationParams params{config.k,     config.m,     config.sigma2,
                                config.x_min, config.x_max, union_log_term(config.d, delta)};
  std::vector<std::uint8_t> ok(instances, 0);
  parallel_for(instances, options.threads, [&](std::size_t j) {
    const TrialStreams streams(config.seed, j);
    const Support support = gen_support(config, streams);
    std::vector<ColumnNormSummary> columns(config.d);
    for (std::size_t i = 0; i < config.n; ++i) {
      Rng rng = streams.sample(i, StreamPurpose::Measurement);
      const Eigen::MatrixXd phi = draw_measurement_matrix(config.m, config.d, rng);
      for (std::size_t u = 0; u < config.d; ++u) {
        columns[u].add(phi.col(static_cast<Eigen::Index>(u)).squaredNorm());
      }
    }
    const auto outside = support.complement();
    bool all = true;
    for (auto u : support.indices()) {
      for (auto v : outside) {
        if (!separation_condition(columns[u], columns[v], params).satisfied) {
          all = false;
          break;
        }
      }
      if (!all) break;
    }
    ok[j] = all ? 1 : 0;
  });
  SeparationSummary s;
  s.instances = instances;
  s.satisfied = std::accumulate(ok.begin(), ok.end(), std::size_t{0});
  s.fraction = static_cast<double>(s.satisfied) / static_cast<double>(instances);
  return s;
}

SampleConstantCalibration calibrate_c_sample(const ProblemConfig& config, double delta,
                                             std::size_t instances, unsigned max_exponent,
                                             const EngineOptions& options) {
  require_delta(delta, "calibrate_c_sample");
  SampleConstantCalibration cal;
  for (unsigned e = 0; e <= max_exponent; ++e) {
    BoundConstants constants;
    constants.c_sample = std::ldexp(1.0, static_cast<int>(e));
    const SampleComplexityQuery q{config.k, config.m,     config.d,     delta,
                                  config.x_min, config.x_max, config.sigma2};
    ProblemConfig cfg = config;
    cfg.n = static_cast<std::size_t>(sample_complexity_upper(q, constants).n);
    const auto summary = verify_separation(cfg, delta, instances, options);
    std::ostringstream os;
    os << "c_sample=" << constants.c_sample << " n=" << cfg.n << " fraction=" << summary.fraction;
    report(options, os.str());
    if (summary.fraction >= 1.0 - delta) {
      cal.found = true;
      cal.c_sample = constants.c_sample;
      cal.n = cfg.n;
      cal.fraction = summary.fraction;
      return cal;
    }
  }
  return cal;
}

// ---------------------------------------------------------------------------
// Conditional moments and moment bounds

namespace {

// Xhat_iu = phi_u^T (sum_{v in S} x_v phi_v + w) with phi_u fixed and the
// remaining columns and w redrawn.
double redraw_proxy(const ProblemInstance& inst, std::size_t i, std::size_t u, Rng& rng) {
  const auto& cfg = inst.config;
  const Eigen::VectorXd fixed = inst.measurements.matrices[i].col(static_cast<Eigen::Index>(u));
  const auto& x = inst.signals.vectors[i];
  const auto m = static_cast<Eigen::Index>(cfg.m);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double col_scale = 1.0 / std::sqrt(static_cast<double>(cfg.m));
  const double sigma = std::sqrt(cfg.sigma2);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(m);
  for (auto v : inst.support.indices()) {
    const double xv = x[static_cast<Eigen::Index>(v)];
    if (v == u) {
      y += xv * fixed;
    } else {
      for (Eigen::Index r = 0; r < m; ++r) y[r] += xv * col_scale * normal(rng);
    }
  }
  for (Eigen::Index r = 0; r < m; ++r) y[r] += sigma * normal(rng);
  return fixed.dot(y);
}

}  // namespace

MomentEstimate empirical_proxy_moments(const ProblemInstance& instance, std::size_t sample,
                                       std::size_t u, std::size_t redraws, std::uint64_t seed,
                                       const EngineOptions& options) {
  if (sample >= instance.measurements.matrices.size() || u >= instance.config.d) {
    throw ArgumentError("empirical_proxy_moments: sample or coordinate out of range");
  }
  std::vector<double> values(redraws);
  parallel_for(redraws, options.threads, [&](std::size_t r) {
    Rng rng = TrialStreams(seed, r).sample(sample, StreamPurpose::Auxiliary);
    values[r] = redraw_proxy(instance, sample, u, rng);
  });
  return summarize(values);
}

MomentEstimate empirical_statistic_moments(const ProblemInstance& instance, std::size_t u,
                                           std::size_t redraws, std::uint64_t seed,
                                           const EngineOptions& options) {
  if (u >= instance.config.d) throw ArgumentError("empirical_statistic_moments: u out of range");
  const std::size_t n = instance.measurements.matrices.size();
  std::vector<double> values(redraws);
  parallel_for(redraws, options.threads, [&](std::size_t r) {
    const TrialStreams streams(seed, r);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      Rng rng = streams.sample(i, StreamPurpose::Auxiliary);
      const double xhat = redraw_proxy(instance, i, u, rng);
      sum += xhat * xhat;
    }
    values[r] = sum / static_cast<double>(n);
  });
  return summarize(values);
}

double empirical_cube_moment_norm(double p, std::size_t m, std::size_t draws,
                                  std::uint64_t seed, const EngineOptions& options) {
  return empirical_cube_sum_moment_norm(p, 1, m, draws, seed, options);
}

double empirical_cube_sum_moment_norm(double p, std::size_t n, std::size_t m,
                                      std::size_t replications, std::uint64_t seed,
                                      const EngineOptions& options) {
  if (!(p >= 1.0)) throw ArgumentError("moment norm: p must be >= 1");
  if (n == 0 || m == 0 || replications == 0) {
    throw ArgumentError("moment norm: n, m, replications must be >= 1");
  }
  const double mean_cube = chi_square_raw_moment(m, 3);
  constexpr std::size_t kBlock = 4096;
  const std::size_t blocks = (replications + kBlock - 1) / kBlock;
  std::vector<double> partial(blocks, 0.0);
  parallel_for(blocks, options.threads, [&](std::size_t b) {
    Rng rng = TrialStreams(seed, b).sample(0, StreamPurpose::Probe);
    std::chi_squared_distribution<double> chi(static_cast<double>(m));
    const std::size_t end = std::min(replications, (b + 1) * kBlock);
    double acc = 0.0;
    for (std::size_t r = b * kBlock; r < end; ++r) {
      double sum = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double v = chi(rng);
        sum += v * v * v - mean_cube;
      }
      acc += std::pow(std::abs(sum), p);
    }
    partial[b] = acc;
  });
  const double total = std::accumulate(partial.begin(), partial.end(), 0.0);
  return std::pow(total / static_cast<double>(replications), 1.0 / p);
}

}  // namespace suprec
