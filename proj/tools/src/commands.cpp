#include "commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <sstream>

#include "csv.hpp"
#include "suprec/errors.hpp"
#include "suprec/serialize.hpp"

namespace suprec::cli {
namespace {

using Row = std::vector<std::string>;

std::string header_block(std::string_view command, const ExperimentConfig& config,
                         const std::vector<std::string>& notes = {}) {
  std::string text = "suprec " + std::string(command) + "\n\n" + render_experiment_config(config);
  if (!notes.empty()) {
    text += '\n';
    for (const auto& n : notes) text += n + '\n';
  }
  return comment_block(text);
}

bool outside_regime(std::size_t m, std::size_t d, double delta) {
  return static_cast<double>(m) < 2.0 * std::log(static_cast<double>(d) / delta);
}

std::string regime_note(std::size_t m, std::size_t d, double delta) {
  return "outside_regime: m = " + format_int(m) + " < 2 log(d/delta) = " +
         format_real(2.0 * std::log(static_cast<double>(d) / delta));
}

}  // namespace

// ---------------------------------------------------------------------------

CommandResult cmd_trial(const ExperimentConfig& config, const EngineOptions& engine) {
  config.validate();
  const auto& p = config.problem;
  const SuccessEstimate e = estimate_success(p, config.trials, engine);
  CommandResult r;
  r.text = header_block("trial", config);
  r.text += "d,k,m,n,sigma2,x_min,x_max,signal_mode,trials,successes,rate,ci_low,ci_high,"
            "master_seed\n";
  const Row row{format_int(p.d),       format_int(p.k),         format_int(p.m),
                format_int(p.n),       format_real(p.sigma2),   format_real(p.x_min),
                format_real(p.x_max),  std::string(to_string(p.signal_mode)),
                format_int(e.trials),  format_int(e.successes), format_real(e.rate),
                format_real(e.ci_low), format_real(e.ci_high),  format_int(p.seed)};
  r.text += csv_row(row);
  return r;
}

CommandResult cmd_sweep(const ExperimentConfig& config, const EngineOptions& engine) {
  config.validate();
  if (config.sweep.m_list.empty()) {
    throw ConfigError("field 'sweep.m_list': must list at least one m");
  }
  const auto& p = config.problem;
  const auto records = sweep_phase_transition(p, config.sweep.m_list, config.delta,
                                              config.trials, config.sweep.n_max, engine);
  std::vector<std::string> notes;
  for (const auto& rec : records) {
    if (rec.outside_regime) notes.push_back(regime_note(rec.m, rec.d, rec.delta));
  }
  CommandResult r;
  r.text = header_block("sweep", config, notes);
  r.text += "d,k,m,k_over_m,delta,nstar,found,trials,master_seed\n";
  for (const auto& rec : records) {
    const Row row{format_int(rec.d),
                  format_int(rec.k),
                  format_int(rec.m),
                  format_fixed(rec.k_over_m(), 6),
                  format_real(rec.delta),
                  rec.nstar ? format_int(*rec.nstar) : std::string{},
                  rec.nstar ? "1" : "0",
                  format_int(rec.trials),
                  format_int(rec.master_seed)};
    r.text += csv_row(row);
  }

  const auto fit = fit_loglog_slope(records, config.sweep.fit_low, config.sweep.fit_high);
  r.summary = header_block("sweep summary", config);
  r.summary += "fit_low,fit_high,points,slope,intercept,master_seed\n";
  const Row row{format_real(config.sweep.fit_low), format_real(config.sweep.fit_high),
                format_int(fit ? fit->points : 0),
                fit ? format_real(fit->slope) : std::string{},
                fit ? format_real(fit->intercept) : std::string{}, format_int(p.seed)};
  r.summary += csv_row(row);
  return r;
}

CommandResult cmd_nstar(const ExperimentConfig& config, const EngineOptions& engine) {
  config.validate();
  const auto& p = config.problem;
  const NStarResult res = find_nstar(p, config.delta, config.trials, config.nstar.n_max, engine);
  std::vector<std::string> notes;
  if (outside_regime(p.m, p.d, config.delta)) notes.push_back(regime_note(p.m, p.d, config.delta));
  CommandResult r;
  r.text = header_block("nstar", config, notes);
  r.text += "d,k,m,k_over_m,delta,nstar,found,trials,rate,rate_below,last_n,last_rate,"
            "master_seed\n";
  const Row row{format_int(p.d),
                format_int(p.k),
                format_int(p.m),
                format_fixed(static_cast<double>(p.k) / static_cast<double>(p.m), 6),
                format_real(config.delta),
                res.found ? format_int(res.nstar) : std::string{},
                res.found ? "1" : "0",
                format_int(config.trials),
                res.found ? format_real(res.rate) : std::string{},
                res.found ? format_real(res.rate_below) : std::string{},
                format_int(res.last_n),
                format_real(res.last_rate),
                format_int(p.seed)};
  r.text += csv_row(row);
  return r;
}

CommandResult cmd_verify_bounds(const ExperimentConfig& config, const EngineOptions& engine) {
  config.validate();
  const auto& vb = config.verify_bounds;
  const std::uint64_t seed = config.problem.seed;
  BoundConstants constants = config.constants;
  std::vector<std::string> notes;
  if (config.c_heavy_auto) {
    const auto cal = calibrate_c_heavy(vb.calibration_replications,
                                       derive_seed(seed, 0, 0, StreamPurpose::Auxiliary), engine);
    constants.c_heavy = cal.found ? cal.c_heavy : cal.grid.front();
    notes.push_back(cal.found ? "calibrated c_heavy = " + format_real(cal.c_heavy)
                              : "c_heavy calibration found no dominating value; using " +
                                    format_real(constants.c_heavy));
  }

  struct Job {
    BoundSelector selector;
    TailProbe probe;
  };
  std::vector<Job> jobs;
  for (const auto& name : vb.lemmas) {
    const BoundSelector selector = parse_bound_selector(name);
    const bool chisq =
        selector == BoundSelector::ChiSqLower || selector == BoundSelector::ChiSqUpper;
    if (chisq) {
      for (auto n : vb.chisq_n_list) {
        for (auto mu : vb.chisq_mu_list) {
          TailProbe p;
          p.statistic = TailStatistic::NoncentralChiSqMean;
          p.side = selector == BoundSelector::ChiSqLower ? TailSide::Lower : TailSide::Upper;
          p.n = n;
          p.mu = mu;
          p.sigma2 = vb.chisq_sigma2;
          p.t_grid = vb.chisq_t_grid;
          p.replications = vb.replications;
          jobs.push_back({selector, p});
        }
      }
    } else {
      const TailStatistic statistic = selector == BoundSelector::HeavyTailQ3
                                          ? TailStatistic::SumChiSq6
                                      : selector == BoundSelector::HeavyTailQ2
                                          ? TailStatistic::SumChiSq4
                                          : TailStatistic::MaxChiSq;
      for (auto n : vb.n_list) {
        for (auto m : vb.m_list) {
          TailProbe p;
          p.statistic = statistic;
          p.n = n;
          p.m = m;
          p.t_grid = vb.t_grid;
          p.replications = vb.replications;
          jobs.push_back({selector, p});
        }
      }
    }
  }

  std::string rows;
  bool all_pass = true;
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    const auto& job = jobs[j];
    const auto report = verify_bound(job.probe, job.selector, constants,
                                     derive_seed(seed, j, 0, StreamPurpose::Probe), engine);
    all_pass = all_pass && report.pass;
    std::string label(to_string(job.selector));
    std::string m_field = format_int(report.probe.m);
    if (job.probe.statistic == TailStatistic::NoncentralChiSqMean) {
      label += ":mu=" + format_real(report.probe.mu) + ":sigma2=" + format_real(report.probe.sigma2);
      m_field.clear();
    } else if (job.probe.statistic == TailStatistic::MaxChiSq) {
      label += ":mu_max=" + format_real(*report.probe.mu_max);
    }
    for (const auto& c : report.checks) {
      const Row row{label,
                    format_int(report.probe.n),
                    m_field,
                    format_real(c.t),
                    format_real(c.empirical),
                    format_real(c.std_err),
                    format_real(c.analytic),
                    c.pass ? "1" : "0"};
      rows += csv_row(row);
    }
    if (engine.progress) {
      engine.progress(label + " n=" + format_int(report.probe.n) +
                      (report.pass ? " pass" : " FAIL"));
    }
  }

  CommandResult r;
  r.text = header_block("verify-bounds", config, notes);
  r.text += "lemma,n,m,t,empirical,std_err,analytic,pass\n";
  r.text += rows;
  r.exit_code = all_pass ? kExitOk : kExitVerificationFailed;
  return r;
}

CommandResult cmd_verify_separation(const ExperimentConfig& config,
                                    const EngineOptions& engine) {
  config.validate();
  const auto& vs = config.verify_separation;
  ProblemConfig problem = config.problem;
  BoundConstants constants = config.constants;
  std::vector<std::string> notes;
  if (config.c_sample_auto) {
    // Calibrate on instances independent of the ones verified below.
    ProblemConfig cal_problem = problem;
    cal_problem.seed = derive_seed(problem.seed, 0, 0, StreamPurpose::Auxiliary);
    const auto cal =
        calibrate_c_sample(cal_problem, config.delta, vs.instances, vs.max_exponent, engine);
    if (!cal.found) {
      throw ConfigError("field 'c_sample': calibration found no value up to 2^" +
                        std::to_string(vs.max_exponent));
    }
    constants.c_sample = cal.c_sample;
    notes.push_back("calibrated c_sample = " + format_real(cal.c_sample) + " (n = " +
                    format_int(cal.n) + ", fraction = " + format_real(cal.fraction) + ")");
  }
  const SampleComplexityQuery query{problem.k,     problem.m,     problem.d,     config.delta,
                                    problem.x_min, problem.x_max, problem.sigma2};
  const SampleComplexity formula = sample_complexity_upper(query, constants);
  if (vs.n_factor > 0.0) {
    problem.n = static_cast<std::size_t>(
        std::max(1.0, std::ceil(vs.n_factor * static_cast<double>(formula.n))));
    notes.push_back("n = ceil(" + format_real(vs.n_factor) + " * " + format_int(formula.n) +
                    ") = " + format_int(problem.n));
  }
  if (formula.outside_regime) notes.push_back(regime_note(problem.m, problem.d, config.delta));

  const SeparationSummary s = verify_separation(problem, config.delta, vs.instances, engine);
  CommandResult r;
  r.text = header_block("verify-separation", config, notes);
  r.text += "d,k,m,n,delta,c_sample,instances,satisfied,fraction,outside_regime,master_seed\n";
  const Row row{format_int(problem.d),        format_int(problem.k),
                format_int(problem.m),        format_int(problem.n),
                format_real(config.delta),    format_real(constants.c_sample),
                format_int(s.instances),      format_int(s.satisfied),
                format_real(s.fraction),      formula.outside_regime ? "1" : "0",
                format_int(problem.seed)};
  r.text += csv_row(row);
  return r;
}

CommandResult cmd_generate(const ExperimentConfig& config) {
  config.validate();
  CommandResult r;
  r.text = dump_instance(gen_instance(config.problem, config.generate.trial));
  r.text += '\n';
  return r;
}

// ---------------------------------------------------------------------------
// bounds-eval

namespace {

struct Arg {
  std::string name;
  bool integer = false;
  std::optional<double> fallback;  // nullopt: required
};

using ArgValues = std::map<std::string, double, std::less<>>;

struct BoundSpec {
  std::vector<Arg> args;
  std::function<Row(const ArgValues&)> eval;  // value [, regime_warning]
};

std::size_t as_size(double v, const std::string& name) {
  if (!(v >= 0.0) || v != std::floor(v) || v > 1e15) {
    throw ConfigError("argument '" + name + "': expected a nonnegative integer");
  }
  return static_cast<std::size_t>(v);
}

std::vector<double> repeat(double v, std::size_t n) { return std::vector<double>(n, v); }

const std::vector<std::pair<std::string_view, BoundSpec>>& bound_table() {
  static const std::vector<std::pair<std::string_view, BoundSpec>> table = [] {
    std::vector<std::pair<std::string_view, BoundSpec>> t;
    t.emplace_back(
        "sample_complexity_upper",
        BoundSpec{{{"k", true, {}},
                   {"m", true, {}},
                   {"d", true, {}},
                   {"delta", false, {}},
                   {"x_min", false, 1.0},
                   {"x_max", false, 1.0},
                   {"sigma2", false, 0.0},
                   {"c_sample", false, 1.0}},
                  [](const ArgValues& a) {
                    BoundConstants c;
                    c.c_sample = a.at("c_sample");
                    c.validate();
                    const SampleComplexityQuery q{as_size(a.at("k"), "k"),
                                                  as_size(a.at("m"), "m"),
                                                  as_size(a.at("d"), "d"),
                                                  a.at("delta"),
                                                  a.at("x_min"),
                                                  a.at("x_max"),
                                                  a.at("sigma2")};
                    const auto s = sample_complexity_upper(q, c);
                    return Row{format_int(s.n), s.outside_regime ? "1" : "0"};
                  }});
    const auto chisq_args = std::vector<Arg>{
        {"n", true, 1.0}, {"mu", false, 0.0}, {"sigma2", false, 1.0}, {"t", false, {}}};
    t.emplace_back("chisq_upper_tail",
                   BoundSpec{chisq_args, [](const ArgValues& a) {
                               const auto n = as_size(a.at("n"), "n");
                               return Row{format_real(chisq_upper_tail_bound(
                                   repeat(a.at("mu"), n), repeat(a.at("sigma2"), n),
                                   a.at("t")))};
                             }});
    t.emplace_back("chisq_lower_tail",
                   BoundSpec{chisq_args, [](const ArgValues& a) {
                               const auto n = as_size(a.at("n"), "n");
                               return Row{format_real(chisq_lower_tail_bound(
                                   repeat(a.at("mu"), n), repeat(a.at("sigma2"), n),
                                   a.at("t")))};
                             }});
    const auto heavy_args = std::vector<Arg>{
        {"n", true, 1.0}, {"m", true, 1.0}, {"t", false, {}}, {"c_heavy", false, 1.0}};
    t.emplace_back("heavy_q3", BoundSpec{heavy_args, [](const ArgValues& a) {
                                           BoundConstants c;
                                           c.c_heavy = a.at("c_heavy");
                                           c.validate();
                                           return Row{format_real(heavy_tail_bound_q3(
                                               as_size(a.at("n"), "n"),
                                               as_size(a.at("m"), "m"), a.at("t"), c))};
                                         }});
    t.emplace_back("heavy_q2", BoundSpec{heavy_args, [](const ArgValues& a) {
                                           BoundConstants c;
                                           c.c_heavy = a.at("c_heavy");
                                           c.validate();
                                           return Row{format_real(heavy_tail_bound_q2(
                                               as_size(a.at("n"), "n"),
                                               as_size(a.at("m"), "m"), a.at("t"), c))};
                                         }});
    t.emplace_back("max_chisq",
                   BoundSpec{{{"n", true, 1.0},
                              {"m", true, 1.0},
                              {"mu_max", false, 1.0},
                              {"t", false, {}}},
                             [](const ArgValues& a) {
                               return Row{format_real(max_chisq_bound(
                                   as_size(a.at("n"), "n"), as_size(a.at("m"), "m"),
                                   a.at("mu_max"), a.at("t")))};
                             }});
    t.emplace_back("rosenthal",
                   BoundSpec{{{"p", false, 2.0},
                              {"n", true, 1.0},
                              {"lp_norm", false, {}},
                              {"l2_norm", false, {}},
                              {"rosenthal_c", false, 1.0}},
                             [](const ArgValues& a) {
                               BoundConstants c;
                               c.rosenthal_c = a.at("rosenthal_c");
                               c.validate();
                               return Row{format_real(rosenthal_bound(
                                   a.at("p"), as_size(a.at("n"), "n"), a.at("lp_norm"),
                                   a.at("l2_norm"), c))};
                             }});
    t.emplace_back("chisq_cube_moment",
                   BoundSpec{{{"p", false, {}}, {"m", true, {}}}, [](const ArgValues& a) {
                               return Row{format_real(
                                   chisq_cube_moment_bound(a.at("p"), as_size(a.at("m"), "m")))};
                             }});
    return t;
  }();
  return table;
}

}  // namespace

std::vector<std::string_view> bound_names() {
  std::vector<std::string_view> names;
  for (const auto& [name, spec] : bound_table()) names.push_back(name);
  return names;
}

CommandResult cmd_bounds_eval(std::string_view name, std::span<const std::string> args) {
  const auto& table = bound_table();
  const auto it = std::find_if(table.begin(), table.end(),
                               [&](const auto& entry) { return entry.first == name; });
  if (it == table.end()) {
    std::string valid;
    for (auto n : bound_names()) valid += (valid.empty() ? "" : ", ") + std::string(n);
    throw ConfigError("unknown bound '" + std::string(name) + "'; valid names: " + valid);
  }
  const BoundSpec& spec = it->second;

  ArgValues values;
  std::optional<double> sigma;
  for (const auto& raw : args) {
    const auto eq = raw.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("argument '" + raw + "': expected key=value");
    }
    const std::string key = raw.substr(0, eq);
    const std::string_view text = std::string_view(raw).substr(eq + 1);
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || !std::isfinite(v)) {
      throw ConfigError("argument '" + key + "': expected a finite number, got '" +
                        std::string(text) + "'");
    }
    const bool known = std::any_of(spec.args.begin(), spec.args.end(),
                                   [&](const Arg& a) { return a.name == key; });
    // Standard deviation is accepted as a convenience wherever sigma2 is.
    if (key == "sigma" && std::any_of(spec.args.begin(), spec.args.end(),
                                      [](const Arg& a) { return a.name == "sigma2"; })) {
      sigma = v;
      continue;
    }
    if (!known) {
      std::string valid;
      for (const auto& a : spec.args) valid += (valid.empty() ? "" : ", ") + a.name;
      throw ConfigError("argument '" + key + "' is not accepted by " + std::string(name) +
                        " (accepted: " + valid + ")");
    }
    if (!values.emplace(key, v).second) {
      throw ConfigError("argument '" + key + "' given twice");
    }
  }
  if (sigma) {
    if (values.count("sigma2")) throw ConfigError("give either sigma or sigma2, not both");
    values["sigma2"] = *sigma * *sigma;
  }

  Row header{"bound"};
  Row row{std::string(name)};
  for (const auto& a : spec.args) {
    auto v = values.find(a.name);
    if (v == values.end()) {
      if (!a.fallback) throw ConfigError("argument '" + a.name + "' is required");
      v = values.emplace(a.name, *a.fallback).first;
    }
    header.push_back(a.name);
    row.push_back(a.integer ? format_int(as_size(v->second, a.name)) : format_real(v->second));
  }
  const Row result = spec.eval(values);
  header.push_back("value");
  if (result.size() > 1) header.push_back("regime_warning");
  row.insert(row.end(), result.begin(), result.end());

  CommandResult r;
  r.text = csv_row(header) + csv_row(row);
  return r;
}

}  // namespace suprec::cli
