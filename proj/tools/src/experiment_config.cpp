#include "experiment_config.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include "csv.hpp"
#include "ini.hpp"
#include "suprec/errors.hpp"
#include "suprec/montecarlo.hpp"

namespace suprec::cli {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

std::uint64_t parse_u64(std::string_view s) {
  std::uint64_t v = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) {
    throw ConfigError("expected a nonnegative integer, got '" + std::string(s) + "'");
  }
  return v;
}

std::size_t parse_size(std::string_view s) { return static_cast<std::size_t>(parse_u64(s)); }

double parse_real(std::string_view s) {
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc{} || r.ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw ConfigError("expected a finite real number, got '" + std::string(s) + "'");
  }
  return v;
}

template <class F>
auto parse_list(std::string_view s, F&& item) {
  std::vector<decltype(item(s))> out;
  s = trim(s);
  if (s.empty()) return out;
  while (true) {
    const auto comma = s.find(',');
    out.push_back(item(trim(s.substr(0, comma))));
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

std::string str(std::string_view s) { return std::string(s); }

template <class T, class F>
std::string join(const std::vector<T>& values, F&& fmt) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += fmt(values[i]);
  }
  return out;
}

using Setter = std::function<void(ExperimentConfig&, std::string_view)>;
using SectionTable = std::map<std::string, Setter, std::less<>>;

const std::map<std::string, SectionTable, std::less<>>& schema() {
  static const std::map<std::string, SectionTable, std::less<>> table = {
      {"problem",
       {
           {"d", [](auto& c, auto v) { c.problem.d = parse_size(v); }},
           {"k", [](auto& c, auto v) { c.problem.k = parse_size(v); }},
           {"m", [](auto& c, auto v) { c.problem.m = parse_size(v); }},
           {"n", [](auto& c, auto v) { c.problem.n = parse_size(v); }},
           {"x_min", [](auto& c, auto v) { c.problem.x_min = parse_real(v); }},
           {"x_max", [](auto& c, auto v) { c.problem.x_max = parse_real(v); }},
           {"sigma2", [](auto& c, auto v) { c.problem.sigma2 = parse_real(v); }},
           {"signal_mode", [](auto& c, auto v) { c.problem.signal_mode = parse_signal_mode(v); }},
           {"support_mode",
            [](auto& c, auto v) { c.problem.support_mode = parse_support_mode(v); }},
           {"fixed_support",
            [](auto& c, auto v) { c.problem.fixed_support = parse_list(v, parse_size); }},
           {"fixed_pattern",
            [](auto& c, auto v) { c.problem.fixed_pattern = parse_list(v, parse_real); }},
           {"seed", [](auto& c, auto v) { c.problem.seed = parse_u64(v); }},
       }},
      {"experiment",
       {
           {"delta", [](auto& c, auto v) { c.delta = parse_real(v); }},
           {"trials", [](auto& c, auto v) { c.trials = parse_size(v); }},
       }},
      {"constants",
       {
           {"c_heavy",
            [](auto& c, auto v) {
              c.c_heavy_auto = v == "auto";
              if (!c.c_heavy_auto) c.constants.c_heavy = parse_real(v);
            }},
           {"c_sample",
            [](auto& c, auto v) {
              c.c_sample_auto = v == "auto";
              if (!c.c_sample_auto) c.constants.c_sample = parse_real(v);
            }},
           {"rosenthal_c", [](auto& c, auto v) { c.constants.rosenthal_c = parse_real(v); }},
       }},
      {"sweep",
       {
           {"m_list", [](auto& c, auto v) { c.sweep.m_list = parse_list(v, parse_size); }},
           {"n_max", [](auto& c, auto v) { c.sweep.n_max = parse_size(v); }},
           {"fit_low", [](auto& c, auto v) { c.sweep.fit_low = parse_real(v); }},
           {"fit_high", [](auto& c, auto v) { c.sweep.fit_high = parse_real(v); }},
           {"summary_out", [](auto& c, auto v) { c.sweep.summary_out = str(v); }},
       }},
      {"nstar",
       {
           {"n_max", [](auto& c, auto v) { c.nstar.n_max = parse_size(v); }},
       }},
      {"verify-bounds",
       {
           {"lemmas", [](auto& c, auto v) { c.verify_bounds.lemmas = parse_list(v, str); }},
           {"n_list", [](auto& c, auto v) { c.verify_bounds.n_list = parse_list(v, parse_size); }},
           {"m_list", [](auto& c, auto v) { c.verify_bounds.m_list = parse_list(v, parse_size); }},
           {"t_grid", [](auto& c, auto v) { c.verify_bounds.t_grid = parse_list(v, parse_real); }},
           {"chisq_n_list",
            [](auto& c, auto v) { c.verify_bounds.chisq_n_list = parse_list(v, parse_size); }},
           {"chisq_mu_list",
            [](auto& c, auto v) { c.verify_bounds.chisq_mu_list = parse_list(v, parse_real); }},
           {"chisq_sigma2", [](auto& c, auto v) { c.verify_bounds.chisq_sigma2 = parse_real(v); }},
           {"chisq_t_grid",
            [](auto& c, auto v) { c.verify_bounds.chisq_t_grid = parse_list(v, parse_real); }},
           {"replications",
            [](auto& c, auto v) { c.verify_bounds.replications = parse_size(v); }},
           {"calibration_replications",
            [](auto& c, auto v) { c.verify_bounds.calibration_replications = parse_size(v); }},
       }},
      {"verify-separation",
       {
           {"instances", [](auto& c, auto v) { c.verify_separation.instances = parse_size(v); }},
           {"n_factor", [](auto& c, auto v) { c.verify_separation.n_factor = parse_real(v); }},
           {"max_exponent",
            [](auto& c, auto v) {
              c.verify_separation.max_exponent = static_cast<unsigned>(parse_size(v));
            }},
       }},
      {"generate",
       {
           {"trial", [](auto& c, auto v) { c.generate.trial = parse_u64(v); }},
       }},
  };
  return table;
}

void require(bool ok, const char* field, const std::string& message) {
  if (!ok) throw ConfigError(std::string("field '") + field + "': " + message);
}

}  // namespace

void ExperimentConfig::validate() const {
  problem.validate();
  require(delta > 0.0 && delta < 1.0, "delta", "must lie in (0, 1)");
  require(trials >= 1, "trials", "must be >= 1");
  constants.validate();
  for (auto m : sweep.m_list) require(m >= 1, "sweep.m_list", "entries must be >= 1");
  require(sweep.n_max >= 1, "sweep.n_max", "must be >= 1");
  require(sweep.fit_low > 0.0 && sweep.fit_low <= sweep.fit_high, "sweep.fit_low",
          "need 0 < fit_low <= fit_high");
  require(nstar.n_max >= 1, "nstar.n_max", "must be >= 1");

  const auto& vb = verify_bounds;
  for (const auto& name : vb.lemmas) parse_bound_selector(name);
  for (auto n : vb.n_list) require(n >= 1, "verify-bounds.n_list", "entries must be >= 1");
  for (auto m : vb.m_list) require(m >= 1, "verify-bounds.m_list", "entries must be >= 1");
  for (auto n : vb.chisq_n_list) {
    require(n >= 1, "verify-bounds.chisq_n_list", "entries must be >= 1");
  }
  for (auto t : vb.t_grid) require(t >= 0.0, "verify-bounds.t_grid", "entries must be >= 0");
  for (auto t : vb.chisq_t_grid) {
    require(t >= 0.0, "verify-bounds.chisq_t_grid", "entries must be >= 0");
  }
  require(vb.chisq_sigma2 > 0.0, "verify-bounds.chisq_sigma2", "must be > 0");
  require(vb.replications >= 1, "verify-bounds.replications", "must be >= 1");
  require(vb.calibration_replications >= 1, "verify-bounds.calibration_replications",
          "must be >= 1");

  require(verify_separation.instances >= 1, "verify-separation.instances", "must be >= 1");
  require(verify_separation.n_factor >= 0.0, "verify-separation.n_factor", "must be >= 0");
  require(verify_separation.max_exponent <= 30, "verify-separation.max_exponent",
          "must be <= 30");
}

ExperimentConfig parse_experiment_config(std::string_view text) {
  ExperimentConfig config;
  for (const auto& e : parse_ini(text)) {
    const auto& sections = schema();
    const auto section = sections.find(e.section);
    const std::string where = "line " + std::to_string(e.line) + ": ";
    if (section == sections.end()) {
      throw ConfigError(where + "unknown section [" + e.section + "]");
    }
    const auto setter = section->second.find(e.key);
    if (setter == section->second.end()) {
      throw ConfigError(where + "unknown key '" + e.key + "' in [" + e.section + "]");
    }
    try {
      setter->second(config, e.value);
    } catch (const ConfigError& err) {
      throw ConfigError(where + "field '" + e.key + "': " + err.what());
    }
  }
  config.validate();
  return config;
}

std::string render_experiment_config(const ExperimentConfig& c) {
  const auto real = [](double v) { return format_real(v); };
  const auto integer = [](std::size_t v) { return format_int(v); };
  std::ostringstream os;
  const auto& p = c.problem;
  os << "[problem]\n"
     << "d = " << p.d << "\nk = " << p.k << "\nm = " << p.m << "\nn = " << p.n
     << "\nx_min = " << real(p.x_min) << "\nx_max = " << real(p.x_max)
     << "\nsigma2 = " << real(p.sigma2) << "\nsignal_mode = " << to_string(p.signal_mode)
     << "\nsupport_mode = " << to_string(p.support_mode)
     << "\nfixed_support = " << join(p.fixed_support, integer)
     << "\nfixed_pattern = " << join(p.fixed_pattern, real) << "\nseed = " << p.seed << "\n\n";
  os << "[experiment]\ndelta = " << real(c.delta) << "\ntrials = " << c.trials << "\n\n";
  os << "[constants]\nc_heavy = " << (c.c_heavy_auto ? "auto" : real(c.constants.c_heavy))
     << "\nc_sample = " << (c.c_sample_auto ? "auto" : real(c.constants.c_sample))
     << "\nrosenthal_c = " << real(c.constants.rosenthal_c) << "\n\n";
  os << "[sweep]\nm_list = " << join(c.sweep.m_list, integer) << "\nn_max = " << c.sweep.n_max
     << "\nfit_low = " << real(c.sweep.fit_low) << "\nfit_high = " << real(c.sweep.fit_high)
     << "\nsummary_out = " << c.sweep.summary_out << "\n\n";
  os << "[nstar]\nn_max = " << c.nstar.n_max << "\n\n";
  const auto& vb = c.verify_bounds;
  os << "[verify-bounds]\nlemmas = " << join(vb.lemmas, [](const std::string& s) { return s; })
     << "\nn_list = " << join(vb.n_list, integer) << "\nm_list = " << join(vb.m_list, integer)
     << "\nt_grid = " << join(vb.t_grid, real)
     << "\nchisq_n_list = " << join(vb.chisq_n_list, integer)
     << "\nchisq_mu_list = " << join(vb.chisq_mu_list, real)
     << "\nchisq_sigma2 = " << real(vb.chisq_sigma2)
     << "\nchisq_t_grid = " << join(vb.chisq_t_grid, real)
     << "\nreplications = " << vb.replications
     << "\ncalibration_replications = " << vb.calibration_replications << "\n\n";
  os << "[verify-separation]\ninstances = " << c.verify_separation.instances
     << "\nn_factor = " << real(c.verify_separation.n_factor)
     << "\nmax_exponent = " << c.verify_separation.max_exponent << "\n\n";
  os << "[generate]\ntrial = " << c.generate.trial << "\n";
  return os.str();
}

}  // namespace suprec::cli
