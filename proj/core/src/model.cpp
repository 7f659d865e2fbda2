#include "suprec/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "suprec/errors.hpp"

namespace suprec {
namespace {

[[noreturn]] void config_error(std::string_view field, const std::string& what) {
  throw ConfigError("field '" + std::string(field) + "': " + what);
}

}  // namespace

std::string_view to_string(SignalMode mode) noexcept {
  switch (mode) {
    case SignalMode::ConstantMax: return "constant_max";
    case SignalMode::ConstantMin: return "constant_min";
    case SignalMode::UniformMagnitudeRandomSign: return "uniform_magnitude_random_sign";
    case SignalMode::FixedVector: return "fixed_vector";
  }
  return "?";
}

std::string_view to_string(SupportMode mode) noexcept {
  switch (mode) {
    case SupportMode::UniformRandom: return "uniform_random";
    case SupportMode::Fixed: return "fixed";
  }
  return "?";
}

SignalMode parse_signal_mode(std::string_view text) {
  for (auto mode : {SignalMode::ConstantMax, SignalMode::ConstantMin,
                    SignalMode::UniformMagnitudeRandomSign, SignalMode::FixedVector}) {
    if (text == to_string(mode)) return mode;
  }
  throw ConfigError("unknown signal_mode '" + std::string(text) +
                    "' (expected constant_max, constant_min, "
                    "uniform_magnitude_random_sign or fixed_vector)");
}

SupportMode parse_support_mode(std::string_view text) {
  if (text == "uniform_random") return SupportMode::UniformRandom;
  if (text == "fixed") return SupportMode::Fixed;
  throw ConfigError("unknown support_mode '" + std::string(text) +
                    "' (expected uniform_random or fixed)");
}

void ProblemConfig::validate() const {
  if (d < 1) config_error("d", "must be >= 1");
  if (k < 1 || k > d) config_error("k", "must satisfy 1 <= k <= d");
  if (m < 1) config_error("m", "must be >= 1");
  if (n < 1) config_error("n", "must be >= 1");
  if (!(x_min > 0.0) || !std::isfinite(x_min)) config_error("x_min", "must be finite and > 0");
  if (!(x_max >= x_min) || !std::isfinite(x_max)) config_error("x_max", "must be finite and >= x_min");
  if (!(sigma2 >= 0.0) || !std::isfinite(sigma2)) config_error("sigma2", "must be finite and >= 0");
  if (support_mode == SupportMode::Fixed) {
    if (fixed_support.size() != k) {
      config_error("fixed_support", "fixed support must list exactly k indices");
    }
    try {
      Support check(fixed_support, d);
    } catch (const ConfigError& e) {
      config_error("fixed_support", e.what());
    }
  }
  if (signal_mode == SignalMode::FixedVector) {
    if (fixed_pattern.size() != k) {
      config_error("fixed_pattern", "must list exactly k values");
    }
    for (double v : fixed_pattern) {
      const double a = std::abs(v);
      if (!(a >= x_min && a <= x_max)) {
        std::ostringstream os;
        os << "|" << v << "| outside [x_min, x_max]";
        config_error("fixed_pattern", os.str());
      }
    }
  }
}

Support::Support(std::vector<std::size_t> indices, std::size_t d)
    : indices_(std::move(indices)), d_(d) {
  std::sort(indices_.begin(), indices_.end());
  if (std::adjacent_find(indices_.begin(), indices_.end()) != indices_.end()) {
    throw ConfigError("support indices must be distinct");
  }
  if (!indices_.empty() && indices_.back() >= d) {
    throw ConfigError("support index " + std::to_string(indices_.back()) +
                      " out of range [0, " + std::to_string(d) + ")");
  }
}

bool Support::contains(std::size_t u) const noexcept {
  return std::binary_search(indices_.begin(), indices_.end(), u);
}

std::vector<std::size_t> Support::complement() const {
  std::vector<std::size_t> out;
  out.reserve(d_ - indices_.size());
  auto it = indices_.begin();
  for (std::size_t u = 0; u < d_; ++u) {
    if (it != indices_.end() && *it == u) {
      ++it;
    } else {
      out.push_back(u);
    }
  }
  return out;
}

bool SignalSet::satisfies(const ProblemConfig& config, const Support& support) const {
  if (vectors.size() != config.n) return false;
  for (const auto& x : vectors) {
    if (static_cast<std::size_t>(x.size()) != config.d) return false;
    for (std::size_t u = 0; u < config.d; ++u) {
      const double a = std::abs(x[static_cast<Eigen::Index>(u)]);
      if (support.contains(u)) {
        if (a < config.x_min || a > config.x_max) return false;
      } else if (a != 0.0) {
        return false;
      }
    }
  }
  return true;
}

bool MeasurementSet::consistent(const ProblemConfig& config, const SignalSet& signals) const {
  const auto n = config.n;
  if (matrices.size() != n || noises.size() != n || observations.size() != n ||
      signals.vectors.size() != n) {
    return false;
  }
  const auto m = static_cast<Eigen::Index>(config.m);
  const auto d = static_cast<Eigen::Index>(config.d);
  for (std::size_t i = 0; i < n; ++i) {
    if (matrices[i].rows() != m || matrices[i].cols() != d || noises[i].size() != m ||
        observations[i].size() != m) {
      return false;
    }
    const Eigen::VectorXd expected = matrices[i] * signals.vectors[i] + noises[i];
    const double scale = std::max(1.0, expected.norm());
    if ((expected - observations[i]).norm() > 1e-10 * scale) return false;
  }
  return true;
}

bool ProblemInstance::valid() const {
  return support.size() == config.k && support.dimension() == config.d &&
         signals.satisfies(config, support) && measurements.consistent(config, signals);
}

Eigen::VectorXd draw_signal(const ProblemConfig& config, const Support& support, Rng& rng) {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(config.d));
  const auto idx = support.indices();
  switch (config.signal_mode) {
    case SignalMode::ConstantMax:
      for (auto u : idx) x[static_cast<Eigen::Index>(u)] = config.x_max;
      break;
    case SignalMode::ConstantMin:
      for (auto u : idx) x[static_cast<Eigen::Index>(u)] = config.x_min;
      break;
    case SignalMode::UniformMagnitudeRandomSign: {
      std::uniform_real_distribution<double> magnitude(config.x_min, config.x_max);
      std::bernoulli_distribution negative(0.5);
      for (auto u : idx) {
        // uniform_real_distribution is half-open; x_max itself has measure zero.
        const double a = config.x_min == config.x_max ? config.x_min : magnitude(rng);
        x[static_cast<Eigen::Index>(u)] = negative(rng) ? -a : a;
      }
      break;
    }
    case SignalMode::FixedVector:
      for (std::size_t j = 0; j < idx.size(); ++j) {
        x[static_cast<Eigen::Index>(idx[j])] = config.fixed_pattern.at(j);
      }
      break;
  }
  return x;
}

Eigen::MatrixXd draw_measurement_matrix(std::size_t m, std::size_t d, Rng& rng) {
  Eigen::MatrixXd phi(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(d));
  std::normal_distribution<double> normal(0.0, 1.0);
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  double* data = phi.data();
  const std::size_t total = m * d;
  for (std::size_t j = 0; j < total; ++j) data[j] = scale * normal(rng);
  return phi;
}

Eigen::VectorXd draw_noise(std::size_t m, double sigma2, Rng& rng) {
  Eigen::VectorXd w(static_cast<Eigen::Index>(m));
  std::normal_distribution<double> normal(0.0, 1.0);
  const double sigma = std::sqrt(sigma2);
  for (Eigen::Index r = 0; r < w.size(); ++r) w[r] = sigma * normal(rng);
  return w;
}

Eigen::VectorXd observe(const Eigen::MatrixXd& phi, const Eigen::VectorXd& x,
                        const Eigen::VectorXd& w) {
  Eigen::VectorXd y = w;
  // Column-wise accumulation in index order, skipping exact zeros (off support).
  for (Eigen::Index u = 0; u < phi.cols(); ++u) {
    const double xu = x[u];
    if (xu != 0.0) y.noalias() += xu * phi.col(u);
  }
  return y;
}

Support gen_support(const ProblemConfig& config, const TrialStreams& streams) {
  if (config.support_mode == SupportMode::Fixed) {
    if (config.fixed_support.size() != config.k) {
      throw ConfigError("field 'fixed_support': fixed support must list exactly k indices");
    }
    return Support(config.fixed_support, config.d);
  }
  std::vector<std::size_t> all(config.d);
  std::iota(all.begin(), all.end(), std::size_t{0});
  std::vector<std::size_t> chosen;
  chosen.reserve(config.k);
  Rng rng = streams.support();
  std::sample(all.begin(), all.end(), std::back_inserter(chosen), config.k, rng);
  return Support(std::move(chosen), config.d);
}

SignalSet gen_signals(const ProblemConfig& config, const Support& support,
                      const TrialStreams& streams) {
  SignalSet out;
  out.vectors.reserve(config.n);
  for (std::size_t i = 0; i < config.n; ++i) {
    Rng rng = streams.sample(i, StreamPurpose::Signal);
    out.vectors.push_back(draw_signal(config, support, rng));
  }
  return out;
}

MeasurementSet gen_measurements(const ProblemConfig& config, const SignalSet& signals,
                                const TrialStreams& streams) {
  MeasurementSet out;
  out.matrices.reserve(config.n);
  out.noises.reserve(config.n);
  out.observations.reserve(config.n);
  for (std::size_t i = 0; i < config.n; ++i) {
    Rng phi_rng = streams.sample(i, StreamPurpose::Measurement);
    Rng noise_rng = streams.sample(i, StreamPurpose::Noise);
    out.matrices.push_back(draw_measurement_matrix(config.m, config.d, phi_rng));
    out.noises.push_back(draw_noise(config.m, config.sigma2, noise_rng));
    out.observations.push_back(
        observe(out.matrices.back(), signals.vectors.at(i), out.noises.back()));
  }
  return out;
}

ProblemInstance gen_instance(const ProblemConfig& config, std::uint64_t trial) {
  config.validate();
  const TrialStreams streams(config.seed, trial);
  ProblemInstance inst;
  inst.config = config;
  inst.support = gen_support(config, streams);
  inst.signals = gen_signals(config, inst.support, streams);
  inst.measurements = gen_measurements(config, inst.signals, streams);
  return inst;
}

}  // namespace suprec
