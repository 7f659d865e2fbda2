#include "suprec/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "suprec/errors.hpp"

namespace suprec {

Eigen::VectorXd proxy_sample(const Eigen::MatrixXd& phi, const Eigen::VectorXd& y) {
  return phi.transpose() * y;
}

StatisticAccumulator::StatisticAccumulator(std::size_t d)
    : sums_(Eigen::ArrayXd::Zero(static_cast<Eigen::Index>(d))) {}

void StatisticAccumulator::add(const Eigen::VectorXd& proxy) {
  sums_ += proxy.array().square();
  ++count_;
}

SupportStatistic StatisticAccumulator::statistic() const {
  if (count_ == 0) throw ArgumentError("support statistic needs at least one sample");
  return SupportStatistic{(sums_ / static_cast<double>(count_)).matrix()};
}

ProxySamples proxy_samples(const ProblemInstance& instance) {
  const auto& ms = instance.measurements;
  const auto n = static_cast<Eigen::Index>(ms.matrices.size());
  const auto d = static_cast<Eigen::Index>(instance.config.d);
  ProxySamples out{Eigen::MatrixXd(n, d)};
  for (Eigen::Index i = 0; i < n; ++i) {
    out.values.row(i) =
        proxy_sample(ms.matrices[static_cast<std::size_t>(i)],
                     ms.observations[static_cast<std::size_t>(i)])
            .transpose();
  }
  return out;
}

SupportStatistic support_statistic(const ProxySamples& proxies) {
  StatisticAccumulator acc(static_cast<std::size_t>(proxies.values.cols()));
  for (Eigen::Index i = 0; i < proxies.values.rows(); ++i) {
    acc.add(proxies.values.row(i).transpose());
  }
  return acc.statistic();
}

SupportEstimate top_k_support(const SupportStatistic& stat, std::size_t k) {
  const auto& lam = stat.lambda_tilde;
  const auto d = static_cast<std::size_t>(lam.size());
  if (k > d) {
    throw ArgumentError("top_k_support: k = " + std::to_string(k) + " exceeds d = " +
                        std::to_string(d));
  }
  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                    [&lam](std::size_t a, std::size_t b) {
                      const double va = lam[static_cast<Eigen::Index>(a)];
                      const double vb = lam[static_cast<Eigen::Index>(b)];
                      return va > vb || (va == vb && a < b);
                    });
  order.resize(k);
  std::sort(order.begin(), order.end());
  return SupportEstimate{std::move(order), EstimateMethod::TopK, 0.0};
}

SupportEstimate threshold_support(const SupportStatistic& stat, double tau) {
  SupportEstimate out{{}, EstimateMethod::Threshold, tau};
  for (Eigen::Index u = 0; u < stat.lambda_tilde.size(); ++u) {
    if (stat.lambda_tilde[u] >= tau) out.indices.push_back(static_cast<std::size_t>(u));
  }
  return out;
}

std::size_t binomial_saturating(std::size_t n, std::size_t r) noexcept {
  if (r > n) return 0;
  r = std::min(r, n - r);
  constexpr auto kMax = std::numeric_limits<std::size_t>::max();
  std::size_t result = 1;
  for (std::size_t j = 1; j <= r; ++j) {
    // result * (n - r + j) / j is exact at every step.
    const std::size_t factor = n - r + j;
    const std::size_t g = std::gcd(result, j);
    const std::size_t a = result / g;
    const std::size_t b = factor / (j / g);
    if (b != 0 && a > kMax / b) return kMax;
    result = a * b;
  }
  return result;
}

SupportEstimate exhaustive_decoder(const ProblemInstance& instance) {
  const auto& cfg = instance.config;
  const std::size_t d = cfg.d;
  const std::size_t k = cfg.k;
  const std::size_t subsets = binomial_saturating(d, k);
  if (subsets > kExhaustiveSubsetLimit) {
    throw SizeError("exhaustive_decoder: C(" + std::to_string(d) + ", " + std::to_string(k) +
                    ") subsets exceeds the limit of " +
                    std::to_string(kExhaustiveSubsetLimit));
  }
  const auto& ms = instance.measurements;

  double total_energy_y = 0.0;
  for (const auto& y : ms.observations) total_energy_y += y.squaredNorm();
  const double tie_tol = 1e-9 * std::max(total_energy_y, std::numeric_limits<double>::min());

  struct Score {
    double residual;
    double energy;
  };
  std::vector<std::vector<std::size_t>> candidates;
  std::vector<Score> scores;
  candidates.reserve(subsets);
  scores.reserve(subsets);

  std::vector<std::size_t> subset(k);
  std::iota(subset.begin(), subset.end(), std::size_t{0});
  const auto m = static_cast<Eigen::Index>(cfg.m);
  Eigen::MatrixXd phi_t(m, static_cast<Eigen::Index>(k));
  while (true) {
    Score s{0.0, 0.0};
    for (std::size_t i = 0; i < ms.matrices.size(); ++i) {
      for (std::size_t j = 0; j < k; ++j) {
        phi_t.col(static_cast<Eigen::Index>(j)) =
            ms.matrices[i].col(static_cast<Eigen::Index>(subset[j]));
      }
      const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(phi_t);
      const Eigen::VectorXd fit = cod.solve(ms.observations[i]);
      s.residual += (ms.observations[i] - phi_t * fit).squaredNorm();
      s.energy += fit.squaredNorm();
    }
    candidates.push_back(subset);
    scores.push_back(s);

    // Next subset in lexicographic order.
    std::size_t pos = k;
    while (pos > 0 && subset[pos - 1] == d - k + pos - 1) --pos;
    if (pos == 0) break;
    ++subset[pos - 1];
    for (std::size_t j = pos; j < k; ++j) subset[j] = subset[j - 1] + 1;
  }

  double best_residual = std::numeric_limits<double>::infinity();
  for (const auto& s : scores) best_residual = std::min(best_residual, s.residual);
  std::size_t best = scores.size();
  for (std::size_t c = 0; c < scores.size(); ++c) {
    if (scores[c].residual > best_residual + tie_tol) continue;
    if (best == scores.size() || scores[c].energy < scores[best].energy) best = c;
  }
  return SupportEstimate{candidates[best], EstimateMethod::Exhaustive, 0.0};
}

}  // namespace suprec
