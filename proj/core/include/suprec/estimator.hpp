#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "suprec/model.hpp"

namespace suprec {

/// n x d matrix of proxy samples: row i holds Phi_i^T Y_i.
struct ProxySamples {
  Eigen::MatrixXd values;
};

/// Per-coordinate sample second moment of the proxies.
struct SupportStatistic {
  Eigen::VectorXd lambda_tilde;
};

enum class EstimateMethod { TopK, Threshold, Exhaustive };

struct SupportEstimate {
  std::vector<std::size_t> indices;  // increasing
  EstimateMethod method = EstimateMethod::TopK;
  double tau = 0.0;                  // meaningful for Threshold only
};

/// Phi^T y for one sample.
Eigen::VectorXd proxy_sample(const Eigen::MatrixXd& phi, const Eigen::VectorXd& y);

/// Running sum of squared proxies in sample-index order. Both the batch path
/// (support_statistic) and the streaming path in the Monte Carlo engine use
/// this, so their statistics agree bit for bit.
class StatisticAccumulator {
 public:
  explicit StatisticAccumulator(std::size_t d);

  void add(const Eigen::VectorXd& proxy);
  [[nodiscard]] std::size_t count() const noexcept { return count_; }
  /// (1/n) sum_i proxy_iu^2. Requires count() >= 1.
  [[nodiscard]] SupportStatistic statistic() const;

 private:
  Eigen::ArrayXd sums_;
  std::size_t count_ = 0;
};

ProxySamples proxy_samples(const ProblemInstance& instance);
SupportStatistic support_statistic(const ProxySamples& proxies);

/// The k largest entries; ties go to the lowest index. Throws ArgumentError if k > d.
SupportEstimate top_k_support(const SupportStatistic& stat, std::size_t k);

/// Every u with lambda_u >= tau.
SupportEstimate threshold_support(const SupportStatistic& stat, double tau);

/// Largest C(d, k) the exhaustive decoder accepts.
inline constexpr std::size_t kExhaustiveSubsetLimit = 1'000'000;

/// Exhaustive least-squares decoder over all size-k subsets T.
///
/// Primary criterion: total residual sum_i ||Y_i - Phi_{i,T} xhat_{i,T}||^2,
/// xhat the minimum-norm least-squares fit. Residuals within 1e-9 * sum_i ||Y_i||^2
/// of the minimum count as tied; ties are broken by the total fit energy
/// sum_i ||xhat_{i,T}||^2 (the vanishing-ridge limit), then lexicographically.
/// The energy rule is what makes the decoder informative when m <= k, where
/// every subset fits the data exactly.
///
/// Throws SizeError when C(d, k) exceeds kExhaustiveSubsetLimit.
SupportEstimate exhaustive_decoder(const ProblemInstance& instance);

/// C(n, r), saturating at SIZE_MAX.
std::size_t binomial_saturating(std::size_t n, std::size_t r) noexcept;

}  // namespace suprec
