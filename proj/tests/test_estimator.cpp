#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "suprec/errors.hpp"
#include "suprec/estimator.hpp"

namespace {

using namespace suprec;

// Hand-built single-sample instance; the caller fills phi, x, w.
ProblemInstance manual_instance(std::size_t m, std::size_t d, const std::vector<std::size_t>& s,
                                const std::vector<Eigen::MatrixXd>& phis,
                                const std::vector<Eigen::VectorXd>& xs,
                                const std::vector<Eigen::VectorXd>& ws) {
  ProblemInstance inst;
  inst.config.d = d;
  inst.config.k = s.size();
  inst.config.m = m;
  inst.config.n = phis.size();
  inst.support = Support(s, d);
  for (std::size_t i = 0; i < phis.size(); ++i) {
    inst.signals.vectors.push_back(xs[i]);
    inst.measurements.matrices.push_back(phis[i]);
    inst.measurements.noises.push_back(ws[i]);
    inst.measurements.observations.push_back(phis[i] * xs[i] + ws[i]);
  }
  return inst;
}

SupportStatistic stat_of(std::initializer_list<double> v) {
  SupportStatistic s;
  s.lambda_tilde = Eigen::VectorXd::Map(std::data(v), static_cast<Eigen::Index>(v.size()));
  return s;
}

std::vector<std::size_t> ids(const SupportEstimate& e) { return e.indices; }

TEST(ProxySamples, IdentityMeasurement) {
  const auto inst = manual_instance(2, 2, {0}, {Eigen::Matrix2d::Identity()},
                                    {Eigen::Vector2d(3, 0)}, {Eigen::Vector2d::Zero()});
  const auto p = proxy_samples(inst);
  EXPECT_EQ(p.values.row(0), Eigen::RowVector2d(3, 0));
}

TEST(ProxySamples, HandExpansion) {
  Eigen::MatrixXd phi(1, 2);
  phi << 1, 1;
  auto inst = manual_instance(1, 2, {0}, {phi}, {Eigen::Vector2d(2, 0)}, {Eigen::VectorXd::Zero(1)});
  EXPECT_EQ(proxy_samples(inst).values.row(0), Eigen::RowVector2d(2, 2));

  phi << 1, 0;
  inst = manual_instance(1, 2, {0}, {phi}, {Eigen::Vector2d(2, 0)}, {Eigen::VectorXd::Ones(1)});
  EXPECT_EQ(inst.measurements.observations[0][0], 3.0);
  EXPECT_EQ(proxy_samples(inst).values.row(0), Eigen::RowVector2d(3, 0));
}

TEST(SupportStatistic, AveragesSquares) {
  ProxySamples p;
  p.values.resize(2, 1);
  p.values << 3, 1;
  EXPECT_EQ(support_statistic(p).lambda_tilde[0], 5.0);
  p.values.setZero(4, 3);
  EXPECT_TRUE(support_statistic(p).lambda_tilde.isZero(0.0));
  StatisticAccumulator empty(3);
  EXPECT_THROW(empty.statistic(), ArgumentError);
}

TEST(SupportStatistic, FourthColumnMomentOnSupport) {
  // E lambda_0 = E ||Phi_u||^4 = 1 + 2/m in the noiseless single-atom model.
  ProblemConfig c;
  c.d = 2;
  c.k = 1;
  c.m = 8;
  c.n = 500;
  c.support_mode = SupportMode::Fixed;
  c.fixed_support = {0};
  c.seed = 2024;
  const int instances = 1000;
  std::vector<double> values;
  for (int t = 0; t < instances; ++t) {
    values.push_back(support_statistic(proxy_samples(gen_instance(c, t))).lambda_tilde[0]);
  }
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / instances;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double se = std::sqrt(ss / (instances - 1.0) / instances);
  EXPECT_NEAR(mean, 1.0 + 2.0 / 8.0, 3.0 * se);
}

TEST(TopK, ExamplesAndTieBreak) {
  EXPECT_EQ(ids(top_k_support(stat_of({5, 0, 2}), 2)), (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(ids(top_k_support(stat_of({1, 1, 0}), 1)), (std::vector<std::size_t>{0}));
  EXPECT_EQ(ids(top_k_support(stat_of({0, 0, 0}), 3)), (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_EQ(ids(top_k_support(stat_of({0, 2, 2, 2}), 2)), (std::vector<std::size_t>{1, 2}));
  EXPECT_THROW(top_k_support(stat_of({1, 2}), 3), ArgumentError);
}

TEST(Threshold, Examples) {
  EXPECT_EQ(ids(threshold_support(stat_of({5, 0, 2}), 1.5)), (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(ids(threshold_support(stat_of({5, 0, 2}), -1.0)),
            (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_TRUE(threshold_support(stat_of({5, 0, 2}), 1e300).indices.empty());
  const auto e = threshold_support(stat_of({5, 0, 2}), 2.0);
  EXPECT_EQ(e.method, EstimateMethod::Threshold);
  EXPECT_EQ(e.tau, 2.0);
  EXPECT_EQ(ids(e), (std::vector<std::size_t>{0, 2}));
}

ProblemConfig estimator_config() {
  ProblemConfig c;
  c.d = 12;
  c.k = 3;
  c.m = 4;
  c.n = 30;
  c.sigma2 = 0.3;
  c.x_min = 0.5;
  c.x_max = 1.5;
  c.signal_mode = SignalMode::UniformMagnitudeRandomSign;
  c.seed = 5;
  return c;
}

TEST(Estimator, NonnegativeAndSoundUnderSeparation) {
  for (int t = 0; t < 50; ++t) {
    const auto inst = gen_instance(estimator_config(), t);
    const auto stat = support_statistic(proxy_samples(inst));
    EXPECT_TRUE((stat.lambda_tilde.array() >= 0.0).all());
    double min_in = INFINITY, max_out = -INFINITY;
    for (std::size_t u = 0; u < inst.config.d; ++u) {
      const double v = stat.lambda_tilde[u];
      if (inst.support.contains(u)) min_in = std::min(min_in, v);
      else max_out = std::max(max_out, v);
    }
    if (min_in > max_out) {
      const std::vector<std::size_t> truth(inst.support.indices().begin(),
                                           inst.support.indices().end());
      EXPECT_EQ(ids(top_k_support(stat, inst.config.k)), truth);
      EXPECT_EQ(ids(threshold_support(stat, 0.5 * (min_in + max_out))), truth);
    }
  }
}

TEST(Estimator, PermutationEquivariance) {
  const auto inst = gen_instance(estimator_config(), 1);
  const std::size_t d = inst.config.d;
  std::vector<std::size_t> pi(d);
  std::iota(pi.begin(), pi.end(), 0);
  std::reverse(pi.begin(), pi.end());
  std::rotate(pi.begin(), pi.begin() + 5, pi.end());

  auto permuted = inst;
  std::vector<std::size_t> new_support;
  for (auto u : inst.support.indices()) new_support.push_back(pi[u]);
  permuted.support = Support(new_support, d);
  for (std::size_t i = 0; i < inst.config.n; ++i) {
    for (std::size_t u = 0; u < d; ++u) {
      permuted.measurements.matrices[i].col(pi[u]) = inst.measurements.matrices[i].col(u);
      permuted.signals.vectors[i][pi[u]] = inst.signals.vectors[i][u];
    }
  }
  const auto a = support_statistic(proxy_samples(inst));
  const auto b = support_statistic(proxy_samples(permuted));
  for (std::size_t u = 0; u < d; ++u) EXPECT_EQ(b.lambda_tilde[pi[u]], a.lambda_tilde[u]);
  std::vector<std::size_t> mapped;
  for (auto u : top_k_support(a, 3).indices) mapped.push_back(pi[u]);
  std::sort(mapped.begin(), mapped.end());
  EXPECT_EQ(ids(top_k_support(b, 3)), mapped);
}

TEST(Estimator, ScaleInvarianceOfDecision) {
  auto c = estimator_config();
  auto scaled = c;
  scaled.x_min *= 2.0;
  scaled.x_max *= 2.0;
  scaled.sigma2 *= 4.0;
  for (int t = 0; t < 20; ++t) {
    const auto a = support_statistic(proxy_samples(gen_instance(c, t)));
    const auto b = support_statistic(proxy_samples(gen_instance(scaled, t)));
    EXPECT_EQ(b.lambda_tilde, (4.0 * a.lambda_tilde).eval());
    EXPECT_EQ(ids(top_k_support(a, c.k)), ids(top_k_support(b, c.k)));
  }
}

TEST(Exhaustive, IdentityExample) {
  const auto inst = manual_instance(3, 3, {0}, {Eigen::Matrix3d::Identity()},
                                    {Eigen::Vector3d(3, 0, 0)}, {Eigen::Vector3d::Zero()});
  const auto e = exhaustive_decoder(inst);
  EXPECT_EQ(e.method, EstimateMethod::Exhaustive);
  EXPECT_EQ(ids(e), (std::vector<std::size_t>{0}));
}

// Residual of the least-squares fit on columns T, computed with a QR solve
// independent of the decoder's implementation.
double residual(const ProblemInstance& inst, const std::vector<std::size_t>& t) {
  double total = 0.0;
  for (std::size_t i = 0; i < inst.config.n; ++i) {
    const auto& phi = inst.measurements.matrices[i];
    Eigen::MatrixXd sub(phi.rows(), static_cast<Eigen::Index>(t.size()));
    for (std::size_t j = 0; j < t.size(); ++j) sub.col(j) = phi.col(t[j]);
    const Eigen::VectorXd& y = inst.measurements.observations[i];
    const Eigen::VectorXd fit = sub.householderQr().solve(y);
    total += (y - sub * fit).squaredNorm();
  }
  return total;
}

TEST(Exhaustive, NoiselessOverdeterminedRecoversSupport) {
  ProblemConfig c;
  c.d = 7;
  c.k = 2;
  c.m = 4;
  c.n = 3;
  c.seed = 8;
  for (int t = 0; t < 10; ++t) {
    const auto inst = gen_instance(c, t);
    const std::vector<std::size_t> truth(inst.support.indices().begin(),
                                         inst.support.indices().end());
    EXPECT_LT(residual(inst, truth), 1e-16);
    for (std::size_t a = 0; a < c.d; ++a) {
      for (std::size_t b = a + 1; b < c.d; ++b) {
        if (std::vector<std::size_t>{a, b} != truth) {
          EXPECT_GT(residual(inst, {a, b}), 1e-8);
        }
      }
    }
    EXPECT_EQ(ids(exhaustive_decoder(inst)), truth);
  }
}

TEST(Exhaustive, AgreesWithTopKWhenMeasurementsAreScarce) {
  ProblemConfig c;
  c.d = 6;
  c.k = 2;
  c.m = 1;
  c.n = 400;
  c.seed = 31;
  int agree = 0;
  const int instances = 200;
  for (int t = 0; t < instances; ++t) {
    const auto inst = gen_instance(c, t);
    const auto topk = top_k_support(support_statistic(proxy_samples(inst)), c.k);
    agree += exhaustive_decoder(inst).indices == topk.indices;
  }
  EXPECT_GE(agree, 0.95 * instances);
}

TEST(Exhaustive, GuardsSubsetCount) {
  EXPECT_EQ(binomial_saturating(10, 3), 120u);
  EXPECT_EQ(binomial_saturating(5, 0), 1u);
  EXPECT_EQ(binomial_saturating(3, 5), 0u);
  EXPECT_EQ(binomial_saturating(200, 100), SIZE_MAX);
  ProblemConfig c;
  c.d = 30;
  c.k = 10;  // C(30, 10) ~ 3e7
  EXPECT_THROW(exhaustive_decoder(gen_instance(c)), SizeError);
}

}  // namespace
