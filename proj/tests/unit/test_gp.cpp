#include <gtest/gtest.h>

#include <cmath>

#include "wsbo/errors.hpp"
#include "wsbo/gp.hpp"
#include "wsbo/verify/oracles.hpp"

using namespace wsbo;

namespace {

DesignPoint rand_point(Rng& rng, int d) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  DesignPoint x(d);
  for (int i = 0; i < d; ++i) x[i] = u(rng);
  return x;
}

JointHyperParams simple_hyper(int d, int m, double delta_amp = 0.2) {
  JointHyperParams hp;
  hp.base.amplitude = 1.0;
  hp.base.length_scales = Eigen::VectorXd::Constant(d, 0.5);
  for (int l = 0; l < m; ++l) {
    KernelParams k;
    k.amplitude = delta_amp;
    k.length_scales = Eigen::VectorXd::Constant(d, 0.7);
    hp.deltas.push_back(k);
  }
  return hp;
}

}  // namespace

TEST(Fit, SingleObservationWeights) {
  auto hp = simple_hyper(2, 0);
  hp.base.amplitude = 2.0;
  auto state = fit(hp, {{0, Eigen::Vector2d(0.1, 0.2), 3.0, 0.0}});
  ASSERT_EQ(state.weights().size(), 1);
  EXPECT_NEAR(state.weights()[0], 3.0 / (2.0 + state.jitter()), 1e-15);
  EXPECT_NEAR(state.weights()[0], 1.5, 1e-7);
}

TEST(Fit, FactorReconstructsMatrix) {
  Rng rng(1);
  for (int trial = 0; trial < 10; ++trial) {
    auto p = verify::random_problem(2, 3, 25, KernelFamily::kMatern52, rng);
    auto state = fit(p.hyper, p.training);
    Eigen::MatrixXd kd = gram(p.hyper, task_points(p.training));
    Eigen::VectorXd residual(p.training.size());
    for (std::size_t i = 0; i < p.training.size(); ++i) {
      kd(i, i) += p.training[i].noise_var + state.jitter();
      residual[i] = p.training[i].value - p.hyper.mean_const;
    }
    const Eigen::MatrixXd rebuilt = state.factor() * state.factor().transpose();
    EXPECT_LE((rebuilt - kd).norm(), 1e-8 * kd.norm());
    EXPECT_LE((kd * state.weights() - residual).norm(), 1e-8 * std::max(1.0, residual.norm()));
    EXPECT_TRUE(state.factor().isLowerTriangular());
  }
}

TEST(Fit, EscalatesJitterThenFails) {
  auto hp = simple_hyper(1, 0);
  hp.base.length_scales[0] = 1e4;
  TrainingSet many;
  for (int i = 0; i < 6; ++i) many.push_back({0, Eigen::VectorXd::Constant(1, 0.1 * i), 0.0, 0.0});
  // Nearly identical inputs with zero noise: needs more than the initial jitter or fails.
  FitOptions opts;
  opts.relative_jitter = 1e-20;
  opts.jitter_retries = 0;
  try {
    (void)fit(hp, many, opts);
    FAIL() << "expected IllConditioned";
  } catch (const IllConditioned& e) {
    ASSERT_EQ(e.jitter_levels().size(), 1u);
  }
  auto state = fit(hp, many);
  EXPECT_GE(state.jitter(), 1e-8);
}

TEST(Posterior, PriorRecovery) {
  Rng rng(2);
  auto hp = simple_hyper(2, 2);
  hp.mean_const = 0.7;
  auto state = fit(hp, {});
  for (int i = 0; i < 10; ++i) {
    DesignPoint x = rand_point(rng, 2), y = rand_point(rng, 2);
    auto mv = posterior_mean_var(state, x);
    EXPECT_EQ(mv.mean, 0.7);
    EXPECT_EQ(mv.variance, hp.base.amplitude);
    EXPECT_EQ(posterior_cov(state, x, y), kernel_eval(hp.base, x, y));
  }
}

TEST(Posterior, NoiselessInterpolation) {
  Rng rng(3);
  auto hp = simple_hyper(2, 1);
  TrainingSet t;
  for (int i = 0; i < 8; ++i) {
    DesignPoint x = rand_point(rng, 2);
    t.push_back({0, x, std::sin(3.0 * x[0]) + std::cos(2.0 * x[1]), 0.0});
  }
  t.push_back({1, rand_point(rng, 2), 2.0, 0.1});
  auto state = fit(hp, t);
  for (int i = 0; i < 8; ++i) {
    auto mv = posterior_mean_var(state, t[i].point);
    EXPECT_NEAR(mv.mean, t[i].value, 1e-6);
    EXPECT_LE(mv.variance, 1e-6 * hp.base.amplitude);
    EXPECT_GE(mv.variance, 0.0);
  }
}

TEST(Posterior, MatchesDenseInverse) {
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const auto family = trial % 2 ? KernelFamily::kMatern52 : KernelFamily::kSquaredExponential;
    auto p = verify::random_problem(1 + trial % 3, 3, 10 + trial % 21, family, rng);
    auto state = fit(p.hyper, p.training);
    std::vector<DesignPoint> q;
    for (int i = 0; i < 5; ++i) q.push_back(rand_point(rng, static_cast<int>(p.hyper.dim())));
    auto oracle = verify::dense_posterior(p.hyper, p.training, q, state.jitter());
    for (int i = 0; i < 5; ++i) {
      auto mv = posterior_mean_var(state, q[i]);
      EXPECT_NEAR(mv.mean, oracle.mean[i], 1e-8);
      EXPECT_NEAR(mv.variance, oracle.cov(i, i), 1e-8);
      for (int j = 0; j < 5; ++j) EXPECT_NEAR(posterior_cov(state, q[i], q[j]), oracle.cov(i, j), 1e-8);
    }
  }
}

TEST(Posterior, CovarianceConsistency) {
  Rng rng(5);
  auto p = verify::random_problem(2, 2, 15, KernelFamily::kMatern52, rng);
  auto state = fit(p.hyper, p.training);
  for (int i = 0; i < 20; ++i) {
    DesignPoint x = rand_point(rng, 2), y = rand_point(rng, 2);
    EXPECT_NEAR(posterior_cov(state, x, y), posterior_cov(state, y, x), 1e-14);
    EXPECT_NEAR(posterior_cov(state, x, x), posterior_mean_var(state, x).variance, 1e-14);
  }
}

TEST(Posterior, VarianceBounds) {
  Rng rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    auto p = verify::random_problem(2, 2, 20, KernelFamily::kMatern52, rng);
    auto state = fit(p.hyper, p.training);
    for (int i = 0; i < 50; ++i) {
      DesignPoint x = i < 20 ? p.training[i].point : rand_point(rng, 2);
      const double v = posterior_mean_var(state, x).variance;
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, p.hyper.base.amplitude + 1e-10);
    }
  }
}

TEST(Posterior, DimensionMismatch) {
  auto state = fit(simple_hyper(2, 0), {});
  EXPECT_THROW(posterior_mean_var(state, Eigen::Vector3d(0, 0, 0)), InvalidArgument);
  EXPECT_THROW(posterior_cov(state, Eigen::Vector2d(0, 0), Eigen::VectorXd::Zero(1)), InvalidArgument);
}

TEST(ConditionOn, EqualsRefit) {
  Rng rng(7);
  auto p = verify::random_problem(2, 2, 12, KernelFamily::kMatern52, rng);
  auto state = fit(p.hyper, p.training);
  Observation extra{0, rand_point(rng, 2), 0.4, 0.05};
  auto updated = condition_on(state, extra);
  auto extended = p.training;
  extended.push_back(extra);
  auto direct = fit(p.hyper, extended);
  EXPECT_EQ(state.size(), 12);
  for (int i = 0; i < 10; ++i) {
    DesignPoint x = rand_point(rng, 2);
    EXPECT_NEAR(posterior_mean_var(updated, x).mean, posterior_mean_var(direct, x).mean, 1e-8);
    EXPECT_NEAR(posterior_mean_var(updated, x).variance, posterior_mean_var(direct, x).variance, 1e-8);
  }
}

TEST(ConditionOn, HugeNoiseChangesNothing) {
  Rng rng(8);
  auto p = verify::random_problem(2, 1, 10, KernelFamily::kMatern52, rng);
  auto state = fit(p.hyper, p.training);
  auto updated = condition_on(state, {0, rand_point(rng, 2), 5.0, 1e12});
  for (int i = 0; i < 10; ++i) {
    DesignPoint x = rand_point(rng, 2);
    EXPECT_NEAR(posterior_mean_var(updated, x).mean, posterior_mean_var(state, x).mean, 1e-4);
    EXPECT_NEAR(posterior_mean_var(updated, x).variance, posterior_mean_var(state, x).variance, 1e-4);
  }
}

TEST(ConditionOn, VarianceNeverIncreasesAtPoint) {
  Rng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    auto p = verify::random_problem(2, 2, 10, KernelFamily::kMatern52, rng);
    auto state = fit(p.hyper, p.training);
    DesignPoint x = rand_point(rng, 2);
    auto updated = condition_on(state, {trial % 3, x, 0.0, 0.01 * trial});
    EXPECT_LE(posterior_mean_var(updated, x).variance, posterior_mean_var(state, x).variance + 1e-10);
  }
}

TEST(WarmStart, PreviousTaskInformsCurrentTask) {
  DesignPoint x = Eigen::Vector2d(0.3, 0.6);
  auto change_at = [&](double delta_amp) {
    auto hp = simple_hyper(2, 1, delta_amp);
    auto prior = fit(hp, {});
    auto after = fit(hp, {{1, x, 1.0, 0.0}});
    return posterior_mean_var(after, x).mean - posterior_mean_var(prior, x).mean;
  };
  const double unit = change_at(1.0);
  EXPECT_GT(std::abs(unit), 0.1);
  EXPECT_LT(std::abs(change_at(1e6)), 1e-2 * std::abs(unit));
}
