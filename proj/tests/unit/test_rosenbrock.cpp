#include <gtest/gtest.h>

#include <cmath>

#include "wsbo/benchmarks/rosenbrock.hpp"
#include "wsbo/errors.hpp"

using namespace wsbo;

namespace {

DesignPoint pt(double a, double b) { return Eigen::Vector2d(a, b); }
RosenbrockVariant rb(RosenbrockId id, double noise = 0.25) { return {id, noise}; }

}  // namespace

TEST(Rosenbrock, HandValues) {
  EXPECT_EQ(rosenbrock_value(rb(RosenbrockId::kRB1), pt(1, 1)), 0.0);
  EXPECT_EQ(rosenbrock_value(rb(RosenbrockId::kRB1), pt(0, 0)), 1.0);
  EXPECT_NEAR(rosenbrock_value(rb(RosenbrockId::kRB3), pt(0.99, 0.985)), 0.04, 1e-12);
  EXPECT_NEAR(rosenbrock_value(rb(RosenbrockId::kRB4), pt(1, 1)), 0.01 * std::sin(15.0) + 0.01, 1e-15);
  EXPECT_NEAR(rosenbrock_value(rb(RosenbrockId::kRB4), pt(1, 1)), 0.01650, 1e-5);
}

TEST(Rosenbrock, FamilyRelationships) {
  Rng rng(1);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 1000; ++i) {
    DesignPoint x = pt(u(rng), u(rng));
    const double v1 = rosenbrock_value(rb(RosenbrockId::kRB1), x);
    const double v2 = rosenbrock_value(rb(RosenbrockId::kRB2), x);
    const double v4 = rosenbrock_value(rb(RosenbrockId::kRB4), x);
    EXPECT_NEAR(v4 - v2, 0.01 * x[0], 1e-12);
    EXPECT_NEAR(v2 - v1, 0.01 * std::sin(10 * x[0] + 5 * x[1]), 1e-12);
  }
}

TEST(Rosenbrock, DomainChecked) {
  EXPECT_THROW(rosenbrock_value(rb(RosenbrockId::kRB1), pt(2.5, 0)), InvalidArgument);
  EXPECT_THROW(rosenbrock_value(rb(RosenbrockId::kRB1), Eigen::Vector3d(0, 0, 0)), InvalidArgument);
  EXPECT_NO_THROW(rosenbrock_value(rb(RosenbrockId::kRB3), pt(2, -2)));
}

TEST(Rosenbrock, Names) {
  EXPECT_EQ(rosenbrock_id_from_string("RB3"), RosenbrockId::kRB3);
  EXPECT_EQ(to_string(RosenbrockId::kRB2), "RB2");
  EXPECT_THROW(rosenbrock_id_from_string("RB5"), InvalidArgument);
}

TEST(RosenbrockEval, NoiselessIsNegatedValue) {
  Rng rng(2);
  DesignPoint x = pt(0.3, -1.2);
  auto obs = rosenbrock_eval(rb(RosenbrockId::kRB2, 0.0), x, rng);
  EXPECT_EQ(obs.value, -rosenbrock_value(rb(RosenbrockId::kRB2), x));
  EXPECT_EQ(obs.noise_var, 0.0);
  EXPECT_EQ(obs.task, 0);
}

TEST(RosenbrockEval, NoiseMoments) {
  Rng rng(3);
  DesignPoint x = pt(-0.5, 0.7);
  const double truth = -rosenbrock_value(rb(RosenbrockId::kRB1), x);
  const int n = 100000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    auto obs = rosenbrock_eval(rb(RosenbrockId::kRB1), x, rng);
    ASSERT_EQ(obs.noise_var, 0.25);
    sum += obs.value;
    sum_sq += obs.value * obs.value;
  }
  const double mean = sum / n;
  const double var = (sum_sq - n * mean * mean) / (n - 1);
  EXPECT_LT(std::abs(mean - truth), 4.0 * std::sqrt(0.25 / n));
  EXPECT_LT(std::abs(var - 0.25), 0.05 * 0.25);
}

TEST(RosenbrockEval, DeterministicGivenStream) {
  Rng a(99), b(99);
  DesignPoint x = pt(1.5, 0.1);
  EXPECT_EQ(rosenbrock_eval(rb(RosenbrockId::kRB4), x, a), rosenbrock_eval(rb(RosenbrockId::kRB4), x, b));
}

TEST(RosenbrockObjective, MaximizationConvention) {
  RosenbrockObjective obj(rb(RosenbrockId::kRB1));
  EXPECT_EQ(obj.name(), "RB1");
  EXPECT_EQ(obj.true_value(pt(1, 1)), 0.0);
  EXPECT_LT(obj.true_value(pt(-1, 1)), 0.0);
}
