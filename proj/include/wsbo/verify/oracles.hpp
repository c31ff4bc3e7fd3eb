#pragma once

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "wsbo/gp.hpp"

// Reference computations used by the test suites and `wsbo bench`. They share
// no code path with the factorized implementation they check.
namespace wsbo::verify {

struct DensePosterior {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

/// Current-task posterior at `queries` from an explicit inverse of
/// K(X,X) + D(X) + jitter * I.
DensePosterior dense_posterior(const JointHyperParams& hp, const TrainingSet& training,
                               const std::vector<DesignPoint>& queries, double jitter);

struct MonteCarloEstimate {
  double mean;
  double se;
};

/// Monte-Carlo estimate of E[max_i (a_i + b_i Z)].
MonteCarloEstimate mc_expected_max(std::span<const double> a, std::span<const double> b, long draws, Rng& rng);

/// Two-stage simulation of the one-step value of measuring `x`: draw y from
/// the predictive distribution, refit by dense inverse, take the best
/// posterior mean over `disc`, subtract the current best.
MonteCarloEstimate nested_kg(const JointHyperParams& hp, const TrainingSet& training, const DesignPoint& x,
                             const std::vector<DesignPoint>& disc, double noise_var, double jitter, long draws,
                             Rng& rng);

/// Central differences of `f` at `theta` with step `h`.
Eigen::VectorXd central_differences(const std::function<double(const Eigen::VectorXd&)>& f,
                                    const Eigen::VectorXd& theta, double h);

/// Random joint-model problem: hyperparameters for `tasks` previous tasks in
/// dimension `dim` and `n` observations spread across tasks 0..tasks.
struct RandomProblem {
  JointHyperParams hyper;
  TrainingSet training;
};
RandomProblem random_problem(int dim, int tasks, int n, KernelFamily family, Rng& rng);

}  // namespace wsbo::verify
