#pragma once

#include <utility>
#include <vector>

#include <Eigen/Core>

#include "wsbo/kernels.hpp"
#include "wsbo/types.hpp"

namespace wsbo {

/// One noisy evaluation (task, x, y, noise variance).
struct Observation {
  int task = 0;
  DesignPoint point;
  double value = 0.0;
  double noise_var = 0.0;

  friend bool operator==(const Observation&, const Observation&) = default;
};

using TrainingSet = std::vector<Observation>;

struct FitOptions {
  /// Initial diagonal jitter relative to the base amplitude.
  double relative_jitter = 1e-8;
  /// Number of x10 escalations tried after the first failed factorization.
  int jitter_retries = 3;
};

/// Fitted Gaussian-process posterior. Immutable; predictions are for the
/// current task (task 0).
class PosteriorState {
 public:
  const JointHyperParams& hyper() const { return hyper_; }
  const TrainingSet& training() const { return training_; }
  /// Lower Cholesky factor of K(X,X) + D(X) + jitter * I.
  const Eigen::MatrixXd& factor() const { return factor_; }
  /// (K + D + jitter)^-1 (Y - mean).
  const Eigen::VectorXd& weights() const { return weights_; }
  /// Absolute diagonal jitter that was needed for the factorization.
  double jitter() const { return jitter_; }
  const FitOptions& options() const { return options_; }
  Eigen::Index size() const { return static_cast<Eigen::Index>(training_.size()); }
  Eigen::Index dim() const { return hyper_.dim(); }

  /// Base-kernel covariances between the training inputs and `points`
  /// (n x points.size()); the current task only correlates through the base kernel.
  Eigen::MatrixXd cross_cov(const std::vector<DesignPoint>& points) const;
  /// L^-1 * cross_cov(points).
  Eigen::MatrixXd whitened_cross_cov(const std::vector<DesignPoint>& points) const;

 private:
  friend PosteriorState fit(const JointHyperParams&, TrainingSet, const FitOptions&);

  JointHyperParams hyper_;
  TrainingSet training_;
  Eigen::MatrixXd factor_;
  Eigen::VectorXd weights_;
  double jitter_ = 0.0;
  FitOptions options_;
};

/// Factorizes the joint model on `training`. An empty training set gives the prior.
PosteriorState fit(const JointHyperParams& hp, TrainingSet training, const FitOptions& options = {});

struct MeanVar {
  double mean;
  double variance;
};

MeanVar posterior_mean_var(const PosteriorState& state, const DesignPoint& x);

double posterior_cov(const PosteriorState& state, const DesignPoint& x, const DesignPoint& x2);

/// Refits with `obs` appended, using the options `state` was fitted with.
/// `state` is left unchanged.
PosteriorState condition_on(const PosteriorState& state, const Observation& obs);

/// Stacks the training inputs as task points.
std::vector<TaskPoint> task_points(const TrainingSet& training);

}  // namespace wsbo
