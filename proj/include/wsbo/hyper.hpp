#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "wsbo/gp.hpp"
#include "wsbo/kernels.hpp"

namespace wsbo {

/// Log-space parameter vector layout used by the estimator:
///   [mean_const, log a0, log b0_1..d, (log a_l, log b_l,1..d) for l = 1..M]
/// Positive parameters live in log space; the mean constant does not.
struct ParamLayout {
  KernelFamily family = KernelFamily::kMatern52;
  int dim = 0;
  int num_tasks = 0;

  int kernel_block() const { return dim + 1; }
  int size() const { return 1 + kernel_block() * (num_tasks + 1); }
  /// Offset of the kernel block for task l (0 = base).
  int kernel_offset(int task) const { return 1 + kernel_block() * task; }
};

ParamLayout layout_of(const JointHyperParams& hp);
Eigen::VectorXd pack(const JointHyperParams& hp);
JointHyperParams unpack(const ParamLayout& layout, const Eigen::VectorXd& theta);

/// Independent normal priors on each log-parameter. The mean constant is
/// never penalized. An empty prior is flat.
struct HyperPrior {
  /// Indexed like pack(); entry 0 (mean constant) is ignored.
  Eigen::VectorXd log_mean;
  Eigen::VectorXd log_sd;

  static HyperPrior flat() { return {}; }
  static HyperPrior normal(Eigen::VectorXd log_mean, Eigen::VectorXd log_sd);
  bool is_flat() const { return log_sd.size() == 0; }

  double log_density(const Eigen::VectorXd& theta) const;
  Eigen::VectorXd grad_log_density(const Eigen::VectorXd& theta) const;
};

/// Normal prior whose moments are the empirical mean / stddev of the
/// log-parameters of previous fits. Flat with fewer than two fits.
HyperPrior empirical_prior(const std::vector<JointHyperParams>& previous_fits, double min_sd = 0.05);

double log_marginal(const JointHyperParams& hp, const TrainingSet& training,
                    const FitOptions& options = {});

double log_posterior(const JointHyperParams& hp, const HyperPrior& prior,
                     const TrainingSet& training, const FitOptions& options = {});

/// Gradient of log_posterior with respect to pack(hp).
Eigen::VectorXd grad_log_posterior(const JointHyperParams& hp, const HyperPrior& prior,
                                   const TrainingSet& training, const FitOptions& options = {});

struct RestartOutcome {
  JointHyperParams start;
  double start_objective = 0.0;
  std::optional<JointHyperParams> converged;
  double objective = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  bool failed = false;
};

struct FitReport {
  JointHyperParams best_params;
  double best_objective = 0.0;
  std::vector<RestartOutcome> restarts;
};

struct MapOptions {
  KernelFamily family = KernelFamily::kMatern52;
  int n_restarts = 10;
  std::uint64_t seed = 0;
  int max_iterations = 200;
  double grad_tol = 1e-6;
  FitOptions fit;
};

/// MAP estimate by multi-start quasi-Newton ascent. The number of previous
/// tasks is the largest task index in `training`.
FitReport map_estimate(const HyperPrior& prior, const TrainingSet& training,
                       const MapOptions& options = {});

}  // namespace wsbo
