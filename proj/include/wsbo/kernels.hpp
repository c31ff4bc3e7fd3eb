#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "wsbo/types.hpp"

namespace wsbo {

enum class KernelFamily { kSquaredExponential, kMatern52 };

std::string_view to_string(KernelFamily family);
KernelFamily kernel_family_from_string(std::string_view name);

/// Stationary kernel with signal variance `amplitude` and one length scale
/// per input dimension.
struct KernelParams {
  KernelFamily family = KernelFamily::kMatern52;
  double amplitude = 1.0;
  Eigen::VectorXd length_scales;

  Eigen::Index dim() const { return length_scales.size(); }
  /// Throws InvalidArgument unless amplitude and all length scales are positive.
  void validate() const;
};

/// Hyperparameters of the joint model over (task, design) pairs: a constant
/// prior mean, the current-task kernel and one difference kernel per
/// previous task (`deltas[l - 1]` belongs to task l).
struct JointHyperParams {
  double mean_const = 0.0;
  KernelParams base;
  std::vector<KernelParams> deltas;

  int num_tasks() const { return static_cast<int>(deltas.size()); }
  Eigen::Index dim() const { return base.dim(); }
  void validate() const;
};

/// Returns a copy with exactly `m` difference kernels. Missing entries repeat
/// the last available difference kernel (or the base kernel when there is none).
JointHyperParams with_task_count(const JointHyperParams& hp, int m);

double kernel_eval(const KernelParams& params, const DesignPoint& x, const DesignPoint& x2);

/// Kernel value plus its derivatives with respect to log(amplitude) followed
/// by log(length_scales[i]), written into `grad` (size dim + 1).
double kernel_eval_grad(const KernelParams& params, const DesignPoint& x, const DesignPoint& x2,
                        Eigen::Ref<Eigen::VectorXd> grad);

double joint_mean(const JointHyperParams& hp, const TaskPoint& tp);

double joint_cov(const JointHyperParams& hp, const TaskPoint& a, const TaskPoint& b);

Eigen::MatrixXd gram(const JointHyperParams& hp, const std::vector<TaskPoint>& points);

/// Cross-covariance of the base kernel, rows indexed by `rows`, columns by `cols`.
Eigen::MatrixXd base_cross_cov(const KernelParams& base, const std::vector<DesignPoint>& rows,
                               const std::vector<DesignPoint>& cols);

}  // namespace wsbo
