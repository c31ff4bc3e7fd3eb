#include "wsbo/kernels.hpp"

#include <cmath>
#include <string>

#include "wsbo/errors.hpp"

namespace wsbo {

std::string_view to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::kSquaredExponential: return "squared-exponential";
    case KernelFamily::kMatern52: return "matern52";
  }
  return "unknown";
}

KernelFamily kernel_family_from_string(std::string_view name) {
  if (name == "squared-exponential" || name == "se") return KernelFamily::kSquaredExponential;
  if (name == "matern52" || name == "matern-5/2") return KernelFamily::kMatern52;
  throw InvalidArgument("unknown kernel family '" + std::string(name) + "'");
}

void KernelParams::validate() const {
  if (!(amplitude > 0.0) || !std::isfinite(amplitude)) {
    throw InvalidArgument("kernel amplitude must be positive and finite");
  }
  if (length_scales.size() == 0) throw InvalidArgument("kernel needs at least one length scale");
  for (Eigen::Index i = 0; i < length_scales.size(); ++i) {
    if (!(length_scales[i] > 0.0) || !std::isfinite(length_scales[i])) {
      throw InvalidArgument("kernel length scales must be positive and finite");
    }
  }
}

void JointHyperParams::validate() const {
  base.validate();
  if (!std::isfinite(mean_const)) throw InvalidArgument("mean constant must be finite");
  for (const auto& delta : deltas) {
    delta.validate();
    if (delta.dim() != base.dim()) {
      throw InvalidArgument("difference kernel dimension does not match the base kernel");
    }
  }
}

JointHyperParams with_task_count(const JointHyperParams& hp, int m) {
  if (m < 0) throw InvalidArgument("negative task count");
  JointHyperParams out = hp;
  out.deltas.resize(static_cast<std::size_t>(std::min(m, hp.num_tasks())));
  while (out.num_tasks() < m) {
    out.deltas.push_back(hp.deltas.empty() ? hp.base : hp.deltas.back());
  }
  return out;
}

namespace {

constexpr double kSqrt5 = 2.23606797749978969640917366873127623544;

double scaled_sq_dist(const KernelParams& p, const DesignPoint& x, const DesignPoint& x2) {
  double r2 = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double u = (x[i] - x2[i]) / p.length_scales[i];
    r2 += u * u;
  }
  return r2;
}

double kernel_unchecked(const KernelParams& p, const DesignPoint& x, const DesignPoint& x2) {
  const double r2 = scaled_sq_dist(p, x, x2);
  if (p.family == KernelFamily::kSquaredExponential) return p.amplitude * std::exp(-0.5 * r2);
  const double s = kSqrt5 * std::sqrt(r2);
  return p.amplitude * (1.0 + s + s * s / 3.0) * std::exp(-s);
}

void check_pair(const KernelParams& p, const DesignPoint& x, const DesignPoint& x2) {
  if (x.size() != p.dim() || x2.size() != p.dim()) {
    throw InvalidArgument("kernel_eval: point dimension does not match the length scales");
  }
}

}  // namespace

double kernel_eval(const KernelParams& params, const DesignPoint& x, const DesignPoint& x2) {
  params.validate();
  check_pair(params, x, x2);
  return kernel_unchecked(params, x, x2);
}

double kernel_eval_grad(const KernelParams& params, const DesignPoint& x, const DesignPoint& x2,
                        Eigen::Ref<Eigen::VectorXd> grad) {
  check_pair(params, x, x2);
  const auto d = params.dim();
  const double r2 = scaled_sq_dist(params, x, x2);
  double k = 0.0;
  // d k / d log(beta_i) = c * u_i^2 with u_i = (x_i - x2_i) / beta_i
  double c = 0.0;
  if (params.family == KernelFamily::kSquaredExponential) {
    k = params.amplitude * std::exp(-0.5 * r2);
    c = k;
  } else {
    const double s = kSqrt5 * std::sqrt(r2);
    const double e = std::exp(-s);
    k = params.amplitude * (1.0 + s + s * s / 3.0) * e;
    c = params.amplitude * (5.0 / 3.0) * (1.0 + s) * e;
  }
  grad[0] = k;
  for (Eigen::Index i = 0; i < d; ++i) {
    const double u = (x[i] - x2[i]) / params.length_scales[i];
    grad[i + 1] = c * u * u;
  }
  return k;
}

double joint_mean(const JointHyperParams& hp, const TaskPoint&) { return hp.mean_const; }

namespace {

void check_task(const JointHyperParams& hp, int task) {
  if (task < 0 || task > hp.num_tasks()) {
    throw InvalidArgument("task index " + std::to_string(task) + " outside [0, " +
                          std::to_string(hp.num_tasks()) + "]");
  }
}

double joint_cov_unchecked(const JointHyperParams& hp, const TaskPoint& a, const TaskPoint& b) {
  double k = kernel_unchecked(hp.base, a.point, b.point);
  if (a.task == b.task && a.task >= 1) {
    k += kernel_unchecked(hp.deltas[static_cast<std::size_t>(a.task - 1)], a.point, b.point);
  }
  return k;
}

}  // namespace

double joint_cov(const JointHyperParams& hp, const TaskPoint& a, const TaskPoint& b) {
  hp.validate();
  check_task(hp, a.task);
  check_task(hp, b.task);
  check_pair(hp.base, a.point, b.point);
  return joint_cov_unchecked(hp, a, b);
}

Eigen::MatrixXd gram(const JointHyperParams& hp, const std::vector<TaskPoint>& points) {
  hp.validate();
  for (const auto& tp : points) {
    check_task(hp, tp.task);
    if (tp.point.size() != hp.dim()) throw InvalidArgument("gram: point dimension mismatch");
  }
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j; i < n; ++i) {
      const double v = joint_cov_unchecked(hp, points[static_cast<std::size_t>(i)],
                                           points[static_cast<std::size_t>(j)]);
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

Eigen::MatrixXd base_cross_cov(const KernelParams& base, const std::vector<DesignPoint>& rows,
                               const std::vector<DesignPoint>& cols) {
  base.validate();
  for (const auto& x : rows) {
    if (x.size() != base.dim()) throw InvalidArgument("cross covariance: dimension mismatch");
  }
  for (const auto& x : cols) {
    if (x.size() != base.dim()) throw InvalidArgument("cross covariance: dimension mismatch");
  }
  Eigen::MatrixXd k(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  if (&rows == &cols) {
    for (Eigen::Index j = 0; j < k.cols(); ++j) {
      k(j, j) = base.amplitude;
      for (Eigen::Index i = j + 1; i < k.rows(); ++i) {
        k(i, j) = k(j, i) = kernel_unchecked(base, rows[static_cast<std::size_t>(i)], cols[static_cast<std::size_t>(j)]);
      }
    }
    return k;
  }
  for (Eigen::Index j = 0; j < k.cols(); ++j) {
    for (Eigen::Index i = 0; i < k.rows(); ++i) {
      k(i, j) = kernel_unchecked(base, rows[static_cast<std::size_t>(i)],
                                 cols[static_cast<std::size_t>(j)]);
    }
  }
  return k;
}

}  // namespace wsbo
