#include "wsbo/hyper.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <random>

#include "wsbo/errors.hpp"

namespace wsbo {

ParamLayout layout_of(const JointHyperParams& hp) {
  return {hp.base.family, static_cast<int>(hp.dim()), hp.num_tasks()};
}

Eigen::VectorXd pack(const JointHyperParams& hp) {
  const ParamLayout layout = layout_of(hp);
  Eigen::VectorXd theta(layout.size());
  theta[0] = hp.mean_const;
  auto put = [&](const KernelParams& k, int offset) {
    theta[offset] = std::log(k.amplitude);
    theta.segment(offset + 1, layout.dim) = k.length_scales.array().log();
  };
  put(hp.base, layout.kernel_offset(0));
  for (int l = 1; l <= layout.num_tasks; ++l) put(hp.deltas[static_cast<std::size_t>(l - 1)], layout.kernel_offset(l));
  return theta;
}

JointHyperParams unpack(const ParamLayout& layout, const Eigen::VectorXd& theta) {
  if (theta.size() != layout.size()) throw InvalidArgument("unpack: parameter vector has the wrong length");
  auto get = [&](int offset) {
    KernelParams k;
    k.family = layout.family;
    k.amplitude = std::exp(theta[offset]);
    k.length_scales = theta.segment(offset + 1, layout.dim).array().exp();
    return k;
  };
  JointHyperParams hp;
  hp.mean_const = theta[0];
  hp.base = get(layout.kernel_offset(0));
  for (int l = 1; l <= layout.num_tasks; ++l) hp.deltas.push_back(get(layout.kernel_offset(l)));
  return hp;
}

HyperPrior HyperPrior::normal(Eigen::VectorXd log_mean, Eigen::VectorXd log_sd) {
  if (log_mean.size() != log_sd.size()) throw InvalidArgument("prior mean and stddev lengths differ");
  for (Eigen::Index i = 1; i < log_sd.size(); ++i) {
    if (!(log_sd[i] > 0.0)) throw InvalidArgument("prior stddevs must be positive");
  }
  return {std::move(log_mean), std::move(log_sd)};
}

double HyperPrior::log_density(const Eigen::VectorXd& theta) const {
  if (is_flat()) return 0.0;
  if (theta.size() != log_mean.size()) throw InvalidArgument("prior does not match the parameter layout");
  double total = 0.0;
  for (Eigen::Index i = 1; i < theta.size(); ++i) {
    const double z = (theta[i] - log_mean[i]) / log_sd[i];
    total += -0.5 * z * z - std::log(log_sd[i] * std::sqrt(2.0 * std::numbers::pi));
  }
  return total;
}

Eigen::VectorXd HyperPrior::grad_log_density(const Eigen::VectorXd& theta) const {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(theta.size());
  if (is_flat()) return g;
  if (theta.size() != log_mean.size()) throw InvalidArgument("prior does not match the parameter layout");
  for (Eigen::Index i = 1; i < theta.size(); ++i) {
    g[i] = -(theta[i] - log_mean[i]) / (log_sd[i] * log_sd[i]);
  }
  return g;
}

HyperPrior empirical_prior(const std::vector<JointHyperParams>& previous_fits, double min_sd) {
  if (previous_fits.size() < 2) return HyperPrior::flat();
  std::vector<Eigen::VectorXd> thetas;
  for (const auto& hp : previous_fits) {
    thetas.push_back(pack(hp));
    if (thetas.back().size() != thetas.front().size()) {
      throw InvalidArgument("empirical_prior: fits have different parameter layouts");
    }
  }
  const auto p = thetas.front().size();
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(p);
  for (const auto& t : thetas) mean += t;
  mean /= static_cast<double>(thetas.size());
  Eigen::VectorXd var = Eigen::VectorXd::Zero(p);
  for (const auto& t : thetas) var += (t - mean).cwiseAbs2();
  var /= static_cast<double>(thetas.size() - 1);
  Eigen::VectorXd sd = var.cwiseSqrt().cwiseMax(min_sd);
  return HyperPrior::normal(std::move(mean), std::move(sd));
}

namespace {

double log_marginal_of(const PosteriorState& state) {
  const auto n = state.size();
  Eigen::VectorXd residual(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    residual[i] = state.training()[static_cast<std::size_t>(i)].value - state.hyper().mean_const;
  }
  const double quad = residual.dot(state.weights());
  const double half_logdet = state.factor().diagonal().array().log().sum();
  return -0.5 * quad - half_logdet - 0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
}

Eigen::VectorXd grad_log_marginal_of(const PosteriorState& state) {
  const JointHyperParams& hp = state.hyper();
  const ParamLayout layout = layout_of(hp);
  const auto n = state.size();
  const auto& training = state.training();

  Eigen::MatrixXd inverse = Eigen::MatrixXd::Identity(n, n);
  state.factor().triangularView<Eigen::Lower>().solveInPlace(inverse);
  inverse = inverse.transpose() * inverse;  // L^-T L^-1
  const Eigen::VectorXd& w = state.weights();
  const Eigen::MatrixXd outer = w * w.transpose() - inverse;

  Eigen::VectorXd grad = Eigen::VectorXd::Zero(layout.size());
  grad[0] = w.sum();
  Eigen::VectorXd kg(layout.kernel_block());
  const int base_off = layout.kernel_offset(0);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto& oj = training[static_cast<std::size_t>(j)];
    for (Eigen::Index i = j; i < n; ++i) {
      const auto& oi = training[static_cast<std::size_t>(i)];
      const double weight = (i == j ? 0.5 : 1.0) * outer(i, j);
      kernel_eval_grad(hp.base, oi.point, oj.point, kg);
      grad.segment(base_off, layout.kernel_block()) += weight * kg;
      if (oi.task == oj.task && oi.task >= 1) {
        kernel_eval_grad(hp.deltas[static_cast<std::size_t>(oi.task - 1)], oi.point, oj.point, kg);
        grad.segment(layout.kernel_offset(oi.task), layout.kernel_block()) += weight * kg;
      }
    }
  }
  // the jitter is proportional to the base amplitude
  grad[base_off] += 0.5 * outer.trace() * state.jitter();
  return grad;
}

void require_training(const TrainingSet& training) {
  if (training.empty()) throw InvalidArgument("hyperparameter estimation needs observations");
}

}  // namespace

double log_marginal(const JointHyperParams& hp, const TrainingSet& training, const FitOptions& options) {
  require_training(training);
  return log_marginal_of(fit(hp, training, options));
}

double log_posterior(const JointHyperParams& hp, const HyperPrior& prior, const TrainingSet& training,
                     const FitOptions& options) {
  return log_marginal(hp, training, options) + prior.log_density(pack(hp));
}

Eigen::VectorXd grad_log_posterior(const JointHyperParams& hp, const HyperPrior& prior,
                                   const TrainingSet& training, const FitOptions& options) {
  require_training(training);
  const PosteriorState state = fit(hp, training, options);
  return grad_log_marginal_of(state) + prior.grad_log_density(pack(hp));
}

namespace {

struct Evaluation {
  double value;  // negative log posterior
  Eigen::VectorXd grad;
};

class NegLogPosterior {
 public:
  NegLogPosterior(const ParamLayout& layout, const HyperPrior& prior, const TrainingSet& training,
                  const FitOptions& options)
      : layout_(layout), prior_(prior), training_(training), options_(options) {}

  std::optional<Evaluation> operator()(const Eigen::VectorXd& theta) const {
    if (!theta.allFinite() || (theta.tail(theta.size() - 1).array().abs() > 700.0).any()) return std::nullopt;
    try {
      const PosteriorState state = fit(unpack(layout_, theta), training_, options_);
      const double value = -(log_marginal_of(state) + prior_.log_density(theta));
      Eigen::VectorXd grad = -(grad_log_marginal_of(state) + prior_.grad_log_density(theta));
      if (!std::isfinite(value) || !grad.allFinite()) return std::nullopt;
      return Evaluation{value, std::move(grad)};
    } catch (const IllConditioned&) {
      return std::nullopt;
    } catch (const InvalidArgument&) {
      return std::nullopt;
    }
  }

 private:
  ParamLayout layout_;
  const HyperPrior& prior_;
  const TrainingSet& training_;
  FitOptions options_;
};

// BFGS with Armijo backtracking on the negative log posterior.
void minimize(const NegLogPosterior& objective, Eigen::VectorXd theta, Evaluation current,
              const MapOptions& options, RestartOutcome& outcome, const ParamLayout& layout) {
  constexpr double kArmijo = 1e-4;
  constexpr double kMaxStep = 2.0;
  const auto p = theta.size();
  Eigen::MatrixXd inv_hessian = Eigen::MatrixXd::Identity(p, p);
  bool scaled = false;
  int it = 0;
  for (; it < options.max_iterations; ++it) {
    if (current.grad.norm() < options.grad_tol) break;
    Eigen::VectorXd dir = -inv_hessian * current.grad;
    double slope = dir.dot(current.grad);
    if (!(slope < 0.0)) {
      inv_hessian.setIdentity();
      dir = -current.grad;
      slope = dir.dot(current.grad);
    }
    if (dir.norm() > kMaxStep) {
      const double shrink = kMaxStep / dir.norm();
      dir *= shrink;
      slope *= shrink;
    }
    double step = 1.0;
    std::optional<Evaluation> next;
    Eigen::VectorXd candidate;
    while (step > 1e-12) {
      candidate = theta + step * dir;
      next = objective(candidate);
      if (next && next->value <= current.value + kArmijo * step * slope) break;
      next.reset();
      step *= 0.5;
    }
    if (!next) break;
    const Eigen::VectorXd s = candidate - theta;
    const Eigen::VectorXd y = next->grad - current.grad;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      if (!scaled) {
        inv_hessian *= sy / y.squaredNorm();
        scaled = true;
      }
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd left = Eigen::MatrixXd::Identity(p, p) - rho * s * y.transpose();
      inv_hessian = left * inv_hessian * left.transpose() + rho * s * s.transpose();
    }
    theta = std::move(candidate);
    current = std::move(*next);
  }
  outcome.iterations = it;
  outcome.converged = unpack(layout, theta);
  outcome.objective = -current.value;
  outcome.grad_norm = current.grad.norm();
}

double sample_variance(const TrainingSet& training) {
  double mean = 0.0;
  for (const auto& o : training) mean += o.value;
  mean /= static_cast<double>(training.size());
  double var = 0.0;
  for (const auto& o : training) var += (o.value - mean) * (o.value - mean);
  if (training.size() > 1) var /= static_cast<double>(training.size() - 1);
  return var > 1e-12 ? var : 1.0;
}

Eigen::VectorXd start_point(const ParamLayout& layout, const HyperPrior& prior,
                            const TrainingSet& training, Rng& rng) {
  Eigen::VectorXd theta(layout.size());
  double mean = 0.0;
  for (const auto& o : training) mean += o.value;
  theta[0] = mean / static_cast<double>(training.size());

  if (!prior.is_flat()) {
    std::normal_distribution<double> normal;
    for (Eigen::Index i = 1; i < theta.size(); ++i) theta[i] = prior.log_mean[i] + prior.log_sd[i] * normal(rng);
    return theta;
  }

  const double var = sample_variance(training);
  Eigen::VectorXd range = Eigen::VectorXd::Zero(layout.dim);
  {
    Eigen::VectorXd lo = training.front().point, hi = training.front().point;
    for (const auto& o : training) {
      lo = lo.cwiseMin(o.point);
      hi = hi.cwiseMax(o.point);
    }
    range = hi - lo;
    for (Eigen::Index i = 0; i < range.size(); ++i) {
      if (!(range[i] > 0.0)) range[i] = 1.0;
    }
  }
  auto uniform = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  for (int l = 0; l <= layout.num_tasks; ++l) {
    const int off = layout.kernel_offset(l);
    theta[off] = l == 0 ? uniform(std::log(0.1 * var), std::log(10.0 * var))
                        : uniform(std::log(1e-3 * var), std::log(var));
    for (int i = 0; i < layout.dim; ++i) {
      theta[off + 1 + i] = uniform(std::log(0.05 * range[i]), std::log(2.0 * range[i]));
    }
  }
  return theta;
}

}  // namespace

FitReport map_estimate(const HyperPrior& prior, const TrainingSet& training, const MapOptions& options) {
  require_training(training);
  if (options.n_restarts < 1) throw InvalidArgument("map_estimate: need at least one restart");
  ParamLayout layout;
  layout.family = options.family;
  layout.dim = static_cast<int>(training.front().point.size());
  for (const auto& o : training) {
    if (o.point.size() != layout.dim) throw InvalidArgument("map_estimate: inconsistent dimensions");
    if (o.task < 0) throw InvalidArgument("map_estimate: negative task index");
    layout.num_tasks = std::max(layout.num_tasks, o.task);
  }
  if (!prior.is_flat() && prior.log_mean.size() != layout.size()) {
    throw InvalidArgument("map_estimate: prior does not match the parameter layout");
  }

  const NegLogPosterior objective(layout, prior, training, options.fit);
  Rng rng = make_stream(options.seed, "map-restarts");
  FitReport report;
  bool any = false;
  for (int r = 0; r < options.n_restarts; ++r) {
    const Eigen::VectorXd theta0 = start_point(layout, prior, training, rng);
    RestartOutcome outcome;
    outcome.start = unpack(layout, theta0);
    auto initial = objective(theta0);
    if (!initial) {
      outcome.failed = true;
      outcome.start_objective = -std::numeric_limits<double>::infinity();
      outcome.objective = -std::numeric_limits<double>::infinity();
      report.restarts.push_back(std::move(outcome));
      continue;
    }
    outcome.start_objective = -initial->value;
    minimize(objective, theta0, std::move(*initial), options, outcome, layout);
    if (!any || outcome.objective > report.best_objective) {
      report.best_objective = outcome.objective;
      report.best_params = *outcome.converged;
      any = true;
    }
    report.restarts.push_back(std::move(outcome));
  }
  if (!any) throw EstimationFailed("every restart failed to factorize the covariance matrix");
  return report;
}

}  // namespace wsbo
