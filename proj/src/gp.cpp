#include "wsbo/gp.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <string>

#include "wsbo/errors.hpp"

namespace wsbo {

std::vector<TaskPoint> task_points(const TrainingSet& training) {
  std::vector<TaskPoint> out;
  out.reserve(training.size());
  for (const auto& obs : training) out.push_back({obs.task, obs.point});
  return out;
}

PosteriorState fit(const JointHyperParams& hp, TrainingSet training, const FitOptions& options) {
  hp.validate();
  for (const auto& obs : training) {
    if (obs.point.size() != hp.dim()) throw InvalidArgument("fit: observation dimension mismatch");
    if (!(obs.noise_var >= 0.0)) throw InvalidArgument("fit: noise variance must be nonnegative");
    if (!std::isfinite(obs.value)) throw InvalidArgument("fit: observation value is not finite");
  }

  PosteriorState state;
  state.hyper_ = hp;
  state.options_ = options;
  const auto n = static_cast<Eigen::Index>(training.size());
  if (n == 0) {
    state.training_ = std::move(training);
    state.factor_.resize(0, 0);
    state.weights_.resize(0);
    return state;
  }

  Eigen::MatrixXd k = gram(hp, task_points(training));
  Eigen::VectorXd residual(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& obs = training[static_cast<std::size_t>(i)];
    k(i, i) += obs.noise_var;
    residual[i] = obs.value - hp.mean_const;
  }

  std::vector<double> attempted;
  double jitter = options.relative_jitter * hp.base.amplitude;
  for (int attempt = 0; attempt <= options.jitter_retries; ++attempt, jitter *= 10.0) {
    attempted.push_back(jitter);
    Eigen::MatrixXd a = k;
    a.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() != Eigen::Success) continue;
    Eigen::MatrixXd lower = llt.matrixL();
    if (!lower.diagonal().allFinite() || (lower.diagonal().array() <= 0.0).any()) continue;
    state.factor_ = std::move(lower);
    state.weights_ = llt.solve(residual);
    state.jitter_ = jitter;
    state.training_ = std::move(training);
    return state;
  }
  std::string levels;
  for (double j : attempted) levels += (levels.empty() ? "" : ", ") + std::to_string(j);
  throw IllConditioned("covariance matrix is not positive definite (jitter tried: " + levels + ")",
                       attempted);
}

Eigen::MatrixXd PosteriorState::cross_cov(const std::vector<DesignPoint>& points) const {
  std::vector<DesignPoint> inputs;
  inputs.reserve(training_.size());
  for (const auto& obs : training_) inputs.push_back(obs.point);
  return base_cross_cov(hyper_.base, inputs, points);
}

Eigen::MatrixXd PosteriorState::whitened_cross_cov(const std::vector<DesignPoint>& points) const {
  Eigen::MatrixXd k = cross_cov(points);
  if (k.rows() > 0) factor_.triangularView<Eigen::Lower>().solveInPlace(k);
  return k;
}

namespace {

void check_query(const PosteriorState& state, const DesignPoint& x) {
  if (x.size() != state.dim()) {
    throw InvalidArgument("posterior query: expected dimension " + std::to_string(state.dim()) +
                          ", got " + std::to_string(x.size()));
  }
}

}  // namespace

MeanVar posterior_mean_var(const PosteriorState& state, const DesignPoint& x) {
  check_query(state, x);
  const double prior_var = state.hyper().base.amplitude;
  if (state.size() == 0) return {state.hyper().mean_const, prior_var};
  Eigen::VectorXd k = state.cross_cov({x}).col(0);
  const double mean = state.hyper().mean_const + k.dot(state.weights());
  state.factor().triangularView<Eigen::Lower>().solveInPlace(k);
  return {mean, std::max(0.0, prior_var - k.squaredNorm())};
}

double posterior_cov(const PosteriorState& state, const DesignPoint& x, const DesignPoint& x2) {
  check_query(state, x);
  check_query(state, x2);
  const double prior = kernel_eval(state.hyper().base, x, x2);
  if (state.size() == 0) return prior;
  const Eigen::MatrixXd v = state.whitened_cross_cov({x, x2});
  const double cov = prior - v.col(0).dot(v.col(1));
  // keep the diagonal consistent with posterior_mean_var
  if (x == x2) return std::max(0.0, cov);
  return cov;
}

PosteriorState condition_on(const PosteriorState& state, const Observation& obs) {
  TrainingSet extended = state.training();
  extended.push_back(obs);
  return fit(state.hyper(), std::move(extended), state.options());
}

}  // namespace wsbo
