#include "wsbo/verify/oracles.hpp"

#include <Eigen/LU>
#include <cmath>
#include <random>

namespace wsbo::verify {

namespace {

// Covariance written out from the model definition, independently of kernels.cpp.
double reference_kernel(const KernelParams& k, const DesignPoint& x, const DesignPoint& y) {
  double r2 = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) r2 += std::pow((x[i] - y[i]) / k.length_scales[i], 2);
  if (k.family == KernelFamily::kSquaredExponential) return k.amplitude * std::exp(-r2 / 2.0);
  const double r = std::sqrt(5.0 * r2);
  return k.amplitude * (1.0 + r + 5.0 * r2 / 3.0) * std::exp(-r);
}

double reference_cov(const JointHyperParams& hp, int la, const DesignPoint& xa, int lb, const DesignPoint& xb) {
  double c = reference_kernel(hp.base, xa, xb);
  if (la == lb && la >= 1) c += reference_kernel(hp.deltas[static_cast<std::size_t>(la - 1)], xa, xb);
  return c;
}

}  // namespace

DensePosterior dense_posterior(const JointHyperParams& hp, const TrainingSet& training,
                               const std::vector<DesignPoint>& queries, double jitter) {
  const auto n = static_cast<Eigen::Index>(training.size());
  const auto q = static_cast<Eigen::Index>(queries.size());
  Eigen::MatrixXd prior(q, q);
  for (Eigen::Index i = 0; i < q; ++i) {
    for (Eigen::Index j = 0; j < q; ++j) prior(i, j) = reference_cov(hp, 0, queries[i], 0, queries[j]);
  }
  DensePosterior out{Eigen::VectorXd::Constant(q, hp.mean_const), prior};
  if (n == 0) return out;

  Eigen::MatrixXd k(n, n);
  Eigen::VectorXd residual(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& oi = training[static_cast<std::size_t>(i)];
    residual[i] = oi.value - hp.mean_const;
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto& oj = training[static_cast<std::size_t>(j)];
      k(i, j) = reference_cov(hp, oi.task, oi.point, oj.task, oj.point);
    }
    k(i, i) += oi.noise_var + jitter;
  }
  const Eigen::MatrixXd inverse = k.fullPivLu().inverse();
  Eigen::MatrixXd cross(q, n);
  for (Eigen::Index i = 0; i < q; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto& oj = training[static_cast<std::size_t>(j)];
      cross(i, j) = reference_cov(hp, 0, queries[i], oj.task, oj.point);
    }
  }
  out.mean += cross * (inverse * residual);
  out.cov -= cross * inverse * cross.transpose();
  return out;
}

MonteCarloEstimate mc_expected_max(std::span<const double> a, std::span<const double> b, long draws, Rng& rng) {
  std::normal_distribution<double> normal;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (long s = 0; s < draws; ++s) {
    const double z = normal(rng);
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < a.size(); ++i) best = std::max(best, a[i] + b[i] * z);
    sum += best;
    sum_sq += best * best;
  }
  const double mean = sum / static_cast<double>(draws);
  const double var = (sum_sq / static_cast<double>(draws) - mean * mean) * draws / (draws - 1.0);
  return {mean, std::sqrt(std::max(var, 0.0) / static_cast<double>(draws))};
}

MonteCarloEstimate nested_kg(const JointHyperParams& hp, const TrainingSet& training, const DesignPoint& x,
                             const std::vector<DesignPoint>& disc, double noise_var, double jitter, long draws,
                             Rng& rng) {
  std::vector<DesignPoint> queries = disc;
  queries.push_back(x);
  const DensePosterior now = dense_posterior(hp, training, queries, jitter);
  const auto m = static_cast<Eigen::Index>(disc.size());
  const double current_best = now.mean.head(m).maxCoeff();
  const double predictive_sd = std::sqrt(std::max(0.0, now.cov(m, m)) + noise_var);

  TrainingSet extended = training;
  extended.push_back({0, x, 0.0, noise_var});
  std::normal_distribution<double> normal;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (long s = 0; s < draws; ++s) {
    extended.back().value = now.mean[m] + predictive_sd * normal(rng);
    const DensePosterior next = dense_posterior(hp, extended, disc, jitter);
    const double gain = next.mean.maxCoeff() - current_best;
    sum += gain;
    sum_sq += gain * gain;
  }
  const double mean = sum / static_cast<double>(draws);
  const double var = (sum_sq / static_cast<double>(draws) - mean * mean) * draws / (draws - 1.0);
  return {mean, std::sqrt(std::max(var, 0.0) / static_cast<double>(draws))};
}

Eigen::VectorXd central_differences(const std::function<double(const Eigen::VectorXd&)>& f,
                                    const Eigen::VectorXd& theta, double h) {
  Eigen::VectorXd g(theta.size());
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    Eigen::VectorXd up = theta, down = theta;
    up[i] += h;
    down[i] -= h;
    g[i] = (f(up) - f(down)) / (2.0 * h);
  }
  return g;
}

RandomProblem random_problem(int dim, int tasks, int n, KernelFamily family, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto kernel = [&](double amp_lo, double amp_hi) {
    KernelParams k;
    k.family = family;
    k.amplitude = amp_lo + (amp_hi - amp_lo) * unit(rng);
    k.length_scales.resize(dim);
    for (int i = 0; i < dim; ++i) k.length_scales[i] = 0.2 + 0.8 * unit(rng);
    return k;
  };
  RandomProblem p;
  p.hyper.mean_const = 2.0 * unit(rng) - 1.0;
  p.hyper.base = kernel(0.5, 2.0);
  for (int l = 1; l <= tasks; ++l) p.hyper.deltas.push_back(kernel(0.05, 0.5));
  std::normal_distribution<double> normal;
  for (int i = 0; i < n; ++i) {
    Observation o;
    o.task = i % (tasks + 1);
    o.point.resize(dim);
    for (int j = 0; j < dim; ++j) o.point[j] = unit(rng);
    o.value = p.hyper.mean_const + normal(rng);
    o.noise_var = 0.01 + 0.1 * unit(rng);
    p.training.push_back(std::move(o));
  }
  return p;
}

}  // namespace wsbo::verify
