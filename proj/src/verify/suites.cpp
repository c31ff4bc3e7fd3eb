#include "wsbo/verify/suites.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "wsbo/acquisition.hpp"
#include "wsbo/hyper.hpp"
#include "wsbo/runner/history.hpp"
#include "wsbo/runner/instances.hpp"
#include "wsbo/runner/replicate.hpp"
#include "wsbo/verify/oracles.hpp"

namespace wsbo::verify {

namespace {

DesignPoint uniform_point(Rng& rng, Eigen::Index dim) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  DesignPoint x(dim);
  for (Eigen::Index i = 0; i < dim; ++i) x[i] = unit(rng);
  return x;
}

std::vector<DesignPoint> uniform_points(Rng& rng, Eigen::Index dim, int n) {
  std::vector<DesignPoint> out;
  for (int i = 0; i < n; ++i) out.push_back(uniform_point(rng, dim));
  return out;
}

KernelFamily family_of(int i) { return i % 2 ? KernelFamily::kMatern52 : KernelFamily::kSquaredExponential; }

std::string sci(double v) {
  std::ostringstream s;
  s.precision(3);
  s << std::scientific << v;
  return s.str();
}

CheckOutcome outcome(std::string name, bool pass, std::string detail) {
  return {std::move(name), pass, std::move(detail)};
}

}  // namespace

CheckOutcome check_posterior_oracle(int problems, double tol, std::uint64_t seed) {
  Rng rng = make_stream(seed, "posterior-oracle");
  double worst = 0.0;
  for (int p = 0; p < problems; ++p) {
    const int n = 1 + static_cast<int>(rng() % 30);
    const auto problem = random_problem(1 + p % 3, p % 4, n, family_of(p), rng);
    const PosteriorState state = fit(problem.hyper, problem.training);
    const auto queries = uniform_points(rng, problem.hyper.dim(), 6);
    const DensePosterior oracle = dense_posterior(problem.hyper, problem.training, queries, state.jitter());
    for (std::size_t i = 0; i < queries.size(); ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      worst = std::max(worst, std::abs(posterior_mean_var(state, queries[i]).mean - oracle.mean[ii]));
      for (std::size_t j = 0; j < queries.size(); ++j) {
        const double c = posterior_cov(state, queries[i], queries[j]);
        worst = std::max(worst, std::abs(c - oracle.cov(ii, static_cast<Eigen::Index>(j))));
      }
    }
  }
  return outcome("posterior vs dense inverse", worst <= tol,
                 std::to_string(problems) + " problems, max abs error " + sci(worst));
}

CheckOutcome check_expected_max(int cases, long draws, double k_se, std::uint64_t seed) {
  Rng rng = make_stream(seed, "expected-max-oracle");
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> scale(0.1, 3.0);
  double worst = 0.0;
  for (int c = 0; c < cases; ++c) {
    const std::size_t len = 2 + rng() % 49;
    const double sa = scale(rng), sb = scale(rng);
    std::vector<double> a(len), b(len);
    for (auto& v : a) v = sa * normal(rng);
    for (auto& v : b) v = sb * normal(rng);
    const MonteCarloEstimate mc = mc_expected_max(a, b, draws, rng);
    worst = std::max(worst, std::abs(expected_max_affine(a, b) - mc.mean) / mc.se);
  }
  return outcome("expected max of affine lines vs Monte Carlo", worst <= k_se,
                 std::to_string(cases) + " cases, " + std::to_string(draws) + " draws, worst deviation " +
                     sci(worst) + " SE");
}

CheckOutcome check_kg_nested(int cases, long draws, double k_se, std::uint64_t seed) {
  Rng rng = make_stream(seed, "kg-oracle");
  std::uniform_real_distribution<double> noise_dist(0.01, 0.3);
  double worst = 0.0;
  for (int c = 0; c < cases; ++c) {
    const auto problem = random_problem(2, c % 3, 4 + c % 8, family_of(c), rng);
    const PosteriorState state = fit(problem.hyper, problem.training);
    const auto disc = uniform_points(rng, 2, 30);
    const DesignPoint x = uniform_point(rng, 2);
    const double noise = noise_dist(rng);
    const double kg = kg_factor(state, x, CandidateSet(disc), noise);
    const MonteCarloEstimate mc = nested_kg(problem.hyper, problem.training, x, disc, noise, state.jitter(), draws, rng);
    const double dev = mc.se > 0.0 ? std::abs(kg - mc.mean) / mc.se : (std::abs(kg - mc.mean) < 1e-12 ? 0.0 : HUGE_VAL);
    worst = std::max(worst, dev);
  }
  return outcome("KG factor vs nested simulation", worst <= k_se,
                 std::to_string(cases) + " posteriors, " + std::to_string(draws) + " outer draws, worst deviation " +
                     sci(worst) + " SE");
}

CheckOutcome check_gradient(int configs, double tol, std::uint64_t seed) {
  Rng rng = make_stream(seed, "gradient-check");
  double worst = 0.0;
  for (int c = 0; c < configs; ++c) {
    const auto problem = random_problem(1 + c % 3, c % 3, 12 + static_cast<int>(rng() % 19), family_of(c), rng);
    const ParamLayout layout = layout_of(problem.hyper);
    HyperPrior prior = HyperPrior::flat();
    if (c % 2) {
      prior = HyperPrior::normal(pack(problem.hyper).array() + 0.3, Eigen::VectorXd::Constant(layout.size(), 0.7));
    }
    auto f = [&](const Eigen::VectorXd& theta) { return log_posterior(unpack(layout, theta), prior, problem.training); };
    const Eigen::VectorXd g = grad_log_posterior(problem.hyper, prior, problem.training);
    const Eigen::VectorXd fd = central_differences(f, pack(problem.hyper), 1e-5);
    worst = std::max(worst, (g - fd).lpNorm<Eigen::Infinity>() / fd.lpNorm<Eigen::Infinity>());
  }
  return outcome("log-posterior gradient vs central differences", worst < tol,
                 std::to_string(configs) + " configurations, worst relative error " + sci(worst));
}

namespace {

CheckOutcome psd_grams(Rng& rng) {
  double worst = 0.0;
  for (int t = 0; t < 40; ++t) {
    const int m = t % 4;
    const auto problem = random_problem(1 + t % 3, m, 1, family_of(t), rng);
    const int n = 5 + static_cast<int>(rng() % 46);
    std::vector<TaskPoint> pts;
    for (int i = 0; i < n; ++i) {
      pts.push_back({static_cast<int>(rng() % static_cast<unsigned>(m + 1)), uniform_point(rng, problem.hyper.dim())});
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram(problem.hyper, pts), Eigen::EigenvaluesOnly);
    worst = std::min(worst, es.eigenvalues().minCoeff() / es.eigenvalues().maxCoeff());
  }
  return outcome("gram matrices are PSD", worst >= -1e-8, "40 grams, smallest relative eigenvalue " + sci(worst));
}

CheckOutcome noiseless_interpolation(Rng& rng) {
  double worst_mean = 0.0, worst_var = 0.0;
  for (int t = 0; t < 10; ++t) {
    auto problem = random_problem(2, t % 3, 1, KernelFamily::kMatern52, rng);
    TrainingSet training;
    for (int i = 0; i < 8; ++i) {
      const DesignPoint x = uniform_point(rng, 2);
      training.push_back({0, x, std::sin(3.0 * x[0]) + std::cos(2.0 * x[1]), 0.0});
    }
    for (int l = 1; l <= problem.hyper.num_tasks(); ++l) training.push_back({l, uniform_point(rng, 2), 0.5, 0.1});
    const PosteriorState state = fit(problem.hyper, training);
    for (int i = 0; i < 8; ++i) {
      const MeanVar mv = posterior_mean_var(state, training[static_cast<std::size_t>(i)].point);
      worst_mean = std::max(worst_mean, std::abs(mv.mean - training[static_cast<std::size_t>(i)].value));
      worst_var = std::max(worst_var, std::abs(mv.variance) / problem.hyper.base.amplitude);
    }
  }
  return outcome("noiseless observations are interpolated", worst_mean <= 1e-6 && worst_var <= 1e-6,
                 "max mean error " + sci(worst_mean) + ", max relative variance " + sci(worst_var));
}

CheckOutcome acquisition_nonnegative(Rng& rng) {
  double lowest = 0.0;
  for (int t = 0; t < 20; ++t) {
    const auto problem = random_problem(2, t % 3, 3 + t, family_of(t), rng);
    const PosteriorState state = fit(problem.hyper, problem.training);
    const CandidateSet disc(uniform_points(rng, 2, 100));
    const double noise = 0.001 * (t + 1);
    const auto kg = KnowledgeGradient(state, disc).select(disc, [noise](const DesignPoint&) { return noise; });
    const auto ei = select_next_ei(state, disc, 0.5);
    for (const auto& [x, s] : kg.all_scores) lowest = std::min(lowest, s);
    for (const auto& [x, s] : ei.all_scores) lowest = std::min(lowest, s);
  }
  return outcome("KG and EI scores are nonnegative", lowest >= 0.0, "smallest score " + sci(lowest));
}

JointHyperParams rosenbrock_hyper() {
  JointHyperParams hp;
  hp.mean_const = -300.0;
  hp.base.amplitude = 2e5;
  hp.base.length_scales = Eigen::Vector2d(0.9, 1.2);
  return hp;
}

bool same_trace(const RunResult& a, const RunResult& b) {
  if (a.initial.size() != b.initial.size() || a.trace.size() != b.trace.size()) return false;
  for (std::size_t i = 0; i < a.initial.size(); ++i) {
    if (a.initial[i].point != b.initial[i].point || a.initial[i].value != b.initial[i].value) return false;
  }
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    if (a.trace[i].chosen != b.trace[i].chosen || a.trace[i].observed != b.trace[i].observed ||
        a.trace[i].recommendation != b.trace[i].recommendation)
      return false;
  }
  return a.recommendation == b.recommendation;
}

std::vector<CheckOutcome> runner_properties(std::uint64_t seed) {
  const auto rb1 = make_instance("RB1");
  RunSettings settings;
  settings.budget = 8;
  settings.n_initial = 3;
  settings.disc_size = 300;
  bool monotone = true, replay = true;
  int runs = 0;
  for (const Algorithm algorithm : {Algorithm::kKG, Algorithm::kEGO}) {
    for (std::uint64_t r = 0; r < 3; ++r) {
      settings.algorithm = algorithm;
      settings.seed = seed + r;
      const RunResult first = run_baseline(*rb1, rosenbrock_hyper(), settings);
      const RunResult second = run_baseline(*rb1, rosenbrock_hyper(), settings);
      replay = replay && same_trace(first, second);
      const ReplicationGains g = gains_of_run(*rb1, first);
      for (std::size_t t = 1; t < g.gains.size(); ++t) monotone = monotone && g.gains[t] >= g.gains[t - 1];
      monotone = monotone && g.gains.front() >= 0.0;
      ++runs;
    }
  }
  return {outcome("incumbent gain is non-decreasing", monotone, std::to_string(runs) + " RB1 runs"),
          outcome("identical seeds replay identically", replay, std::to_string(runs) + " RB1 run pairs")};
}

CheckOutcome history_round_trip(Rng& rng) {
  std::normal_distribution<double> normal;
  History h;
  h.dim = 3;
  for (int i = 0; i < 100; ++i) {
    Observation o{1 + static_cast<int>(rng() % 3), DesignPoint(3), std::exp(10.0 * normal(rng)) * normal(rng),
                  std::abs(normal(rng))};
    for (int j = 0; j < 3; ++j) o.point[j] = normal(rng) / 3.0;
    h.records.push_back(std::move(o));
  }
  const auto path = std::filesystem::temp_directory_path() /
                    ("wsbo_roundtrip_" + std::to_string(rng()) + ".csv");
  save_history(h, path);
  const History back = load_history(path);
  std::filesystem::remove(path);
  bool same = back.dim == h.dim && back.records.size() == h.records.size();
  for (std::size_t i = 0; same && i < h.records.size(); ++i) {
    const auto& a = h.records[i];
    const auto& b = back.records[i];
    same = a.task == b.task && a.point == b.point && a.value == b.value && a.noise_var == b.noise_var;
  }
  return outcome("history save/load is exact", same, "100 records");
}

}  // namespace

std::vector<CheckOutcome> check_invariants(std::uint64_t seed) {
  Rng rng = make_stream(seed, "invariant-suite");
  std::vector<CheckOutcome> out;
  out.push_back(psd_grams(rng));
  out.push_back(noiseless_interpolation(rng));
  out.push_back(acquisition_nonnegative(rng));
  for (auto& c : runner_properties(seed)) out.push_back(std::move(c));
  out.push_back(history_round_trip(rng));
  return out;
}

}  // namespace wsbo::verify
