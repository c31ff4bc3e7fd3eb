#include "wsbo/runner/optimizer.hpp"

#include <string>

#include "wsbo/acquisition.hpp"
#include "wsbo/errors.hpp"

namespace wsbo {

std::string_view to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kWSKG: return "WSKG";
    case Algorithm::kKG: return "KG";
    case Algorithm::kEGO: return "EGO";
  }
  return "?";
}

Algorithm algorithm_from_string(std::string_view name) {
  if (name == "WSKG") return Algorithm::kWSKG;
  if (name == "KG") return Algorithm::kKG;
  if (name == "EGO") return Algorithm::kEGO;
  throw InvalidArgument("unknown algorithm '" + std::string(name) + "'");
}

std::vector<Observation> RunResult::current_task_observations() const {
  std::vector<Observation> out = initial;
  for (const auto& t : trace) out.push_back({0, t.chosen, t.observed, t.noise_var});
  return out;
}

namespace {

struct Recommendation {
  DesignPoint point;
  double mean;
};

Eigen::VectorXd posterior_means(const PosteriorState& state, const std::vector<DesignPoint>& points) {
  Eigen::VectorXd means = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(points.size()), state.hyper().mean_const);
  if (state.size() > 0 && !points.empty()) means.noalias() += state.cross_cov(points).transpose() * state.weights();
  return means;
}

// argmax of the posterior mean over the discretization
Recommendation recommend(const PosteriorState& state, const CandidateSet& disc) {
  const Eigen::VectorXd means = posterior_means(state, disc.points());
  Eigen::Index best = 0;
  means.maxCoeff(&best);
  return {disc[static_cast<std::size_t>(best)], means[best]};
}

RunResult run_loop(const Objective& objective, const JointHyperParams& hp, const std::vector<Observation>& history,
                   const RunSettings& settings) {
  if (settings.budget < 0) throw InvalidArgument("budget must be nonnegative");
  if (settings.n_initial < 0) throw InvalidArgument("n_initial must be nonnegative");
  if (settings.disc_size < 1) throw InvalidArgument("discretization size must be positive");
  const Box& box = objective.domain();
  if (hp.dim() != box.dim()) throw InvalidArgument("hyperparameters do not match the problem dimension");

  int m = 0;
  for (const auto& obs : history) {
    if (obs.task < 1) throw InvalidArgument("history records must belong to tasks >= 1");
    if (obs.point.size() != box.dim()) throw InvalidArgument("history dimension does not match the problem");
    m = std::max(m, obs.task);
  }
  const JointHyperParams model = with_task_count(hp, m);

  Rng design_rng = make_stream(settings.seed, "initial-design");
  Rng initial_noise = make_stream(settings.seed, "initial-noise");
  Rng noise = make_stream(settings.seed, "evaluation-noise");
  Rng disc_rng(settings.disc_seed.value_or(stream_seed(settings.seed, "discretization")));

  RunResult result;
  for (const auto& x : latin_hypercube(box, settings.n_initial, design_rng)) {
    result.initial.push_back(objective.evaluate(x, initial_noise));
  }
  const CandidateSet disc(latin_hypercube(box, settings.disc_size, disc_rng));

  TrainingSet training = history;
  training.insert(training.end(), result.initial.begin(), result.initial.end());
  PosteriorState state = fit(model, std::move(training), settings.fit);

  Eigen::MatrixXd disc_prior_cov;
  if (settings.algorithm != Algorithm::kEGO && settings.budget > 0) {
    disc_prior_cov = base_cross_cov(model.base, disc.points(), disc.points());
  }

  std::vector<DesignPoint> sampled;
  double noise_sum = 0.0;
  int noise_count = 0;
  for (const auto& obs : result.initial) {
    sampled.push_back(obs.point);
    noise_sum += obs.noise_var;
    ++noise_count;
  }
  if (noise_count == 0) {
    for (const auto& obs : history) {
      noise_sum += obs.noise_var;
      ++noise_count;
    }
  }

  for (int it = 1; it <= settings.budget; ++it) {
    AcquisitionResult choice;
    if (settings.algorithm == Algorithm::kEGO) {
      const Eigen::VectorXd means = posterior_means(state, sampled);
      const double best = means.size() > 0 ? means.maxCoeff() : recommend(state, disc).mean;
      choice = select_next_ei(state, disc, best);
    } else {
      const double lambda = noise_count > 0 ? noise_sum / noise_count : 0.0;
      choice = KnowledgeGradient(state, disc, &disc_prior_cov).select(disc, [lambda](const DesignPoint&) { return lambda; });
    }
    double max_score = choice.all_scores.front().second;
    for (const auto& [x, s] : choice.all_scores) max_score = std::max(max_score, s);

    const Observation obs = objective.evaluate(choice.chosen, noise);
    state = condition_on(state, obs);
    sampled.push_back(obs.point);
    noise_sum += obs.noise_var;
    ++noise_count;

    const Recommendation rec = recommend(state, disc);
    result.trace.push_back({it, obs.point, obs.value, obs.noise_var, choice.score, max_score, rec.point, rec.mean});
  }
  const Recommendation rec = recommend(state, disc);
  result.recommendation = rec.point;
  result.recommendation_mean = rec.mean;
  return result;
}

}  // namespace

RunResult run_wskg(const Objective& objective, const JointHyperParams& hp, const std::vector<Observation>& history,
                   RunSettings settings) {
  settings.algorithm = Algorithm::kWSKG;
  return run_loop(objective, hp, history, settings);
}

RunResult run_baseline(const Objective& objective, const JointHyperParams& hp, RunSettings settings) {
  if (settings.algorithm == Algorithm::kWSKG) {
    throw InvalidArgument("run_baseline expects KG or EGO");
  }
  return run_loop(objective, hp, {}, settings);
}

}  // namespace wsbo
