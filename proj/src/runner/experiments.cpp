#include "wsbo/runner/experiments.hpp"

#include "wsbo/errors.hpp"

namespace wsbo {

TrainingSet sample_objective(const Objective& objective, int n, std::uint64_t seed) {
  if (n < 0) throw InvalidArgument("sample count must be nonnegative");
  Rng design = make_stream(seed, "hyperfit-design");
  Rng noise = make_stream(seed, "hyperfit-noise");
  TrainingSet out;
  for (const auto& x : latin_hypercube(objective.domain(), n, design)) out.push_back(objective.evaluate(x, noise));
  return out;
}

FitReport fit_to_samples(const Objective& objective, int samples, const std::vector<Observation>& history,
                         const HyperPrior& prior, const MapOptions& options) {
  TrainingSet training = sample_objective(objective, samples, options.seed);
  for (const auto& obs : history) {
    if (obs.task < 1) throw InvalidArgument("history records must belong to tasks >= 1");
    training.push_back(obs);
  }
  if (training.empty()) throw InvalidArgument("nothing to fit: no samples and no history");
  return map_estimate(prior, training, options);
}

History record_history(const Objective& objective, const JointHyperParams& hp, RunSettings settings, int task) {
  if (task < 1) throw InvalidArgument("history task must be >= 1");
  settings.algorithm = Algorithm::kKG;
  const RunResult run = run_baseline(objective, hp, settings);
  return history_from_run(run.current_task_observations(), static_cast<int>(objective.domain().dim()), task);
}

}  // namespace wsbo
