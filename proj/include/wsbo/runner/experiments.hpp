#pragma once

#include <cstdint>
#include <vector>

#include "wsbo/benchmarks/objective.hpp"
#include "wsbo/hyper.hpp"
#include "wsbo/runner/history.hpp"
#include "wsbo/runner/optimizer.hpp"

namespace wsbo {

/// Noisy current-task observations at a Latin hypercube of `n` points.
TrainingSet sample_objective(const Objective& objective, int n, std::uint64_t seed);

/// MAP hyperparameters from `samples` fresh observations of `objective`
/// (task 0) together with `history` (tasks >= 1).
FitReport fit_to_samples(const Objective& objective, int samples, const std::vector<Observation>& history,
                         const HyperPrior& prior, const MapOptions& options);

/// Runs cold KG and returns its initial design plus sampled points as a
/// history on `task`.
History record_history(const Objective& objective, const JointHyperParams& hp, RunSettings settings,
                       int task = 1);

}  // namespace wsbo
