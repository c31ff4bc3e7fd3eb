#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "wsbo/benchmarks/objective.hpp"
#include "wsbo/gp.hpp"
#include "wsbo/kernels.hpp"

namespace wsbo {

enum class Algorithm { kWSKG, kKG, kEGO };

std::string_view to_string(Algorithm algorithm);
Algorithm algorithm_from_string(std::string_view name);

struct RunSettings {
  Algorithm algorithm = Algorithm::kWSKG;
  int budget = 25;
  int n_initial = 3;
  int disc_size = 1000;
  std::uint64_t seed = 0;
  /// Overrides the discretization stream seed (defaults to one derived from `seed`).
  std::optional<std::uint64_t> disc_seed;
  FitOptions fit;
};

struct TraceEntry {
  int iteration = 0;
  DesignPoint chosen;
  double observed = 0.0;
  double noise_var = 0.0;
  double chosen_score = 0.0;
  double max_score = 0.0;
  DesignPoint recommendation;
  double recommendation_mean = 0.0;
};

struct RunResult {
  std::vector<Observation> initial;
  std::vector<TraceEntry> trace;
  DesignPoint recommendation;
  double recommendation_mean = 0.0;

  /// Initial observations followed by one observation per trace entry.
  std::vector<Observation> current_task_observations() const;
};

/// Warm-started knowledge-gradient loop. `history` holds observations on tasks
/// 1..M; `hp` is brought to M difference kernels. Hyperparameters stay fixed.
RunResult run_wskg(const Objective& objective, const JointHyperParams& hp,
                   const std::vector<Observation>& history, RunSettings settings);

/// Single-task KG or EGO loop.
RunResult run_baseline(const Objective& objective, const JointHyperParams& hp,
                       RunSettings settings);

}  // namespace wsbo
