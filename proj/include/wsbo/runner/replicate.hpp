#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wsbo/benchmarks/objective.hpp"
#include "wsbo/runner/optimizer.hpp"

namespace wsbo {

struct GainPoint {
  int iteration = 0;
  double mean_gain = 0.0;
  double se = 0.0;
  int n = 0;
};

struct GainCurve {
  std::string algorithm;
  std::vector<GainPoint> points;
};

/// One algorithm entered in a comparison.
struct Contender {
  Algorithm algorithm = Algorithm::kKG;
  JointHyperParams hyper;
  std::vector<Observation> history;  // WSKG only
};

struct ReplicationPlan {
  int budget = 25;
  int n_initial = 3;
  int disc_size = 1000;
  int replications = 100;
  std::uint64_t seed = 0;
  /// Worker threads; 0 picks the hardware concurrency.
  int threads = 0;
  /// An experiment with more failed replications than this fraction fails.
  double max_failure_fraction = 0.05;
};

/// Gains of one replication: gains[t] for t = 1..budget, best true value
/// found so far minus the best true value of the initial design.
struct ReplicationGains {
  bool failed = false;
  std::string error;
  double initial_best = 0.0;
  std::vector<double> gains;
  RunResult run;
};

struct ComparisonResult {
  std::vector<GainCurve> curves;                          // one per contender
  std::vector<std::vector<ReplicationGains>> replicates;  // [contender][replication]
  std::vector<int> failed;                                // per contender
};

/// Best-so-far gain sequence of a run measured with objective.true_value.
ReplicationGains gains_of_run(const Objective& objective, RunResult run);

/// Mean and standard error per iteration over the non-failed replications.
GainCurve summarize(const std::string& algorithm, const std::vector<ReplicationGains>& reps,
                    int budget);

/// Runs every contender on replications seed+1..seed+R. Within a replication
/// all contenders share the initial design, its observations and the
/// discretization. Throws if a contender fails too many replications.
ComparisonResult replicate(const Objective& objective, const std::vector<Contender>& contenders,
                           const ReplicationPlan& plan);

}  // namespace wsbo
