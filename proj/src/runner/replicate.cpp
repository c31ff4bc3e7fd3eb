#include "wsbo/runner/replicate.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "wsbo/errors.hpp"

namespace wsbo {

ReplicationGains gains_of_run(const Objective& objective, RunResult run) {
  if (run.initial.empty()) throw InvalidArgument("gain needs at least one initial design point");
  ReplicationGains out;
  double best = objective.true_value(run.initial.front().point);
  for (const auto& obs : run.initial) best = std::max(best, objective.true_value(obs.point));
  out.initial_best = best;
  for (const auto& entry : run.trace) {
    best = std::max(best, objective.true_value(entry.chosen));
    out.gains.push_back(best - out.initial_best);
  }
  out.run = std::move(run);
  return out;
}

GainCurve summarize(const std::string& algorithm, const std::vector<ReplicationGains>& reps, int budget) {
  GainCurve curve{algorithm, {}};
  for (int t = 1; t <= budget; ++t) {
    double sum = 0.0;
    int n = 0;
    for (const auto& r : reps) {
      if (r.failed) continue;
      sum += r.gains[static_cast<std::size_t>(t - 1)];
      ++n;
    }
    GainPoint p{t, n > 0 ? sum / n : std::nan(""), 0.0, n};
    if (n > 1) {
      double ss = 0.0;
      for (const auto& r : reps) {
        if (r.failed) continue;
        const double d = r.gains[static_cast<std::size_t>(t - 1)] - p.mean_gain;
        ss += d * d;
      }
      p.se = std::sqrt(ss / (n - 1) / n);
    }
    curve.points.push_back(p);
  }
  return curve;
}

namespace {

template <typename Fn>
void parallel_for(int count, int threads, Fn&& fn) {
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::jthread> pool;
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) fn(i);
    });
  }
}

}  // namespace

ComparisonResult replicate(const Objective& objective, const std::vector<Contender>& contenders,
                           const ReplicationPlan& plan) {
  if (plan.replications < 1) throw InvalidArgument("replications must be at least 1");
  if (plan.budget < 1) throw InvalidArgument("budget must be at least 1");
  if (plan.n_initial < 1) throw InvalidArgument("gain curves need at least one initial design point");
  if (contenders.empty()) throw InvalidArgument("no algorithms to compare");

  ComparisonResult result;
  result.replicates.assign(contenders.size(), std::vector<ReplicationGains>(static_cast<std::size_t>(plan.replications)));
  parallel_for(plan.replications, plan.threads, [&](int r) {
    RunSettings settings;
    settings.budget = plan.budget;
    settings.n_initial = plan.n_initial;
    settings.disc_size = plan.disc_size;
    settings.seed = plan.seed + static_cast<std::uint64_t>(r) + 1;
    for (std::size_t c = 0; c < contenders.size(); ++c) {
      const Contender& contender = contenders[c];
      ReplicationGains& slot = result.replicates[c][static_cast<std::size_t>(r)];
      try {
        settings.algorithm = contender.algorithm;
        RunResult run = contender.algorithm == Algorithm::kWSKG
                            ? run_wskg(objective, contender.hyper, contender.history, settings)
                            : run_baseline(objective, contender.hyper, settings);
        slot = gains_of_run(objective, std::move(run));
      } catch (const std::exception& e) {
        slot = ReplicationGains{};
        slot.failed = true;
        slot.error = e.what();
      }
    }
  });

  for (std::size_t c = 0; c < contenders.size(); ++c) {
    int failed = 0;
    for (const auto& r : result.replicates[c]) failed += r.failed ? 1 : 0;
    result.failed.push_back(failed);
    result.curves.push_back(summarize(std::string(to_string(contenders[c].algorithm)), result.replicates[c], plan.budget));
    if (failed > plan.max_failure_fraction * plan.replications) {
      std::string first_error;
      for (const auto& r : result.replicates[c]) {
        if (r.failed) {
          first_error = r.error;
          break;
        }
      }
      throw std::runtime_error(std::string(to_string(contenders[c].algorithm)) + ": " + std::to_string(failed) +
                               " of " + std::to_string(plan.replications) + " replications failed (" + first_error + ")");
    }
  }
  return result;
}

}  // namespace wsbo
