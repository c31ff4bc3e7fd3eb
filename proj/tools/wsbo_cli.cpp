#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wsbo/errors.hpp"
#include "wsbo/runner/experiments.hpp"
#include "wsbo/runner/history.hpp"
#include "wsbo/runner/hyperparams_file.hpp"
#include "wsbo/runner/instances.hpp"
#include "wsbo/runner/replicate.hpp"
#include "wsbo/runner/results.hpp"
#include "wsbo/verify/suites.hpp"

namespace fs = std::filesystem;
using namespace wsbo;

namespace {

struct Common {
  std::string instance;
  std::optional<int> budget;
  std::optional<int> n_initial;
  std::optional<int> disc_size;
  int replications = 100;
  std::uint64_t seed = 0;
  int threads = 0;
  std::vector<std::string> histories;
  std::string hyperparams;
  std::string baseline_hyperparams;
  std::string out = "results";
  std::optional<std::string> ato_config;
};

std::optional<fs::path> ato_path(const Common& c) {
  if (c.ato_config) return fs::path(*c.ato_config);
  return std::nullopt;
}

History load_histories(const std::vector<std::string>& paths) {
  std::vector<History> loaded;
  for (const auto& p : paths) loaded.push_back(load_history(p));
  return merge_histories(loaded);
}

ReplicationPlan plan_of(const Common& c) {
  const InstanceDefaults d = instance_defaults(c.instance);
  ReplicationPlan plan;
  plan.budget = c.budget.value_or(d.budget);
  plan.n_initial = c.n_initial.value_or(d.n_initial);
  plan.disc_size = c.disc_size.value_or(d.disc_size);
  plan.replications = c.replications;
  plan.seed = c.seed;
  plan.threads = c.threads;
  return plan;
}

void check_history_dim(const History& h, const Objective& objective) {
  if (!h.empty() && h.dim != objective.domain().dim()) {
    throw InvalidArgument("history has dimension " + std::to_string(h.dim) + " but " + objective.name() +
                          " has dimension " + std::to_string(objective.domain().dim()));
  }
}

void write_replications(const ComparisonResult& result, const std::vector<Contender>& contenders,
                        const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << "replication,algorithm,iteration,gain\n";
  for (std::size_t c = 0; c < contenders.size(); ++c) {
    const auto& reps = result.replicates[c];
    for (std::size_t r = 0; r < reps.size(); ++r) {
      if (reps[r].failed) continue;
      for (std::size_t t = 0; t < reps[r].gains.size(); ++t) {
        out << r + 1 << ',' << to_string(contenders[c].algorithm) << ',' << t + 1 << ','
            << format_double(reps[r].gains[t]) << '\n';
      }
    }
  }
}

void report(const ComparisonResult& result, const std::string& instance, const fs::path& out_dir) {
  for (std::size_t c = 0; c < result.curves.size(); ++c) {
    const auto& curve = result.curves[c];
    const auto& last = curve.points.back();
    std::printf("%s %-4s gain@%d %.6g +- %.3g (n=%d, failed=%d)\n", instance.c_str(), curve.algorithm.c_str(),
                last.iteration, last.mean_gain, last.se, last.n, result.failed[c]);
  }
  std::printf("wrote %s\n", (out_dir / (instance + ".csv")).string().c_str());
}

int cmd_run(const Common& c, const std::string& algorithm_name, const std::string& save_history_path) {
  const Algorithm algorithm = algorithm_from_string(algorithm_name);
  const auto objective = make_instance(c.instance, ato_path(c));
  const History history = load_histories(c.histories);
  if (algorithm == Algorithm::kWSKG && history.empty()) {
    throw InvalidArgument("WSKG needs at least one non-empty history file (--history)");
  }
  if (algorithm != Algorithm::kWSKG && !c.histories.empty()) {
    throw InvalidArgument(algorithm_name + " does not take --history");
  }
  check_history_dim(history, *objective);
  const std::vector<Contender> contenders{{algorithm, load_hyperparams(c.hyperparams), history.records}};
  const ReplicationPlan plan = plan_of(c);
  const ComparisonResult result = replicate(*objective, contenders, plan);

  fs::create_directories(c.out);
  emit_results(result.curves, fs::path(c.out) / (c.instance + ".csv"));
  write_replications(result, contenders, fs::path(c.out) / (c.instance + "_replications.csv"));
  if (!save_history_path.empty()) {
    const auto& first = result.replicates.front().front();
    if (first.failed) throw std::runtime_error("replication 1 failed; no history to save: " + first.error);
    save_history(history_from_run(first.run.current_task_observations(),
                                  static_cast<int>(objective->domain().dim())),
                 save_history_path);
    std::printf("saved history of replication 1 to %s\n", save_history_path.c_str());
  }
  report(result, c.instance, c.out);
  return 0;
}

int cmd_compare(const Common& c, const std::vector<std::string>& algorithm_names) {
  const auto objective = make_instance(c.instance, ato_path(c));
  const History history = load_histories(c.histories);
  check_history_dim(history, *objective);
  const JointHyperParams hp = load_hyperparams(c.hyperparams);
  const JointHyperParams baseline_hp =
      c.baseline_hyperparams.empty() ? with_task_count(hp, 0) : load_hyperparams(c.baseline_hyperparams);
  std::vector<Contender> contenders;
  for (const auto& name : algorithm_names) {
    const Algorithm a = algorithm_from_string(name);
    if (a == Algorithm::kWSKG) {
      if (history.empty()) throw InvalidArgument("WSKG needs at least one non-empty history file (--history)");
      contenders.push_back({a, hp, history.records});
    } else {
      contenders.push_back({a, baseline_hp, {}});
    }
  }
  const ComparisonResult result = replicate(*objective, contenders, plan_of(c));
  fs::create_directories(c.out);
  emit_results(result.curves, fs::path(c.out) / (c.instance + ".csv"));
  write_replications(result, contenders, fs::path(c.out) / (c.instance + "_replications.csv"));
  report(result, c.instance, c.out);
  return 0;
}

struct HyperfitArgs {
  int samples = 50;
  int restarts = 10;
  std::string family = "matern52";
  std::vector<std::string> priors;
  std::string name = "hyperparams";
};

int cmd_hyperfit(const Common& c, const HyperfitArgs& h) {
  const History history = load_histories(c.histories);
  std::vector<JointHyperParams> previous;
  for (const auto& p : h.priors) previous.push_back(load_hyperparams(p));
  MapOptions options;
  options.family = kernel_family_from_string(h.family);
  options.n_restarts = h.restarts;
  options.seed = c.seed;
  const HyperPrior prior = empirical_prior(previous);

  FitReport fit_report;
  if (!c.instance.empty()) {
    const auto objective = make_instance(c.instance, ato_path(c));
    check_history_dim(history, *objective);
    fit_report = fit_to_samples(*objective, h.samples, history.records, prior, options);
  } else {
    if (history.empty()) throw InvalidArgument("hyperfit needs --instance or a non-empty --history");
    fit_report = map_estimate(prior, history.records, options);
  }
  int failed = 0;
  for (const auto& r : fit_report.restarts) failed += r.failed ? 1 : 0;
  fs::create_directories(c.out);
  const fs::path path = fs::path(c.out) / (h.name + ".txt");
  save_hyperparams(fit_report.best_params, path);
  std::printf("log posterior %.10g, %d of %zu restarts failed\nwrote %s\n", fit_report.best_objective, failed,
              fit_report.restarts.size(), path.string().c_str());
  return 0;
}

struct BenchArgs {
  std::vector<std::string> suites{"gp", "kg", "gradient", "invariants"};
  bool quick = false;
};

int cmd_bench(const Common& c, const BenchArgs& b) {
  bool all = true;
  auto print = [&](const verify::CheckOutcome& o, double seconds) {
    std::printf("%s %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", o.name.c_str(), o.detail.c_str(), seconds);
    std::fflush(stdout);
    all = all && o.pass;
  };
  for (const auto& suite : b.suites) {
    const auto start = std::chrono::steady_clock::now();
    auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };
    if (suite == "gp") {
      const auto o = verify::check_posterior_oracle(b.quick ? 10 : 60, 1e-8, c.seed);
      print(o, elapsed());
    } else if (suite == "kg") {
      const auto o1 = verify::check_expected_max(b.quick ? 10 : 50, b.quick ? 100000 : 1000000, 3.0, c.seed);
      print(o1, elapsed());
      const auto o2 = verify::check_kg_nested(b.quick ? 3 : 10, b.quick ? 20000 : 100000, 3.0, c.seed);
      print(o2, elapsed());
    } else if (suite == "gradient") {
      print(verify::check_gradient(10, 1e-5, c.seed), elapsed());
    } else if (suite == "invariants") {
      for (const auto& o : verify::check_invariants(c.seed)) print(o, elapsed());
    } else {
      throw InvalidArgument("unknown suite '" + suite + "' (gp, kg, gradient, invariants)");
    }
  }
  return all ? 0 : 1;
}

int fail(const char* kind, const std::string& message) {
  std::fprintf(stderr, "error: %s: %s\n", kind, message.c_str());
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Warm-start knowledge-gradient Bayesian optimization"};
  app.require_subcommand(1);
  Common c;

  auto add_instance_opts = [&](CLI::App* cmd, bool instance_required) {
    auto* opt = cmd->add_option("--instance", c.instance, "RB1..RB4 or ATO1..ATO4");
    if (instance_required) opt->required();
    cmd->add_option("--seed", c.seed, "base seed");
    cmd->add_option("--out", c.out, "output directory");
    cmd->add_option("--ato-config", c.ato_config, "ATO configuration JSON (default: built-in)");
  };
  auto add_experiment_opts = [&](CLI::App* cmd) {
    add_instance_opts(cmd, true);
    cmd->add_option("--budget", c.budget, "iterations per run (25 RB, 50 ATO)");
    cmd->add_option("--n-initial", c.n_initial, "initial Latin-hypercube points (3 RB, 5 ATO)");
    cmd->add_option("--disc-size", c.disc_size, "discretization size (1000 RB, 2500 ATO)");
    cmd->add_option("--replications", c.replications, "replications")->check(CLI::PositiveNumber);
    cmd->add_option("--threads", c.threads, "worker threads (0: all cores)");
    cmd->add_option("--history", c.histories, "history files of previous tasks");
    cmd->add_option("--hyperparams", c.hyperparams, "hyperparameter file")->required()->check(CLI::ExistingFile);
  };

  std::string algorithm;
  std::string save_history_path;
  auto* run = app.add_subcommand("run", "replicate one algorithm on one instance");
  add_experiment_opts(run);
  run->add_option("--algorithm", algorithm, "WSKG, KG or EGO")->required();
  run->add_option("--save-history", save_history_path, "write replication 1's observations as a history file");

  std::vector<std::string> algorithms{"WSKG", "KG", "EGO"};
  auto* compare = app.add_subcommand("compare", "WSKG vs KG vs EGO with shared initial data");
  add_experiment_opts(compare);
  compare->add_option("--algorithms", algorithms, "algorithms to compare")->delimiter(',');
  compare->add_option("--baseline-hyperparams", c.baseline_hyperparams,
                      "hyperparameters for KG/EGO (default: --hyperparams without task kernels)")
      ->check(CLI::ExistingFile);

  HyperfitArgs h;
  auto* hyperfit = app.add_subcommand("hyperfit", "MAP hyperparameters from fresh samples and/or histories");
  add_instance_opts(hyperfit, false);
  hyperfit->add_option("--samples", h.samples, "fresh current-task samples when --instance is given");
  hyperfit->add_option("--history", c.histories, "history files of previous tasks");
  hyperfit->add_option("--family", h.family, "matern52 or se");
  hyperfit->add_option("--restarts", h.restarts, "optimizer restarts");
  hyperfit->add_option("--prior", h.priors, "earlier hyperparameter files defining an empirical prior");
  hyperfit->add_option("--name", h.name, "output file stem");

  BenchArgs b;
  auto* bench = app.add_subcommand("bench", "oracle and property suites");
  bench->add_option("--suite", b.suites, "gp, kg, gradient, invariants")->delimiter(',');
  bench->add_option("--seed", c.seed, "seed");
  bench->add_flag("--quick", b.quick, "smaller sample sizes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what());
  }

  try {
    if (*run) return cmd_run(c, algorithm, save_history_path);
    if (*compare) return cmd_compare(c, algorithms);
    if (*hyperfit) return cmd_hyperfit(c, h);
    return cmd_bench(c, b);
  } catch (const ParseError& e) {
    return fail("parse-error", e.what());
  } catch (const InvalidArgument& e) {
    return fail("invalid-argument", e.what());
  } catch (const IllConditioned& e) {
    return fail("ill-conditioned", e.what());
  } catch (const DegenerateMeasurement& e) {
    return fail("degenerate-measurement", e.what());
  } catch (const EstimationFailed& e) {
    return fail("estimation-failed", e.what());
  } catch (const std::exception& e) {
    return fail("runtime", e.what());
  }
}
