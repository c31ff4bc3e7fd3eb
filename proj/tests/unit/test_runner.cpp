#include <gtest/gtest.h>

#include <cmath>

#include "wsbo/acquisition.hpp"
#include "wsbo/benchmarks/rosenbrock.hpp"
#include "wsbo/errors.hpp"
#include "wsbo/runner/experiments.hpp"
#include "wsbo/runner/instances.hpp"
#include "wsbo/runner/optimizer.hpp"
#include "wsbo/runner/replicate.hpp"

using namespace wsbo;

namespace {

JointHyperParams rb_hyper() {
  JointHyperParams hp;
  hp.mean_const = -300.0;
  hp.base.amplitude = 2e5;
  hp.base.length_scales = Eigen::Vector2d(0.9, 1.2);
  KernelParams d;
  d.amplitude = 5.0;
  d.length_scales = Eigen::Vector2d(1.0, 1.0);
  hp.deltas = {d};
  return hp;
}

RunSettings small(Algorithm a, std::uint64_t seed, int budget = 4) {
  RunSettings s;
  s.algorithm = a;
  s.budget = budget;
  s.n_initial = 3;
  s.disc_size = 150;
  s.seed = seed;
  return s;
}

std::vector<Observation> rb1_history(int n) {
  RosenbrockObjective rb1({RosenbrockId::kRB1, 0.25});
  Rng rng(5);
  std::vector<Observation> h;
  for (const auto& x : latin_hypercube(rb1.domain(), n, rng)) {
    auto o = rb1.evaluate(x, rng);
    o.task = 1;
    h.push_back(o);
  }
  return h;
}

void expect_same_trace(const RunResult& a, const RunResult& b) {
  ASSERT_EQ(a.initial, b.initial);
  ASSERT_EQ(a.trace.size(), b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    EXPECT_EQ(a.trace[i].chosen, b.trace[i].chosen);
    EXPECT_EQ(a.trace[i].observed, b.trace[i].observed);
    EXPECT_EQ(a.trace[i].chosen_score, b.trace[i].chosen_score);
    EXPECT_EQ(a.trace[i].recommendation, b.trace[i].recommendation);
    EXPECT_EQ(a.trace[i].recommendation_mean, b.trace[i].recommendation_mean);
  }
  EXPECT_EQ(a.recommendation, b.recommendation);
}

// Noise-free objective that ignores its input.
class Flat final : public Objective {
 public:
  std::string name() const override { return "flat"; }
  const Box& domain() const override { return rosenbrock_domain(); }
  Observation evaluate(const DesignPoint& x, Rng&) const override { return {0, x, 1.0, 0.0}; }
  double true_value(const DesignPoint&) const override { return 1.0; }
};

// Throws on evaluation number `fail_at` (every evaluation when 0).
class Flaky final : public Objective {
 public:
  explicit Flaky(int fail_at) : fail_at_(fail_at) {}
  std::string name() const override { return "flaky"; }
  const Box& domain() const override { return rosenbrock_domain(); }
  Observation evaluate(const DesignPoint& x, Rng& rng) const override {
    if (++calls_ == fail_at_ || fail_at_ == 0) throw std::runtime_error("simulator crashed");
    return {0, x, -x.squaredNorm() + 0.1 * std::normal_distribution<double>()(rng), 0.01};
  }
  double true_value(const DesignPoint& x) const override { return -x.squaredNorm(); }

 private:
  int fail_at_;
  mutable int calls_ = 0;
};

}  // namespace

TEST(Algorithm, Names) {
  EXPECT_EQ(algorithm_from_string("EGO"), Algorithm::kEGO);
  EXPECT_EQ(to_string(Algorithm::kWSKG), "WSKG");
  EXPECT_THROW(algorithm_from_string("ei"), InvalidArgument);
}

TEST(RunWskg, DeterministicReplay) {
  auto rb3 = make_instance("RB3");
  auto h = rb1_history(10);
  auto a = run_wskg(*rb3, rb_hyper(), h, small(Algorithm::kWSKG, 7));
  auto b = run_wskg(*rb3, rb_hyper(), h, small(Algorithm::kWSKG, 7));
  expect_same_trace(a, b);
  auto c = run_wskg(*rb3, rb_hyper(), h, small(Algorithm::kWSKG, 8));
  EXPECT_NE(a.initial.front().point, c.initial.front().point);
}

TEST(RunWskg, EmptyHistoryEqualsColdKg) {
  auto rb1 = make_instance("RB1");
  for (std::uint64_t seed : {1, 2, 3}) {
    auto warm = run_wskg(*rb1, rb_hyper(), {}, small(Algorithm::kWSKG, seed));
    auto cold = run_baseline(*rb1, rb_hyper(), small(Algorithm::kKG, seed));
    expect_same_trace(warm, cold);
  }
}

TEST(RunWskg, TraceShapeAndAudit) {
  auto rb2 = make_instance("RB2");
  auto h = rb1_history(8);
  auto r = run_wskg(*rb2, rb_hyper(), h, small(Algorithm::kWSKG, 11, 5));
  ASSERT_EQ(r.trace.size(), 5u);
  ASSERT_EQ(r.initial.size(), 3u);
  for (std::size_t i = 0; i < r.trace.size(); ++i) {
    EXPECT_EQ(r.trace[i].iteration, static_cast<int>(i) + 1);
    EXPECT_EQ(r.trace[i].chosen_score, r.trace[i].max_score);
    EXPECT_GE(r.trace[i].chosen_score, 0.0);
    EXPECT_EQ(r.trace[i].noise_var, 0.25);
    EXPECT_TRUE(rb2->domain().contains(r.trace[i].chosen));
  }
  EXPECT_EQ(r.recommendation, r.trace.back().recommendation);
  EXPECT_EQ(r.current_task_observations().size(), 8u);
}

TEST(RunWskg, RecommendationIsPosteriorArgmax) {
  auto rb4 = make_instance("RB4");
  auto h = rb1_history(6);
  auto settings = small(Algorithm::kWSKG, 21, 0);
  auto r = run_wskg(*rb4, rb_hyper(), h, settings);
  EXPECT_TRUE(r.trace.empty());
  TrainingSet t = h;
  t.insert(t.end(), r.initial.begin(), r.initial.end());
  auto state = fit(rb_hyper(), t);
  Rng disc_rng(stream_seed(settings.seed, "discretization"));
  auto disc = latin_hypercube(rb4->domain(), settings.disc_size, disc_rng);
  double best = -std::numeric_limits<double>::infinity();
  DesignPoint arg;
  for (const auto& x : disc) {
    const double m = posterior_mean_var(state, x).mean;
    if (m > best) {
      best = m;
      arg = x;
    }
  }
  EXPECT_EQ(r.recommendation, arg);
  EXPECT_NEAR(r.recommendation_mean, best, 1e-9 * std::abs(best));
}

TEST(RunWskg, RejectsBadInput) {
  auto rb1 = make_instance("RB1");
  auto h = rb1_history(4);
  h[2].task = 0;
  EXPECT_THROW(run_wskg(*rb1, rb_hyper(), h, small(Algorithm::kWSKG, 1)), InvalidArgument);
  auto s = small(Algorithm::kWSKG, 1);
  s.budget = -1;
  EXPECT_THROW(run_wskg(*rb1, rb_hyper(), {}, s), InvalidArgument);
  EXPECT_THROW(run_baseline(*rb1, rb_hyper(), small(Algorithm::kWSKG, 1)), InvalidArgument);
  auto hp3 = rb_hyper();
  hp3.base.length_scales = Eigen::Vector3d(1, 1, 1);
  EXPECT_THROW(run_baseline(*rb1, hp3, small(Algorithm::kKG, 1)), InvalidArgument);
}

TEST(RunBaseline, EgoPicksMaximalExpectedImprovement) {
  auto rb1 = make_instance("RB1");
  auto r = run_baseline(*rb1, rb_hyper(), small(Algorithm::kEGO, 4, 6));
  for (const auto& e : r.trace) EXPECT_EQ(e.chosen_score, e.max_score);

  // Recompute the first choice directly.
  auto settings = small(Algorithm::kEGO, 4, 6);
  auto state = fit(with_task_count(rb_hyper(), 0), TrainingSet(r.initial.begin(), r.initial.end()));
  Rng disc_rng(stream_seed(settings.seed, "discretization"));
  CandidateSet disc(latin_hypercube(rb1->domain(), settings.disc_size, disc_rng));
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& o : r.initial) best = std::max(best, posterior_mean_var(state, o.point).mean);
  auto ei = select_next_ei(state, disc, best);
  EXPECT_EQ(ei.chosen, r.trace.front().chosen);
  EXPECT_EQ(ei.score, r.trace.front().chosen_score);
}

TEST(RunBaseline, DeterministicReplay) {
  auto rb2 = make_instance("RB2");
  for (auto a : {Algorithm::kKG, Algorithm::kEGO}) {
    expect_same_trace(run_baseline(*rb2, rb_hyper(), small(a, 9)), run_baseline(*rb2, rb_hyper(), small(a, 9)));
  }
}

TEST(Streams, DiscretizationAndNoiseAreIndependent) {
  auto rb1 = make_instance("RB1");
  auto s1 = small(Algorithm::kKG, 30, 5);
  auto s2 = s1;
  s1.disc_seed = 1;
  s2.disc_seed = 2;
  auto a = run_baseline(*rb1, rb_hyper(), s1);
  auto b = run_baseline(*rb1, rb_hyper(), s2);
  EXPECT_EQ(a.initial, b.initial);
  bool any_point_differs = false;
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    const double noise_a = a.trace[i].observed - rb1->true_value(a.trace[i].chosen);
    const double noise_b = b.trace[i].observed - rb1->true_value(b.trace[i].chosen);
    EXPECT_NEAR(noise_a, noise_b, 1e-9);
    any_point_differs = any_point_differs || a.trace[i].chosen != b.trace[i].chosen;
  }
  EXPECT_TRUE(any_point_differs);

  // Same discretization seed, different run seed: every choice lies in the same point set.
  auto s3 = small(Algorithm::kKG, 31, 5);
  s3.disc_seed = 1;
  auto c = run_baseline(*rb1, rb_hyper(), s3);
  Rng disc_rng(1);
  auto disc = latin_hypercube(rb1->domain(), s1.disc_size, disc_rng);
  for (const auto* run : {&a, &c}) {
    for (const auto& e : run->trace) {
      EXPECT_NE(std::find(disc.begin(), disc.end(), e.chosen), disc.end());
    }
  }
  EXPECT_NE(a.initial.front().point, c.initial.front().point);
}

TEST(Gains, IncumbentIsMonotone) {
  auto rb3 = make_instance("RB3");
  auto h = rb1_history(8);
  for (std::uint64_t seed : {1, 2, 3, 4}) {
    auto g = gains_of_run(*rb3, run_wskg(*rb3, rb_hyper(), h, small(Algorithm::kWSKG, seed, 6)));
    ASSERT_EQ(g.gains.size(), 6u);
    EXPECT_GE(g.gains.front(), 0.0);
    for (std::size_t t = 1; t < g.gains.size(); ++t) EXPECT_GE(g.gains[t], g.gains[t - 1]);
  }
}

TEST(Replicate, SharedInitialDataAcrossAlgorithms) {
  auto rb2 = make_instance("RB2");
  ReplicationPlan plan;
  plan.budget = 3;
  plan.disc_size = 100;
  plan.replications = 4;
  plan.seed = 50;
  plan.threads = 2;
  std::vector<Contender> cs = {{Algorithm::kWSKG, rb_hyper(), rb1_history(6)},
                               {Algorithm::kKG, rb_hyper(), {}},
                               {Algorithm::kEGO, rb_hyper(), {}}};
  auto res = replicate(*rb2, cs, plan);
  ASSERT_EQ(res.curves.size(), 3u);
  EXPECT_EQ(res.curves[0].algorithm, "WSKG");
  for (int r = 0; r < 4; ++r) {
    EXPECT_EQ(res.replicates[0][r].initial_best, res.replicates[1][r].initial_best);
    EXPECT_EQ(res.replicates[1][r].initial_best, res.replicates[2][r].initial_best);
    EXPECT_EQ(res.replicates[0][r].run.initial, res.replicates[2][r].run.initial);
  }
  for (const auto& curve : res.curves) {
    ASSERT_EQ(curve.points.size(), 3u);
    for (const auto& p : curve.points) EXPECT_EQ(p.n, 4);
  }
  // replication r uses seed + r + 1
  auto direct = run_baseline(*rb2, rb_hyper(), [&] {
    auto s = small(Algorithm::kKG, plan.seed + 3, plan.budget);
    s.disc_size = plan.disc_size;
    return s;
  }());
  expect_same_trace(direct, res.replicates[1][2].run);
  // schedule independence
  plan.threads = 1;
  auto serial = replicate(*rb2, cs, plan);
  for (std::size_t c = 0; c < 3; ++c)
    for (int t = 0; t < 3; ++t) EXPECT_EQ(serial.curves[c].points[t].mean_gain, res.curves[c].points[t].mean_gain);
}

TEST(Replicate, SingleReplicationHasZeroSe) {
  auto rb1 = make_instance("RB1");
  ReplicationPlan plan;
  plan.budget = 2;
  plan.disc_size = 80;
  plan.replications = 1;
  auto res = replicate(*rb1, {{Algorithm::kKG, rb_hyper(), {}}}, plan);
  for (const auto& p : res.curves[0].points) {
    EXPECT_EQ(p.n, 1);
    EXPECT_EQ(p.se, 0.0);
  }
}

TEST(Replicate, DeterministicInstanceHasZeroSe) {
  Flat flat;
  ReplicationPlan plan;
  plan.budget = 3;
  plan.disc_size = 60;
  plan.replications = 5;
  auto res = replicate(flat, {{Algorithm::kKG, rb_hyper(), {}}, {Algorithm::kEGO, rb_hyper(), {}}}, plan);
  for (const auto& curve : res.curves) {
    for (const auto& p : curve.points) {
      EXPECT_EQ(p.se, 0.0);
      EXPECT_EQ(p.mean_gain, 0.0);
      EXPECT_EQ(p.n, 5);
    }
  }
}

TEST(Replicate, FailedReplicationsAreCountedAndLimited) {
  ReplicationPlan plan;
  plan.budget = 1;
  plan.disc_size = 50;
  plan.replications = 30;
  plan.threads = 1;
  // The fifth evaluation overall is the first one of replication 2.
  Flaky once(5);
  auto res = replicate(once, {{Algorithm::kKG, rb_hyper(), {}}}, plan);
  EXPECT_EQ(res.failed[0], 1);
  EXPECT_TRUE(res.replicates[0][1].failed);
  EXPECT_NE(res.replicates[0][1].error.find("simulator"), std::string::npos);
  EXPECT_EQ(res.curves[0].points[0].n, 29);

  Flaky always(0);
  EXPECT_THROW(replicate(always, {{Algorithm::kKG, rb_hyper(), {}}}, plan), std::runtime_error);

  std::vector<ReplicationGains> reps(3);
  reps[0].gains = {1.0};
  reps[1].failed = true;
  reps[2].gains = {3.0};
  auto curve = summarize("KG", reps, 1);
  EXPECT_EQ(curve.points[0].n, 2);
  EXPECT_EQ(curve.points[0].mean_gain, 2.0);
  EXPECT_NEAR(curve.points[0].se, 1.0, 1e-15);
}

TEST(Instances, Catalogue) {
  for (const char* id : {"RB1", "RB2", "RB3", "RB4"}) {
    auto obj = make_instance(id);
    EXPECT_EQ(obj->name(), id);
    EXPECT_EQ(obj->domain().dim(), 2);
  }
  auto ato = make_instance("ATO3");
  EXPECT_EQ(ato->domain().dim(), 8);
  EXPECT_THROW(make_instance("XYZ"), InvalidArgument);
  EXPECT_EQ(instance_defaults("RB2").budget, 25);
  EXPECT_EQ(instance_defaults("ATO4").budget, 50);
}

TEST(Experiments, SamplesAreDeterministicAndInDomain) {
  auto rb2 = make_instance("RB2");
  auto a = sample_objective(*rb2, 20, 3);
  auto b = sample_objective(*rb2, 20, 3);
  ASSERT_EQ(a.size(), 20u);
  EXPECT_EQ(a, b);
  for (const auto& o : a) {
    EXPECT_EQ(o.task, 0);
    EXPECT_TRUE(rb2->domain().contains(o.point));
  }
  EXPECT_NE(sample_objective(*rb2, 20, 4).front().point, a.front().point);
  EXPECT_THROW(sample_objective(*rb2, -1, 3), InvalidArgument);
}

TEST(Experiments, RecordedHistoryIsTheColdKgRun) {
  auto rb1 = make_instance("RB1");
  auto settings = small(Algorithm::kEGO, 21, 5);
  History h = record_history(*rb1, rb_hyper(), settings, 2);
  settings.algorithm = Algorithm::kKG;
  auto run = run_baseline(*rb1, rb_hyper(), settings);
  ASSERT_EQ(h.records.size(), 8u);
  EXPECT_EQ(h.dim, 2);
  EXPECT_EQ(h.max_task(), 2);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(h.records[i].point, run.initial[i].point);
  for (std::size_t t = 0; t < 5; ++t) {
    EXPECT_EQ(h.records[t + 3].point, run.trace[t].chosen);
    EXPECT_EQ(h.records[t + 3].value, run.trace[t].observed);
  }
  EXPECT_THROW(record_history(*rb1, rb_hyper(), settings, 0), InvalidArgument);
}

TEST(Experiments, FitToSamplesUsesHistoryTasks) {
  auto rb2 = make_instance("RB2");
  MapOptions options;
  options.n_restarts = 2;
  options.seed = 5;
  auto single = fit_to_samples(*rb2, 15, {}, HyperPrior::flat(), options);
  EXPECT_EQ(single.best_params.num_tasks(), 0);
  auto joint = fit_to_samples(*rb2, 15, rb1_history(10), HyperPrior::flat(), options);
  EXPECT_EQ(joint.best_params.num_tasks(), 1);
  EXPECT_THROW(fit_to_samples(*rb2, 0, {}, HyperPrior::flat(), options), InvalidArgument);
  std::vector<Observation> bad = rb1_history(2);
  bad[0].task = 0;
  EXPECT_THROW(fit_to_samples(*rb2, 5, bad, HyperPrior::flat(), options), InvalidArgument);
}
