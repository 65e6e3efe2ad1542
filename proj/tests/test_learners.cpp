#include <gtest/gtest.h>

#include <cmath>

#include "smallloss/doubling.hpp"
#include "smallloss/environments.hpp"
#include "smallloss/invariant_suites.hpp"
#include "smallloss/learners.hpp"

using namespace smallloss;

namespace {

InvariantTally run_graph(Learner& L, const GraphInstance& inst, std::uint64_t seed,
                         double* total_loss = nullptr) {
  auto draws = CounterRng::stream(seed, 0, Stream::LearnerDraws);
  auto perturb = CounterRng::stream(seed, 0, Stream::Perturbations);
  std::vector<ArmId> history;
  double loss = 0.0;
  for (std::size_t t = 0; t < inst.horizon; ++t) {
    LossVector l = inst.losses->at(t, history);
    GraphLossOracle oracle(inst.graph, l);
    StepContext ctx{t, &inst.graph, &oracle, nullptr, &draws, &perturb};
    auto rec = L.step(ctx);
    history.push_back(rec.played);
    loss += rec.true_loss;
  }
  if (total_loss) *total_loss = loss;
  return L.tally();
}

// E[estimate_i] computed exactly by weighting every possible played arm.
std::vector<double> exact_mean_estimate(const FeedbackGraph& g, const FreezeResult& fr,
                                        const LossVector& l, double zeta) {
  std::vector<double> mean(g.n_arms(), 0.0);
  for (ArmId j = 0; j < g.n_arms(); ++j) {
    if (fr.play_dist[j] == 0.0) continue;
    GraphLossOracle o(g, l);
    o.commit(j);
    auto est = graph_estimate(g, fr, o, zeta);
    for (ArmId i = 0; i < g.n_arms(); ++i) mean[i] += fr.play_dist[j] * est[i];
  }
  return mean;
}

}  // namespace

TEST(GraphLossOracle, RevealsOnlyNeighborhood) {
  auto g = FeedbackGraph::path(3);
  LossVector l({0.1, 0.2, 0.3});
  GraphLossOracle o(g, l);
  o.commit(0);
  EXPECT_DOUBLE_EQ(o.reveal(1), 0.2);
  try {
    o.reveal(2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::UnobservedArm);
  }
}

TEST(Estimator, BanditUniform) {
  const std::size_t d = 5;
  auto g = FeedbackGraph::empty(d);
  auto p = Distribution::from_probs(std::vector<double>(d, 0.2));
  auto fr = play_prob_freeze(p, 0.0);
  LossVector l({0, 0, 1, 0, 0});
  GraphLossOracle o(g, l);
  o.commit(2);
  auto est = graph_estimate(g, fr, o, 0.0);
  EXPECT_NEAR(est[2], 5.0, 1e-12);
  for (ArmId i : {0, 1, 3, 4}) EXPECT_EQ(est[i], 0.0);
}

TEST(Estimator, GreenIxSubstitution) {
  GraphLearnerConfig cfg;
  cfg.eps_prime = 0.3;
  cfg.mode = GraphMode::GreenIx;
  EXPECT_NEAR(cfg.gamma(3), 0.1, 1e-12);
  EXPECT_NEAR(cfg.zeta(3), 0.05, 1e-12);
  EXPECT_NEAR(cfg.eta(3), 0.05, 1e-12);

  auto p = Distribution::from_probs({0.05, 0.15, 0.80});
  auto fr = play_prob_freeze(p, cfg.gamma(3));
  auto g = FeedbackGraph::empty(3);
  LossVector l({0.2, 0.9, 0.5});
  GraphLossOracle o(g, l);
  o.commit(2);
  auto est = graph_estimate(g, fr, o, cfg.zeta(3));
  EXPECT_NEAR(est[2], 0.5 / (16.0 / 19.0 + 0.05), 1e-12);
  EXPECT_NEAR(est[2], 0.5605, 1e-4);
  EXPECT_EQ(est[0], 0.0);
  EXPECT_EQ(est[1], 0.0);
}

TEST(Estimator, ExactUnbiasedOnUnfrozenArms) {
  CounterRng rng(41);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + rng.below(12);
    auto g = random_graph(n, rng.uniform() * 0.5, rng);
    auto p = random_distribution(n, rng);
    FreezeResult fr;
    try {
      fr = dual_threshold_freeze(g, p, 0.1);
    } catch (const Error&) {
      continue;
    }
    std::vector<double> lv(n);
    for (auto& x : lv) x = rng.uniform();
    LossVector l(lv);
    auto mean = exact_mean_estimate(g, fr, l, 0.0);
    auto mean_ix = exact_mean_estimate(g, fr, l, 0.05);
    for (ArmId i = 0; i < n; ++i) {
      if (fr.is_frozen(i)) {
        EXPECT_EQ(mean[i], 0.0);
      } else {
        EXPECT_NEAR(mean[i], lv[i], 1e-9);
      }
      EXPECT_LE(mean[i], lv[i] + 1e-9);
      EXPECT_LE(mean_ix[i], lv[i] + 1e-9);
    }
  }
}

TEST(Estimator, ZeroLossLeavesGreenIxUnchanged) {
  GraphInstance inst;
  inst.graph = FeedbackGraph::empty(4);
  inst.horizon = 50;
  inst.losses = std::make_shared<AdaptiveHook>(
      4, [](std::size_t, std::span<const ArmId>) { return std::vector<double>(4, 0.0); });
  GreenIxLearner L(4, 0.3);
  auto before = L.engine().distribution();
  run_graph(L, inst, 1);
  EXPECT_EQ(L.engine().distribution(), before);
}

TEST(BlackboxLearner, ParametersAndCleanRun) {
  BlackboxLearner L(20, 0.2, 5);
  EXPECT_NEAR(L.gamma(), 0.01, 1e-12);
  EXPECT_NEAR(L.eta(), 0.2 * 0.01 / 3.0, 1e-15);
  auto inst = make_clique_union(5, 4, 3000, 0.05, 0.5, 2);
  auto tally = run_graph(L, inst, 2);
  EXPECT_EQ(tally.rounds, 3000u);
  EXPECT_EQ(tally.violations(), 0u);
}

TEST(BlackboxLearner, CorruptedThresholdIsCaught) {
  BlackboxOptions opts;
  opts.threshold_scale = 0.01;
  BlackboxLearner L(10, 0.5, 1, opts);
  auto inst = make_smallloss_bandit(10, 2000, 0.01, 0.5, 3);
  auto tally = run_graph(L, inst, 3);
  EXPECT_GT(tally.certificate_violations, 0u);
}

TEST(BlackboxLearner, AlphaGuessDoublesBoundedly) {
  BlackboxOptions opts;
  opts.alpha_doubling = true;
  BlackboxLearner L(16, 0.5, 1, opts);
  auto inst = make_smallloss_bandit(16, 3000, 0.01, 0.6, 4);
  auto tally = run_graph(L, inst, 4);
  EXPECT_GE(L.alpha_guess(), 2u);
  EXPECT_LE(tally.alpha_doublings, 4u);
  EXPECT_EQ(tally.violations(), 0u);
}

TEST(BlackboxLearner, CompleteGraphNeverDoubles) {
  BlackboxOptions opts;
  opts.alpha_doubling = true;
  BlackboxLearner L(8, 0.5, 1, opts);
  auto inst = make_clique_union(1, 8, 2000, 0.01, 0.6, 5);
  auto tally = run_graph(L, inst, 5);
  EXPECT_EQ(L.alpha_guess(), 1u);
  EXPECT_EQ(tally.alpha_doublings, 0u);
}

TEST(BlackboxLearner, NoisyHedgeEngine) {
  BlackboxOptions opts;
  opts.engine = Engine::NoisyHedge;
  opts.noise = 1e-3;
  BlackboxLearner L(10, 0.25, 10, opts);
  auto inst = make_shifting(10, 3000, 4, 0.05, 0.5, 6);
  EXPECT_EQ(run_graph(L, inst, 6).violations(), 0u);
}

TEST(GreenIxLearner, GapAndBoundHold) {
  GreenIxLearner L(10, 0.25);
  auto inst = make_smallloss_bandit(10, 20000, 0.02, 0.5, 7);
  auto tally = run_graph(L, inst, 7);
  EXPECT_EQ(tally.gap_violations, 0u);
  EXPECT_EQ(tally.hedge_bound_violations, 0u);
  EXPECT_EQ(tally.violations(), 0u);
  auto cum = L.engine().cum_est_loss();
  auto [lo, hi] = std::minmax_element(cum.begin(), cum.end());
  EXPECT_LE(*hi - *lo, L.gap_bound());
  EXPECT_NEAR(L.gap_bound(), 1.0 / L.gamma() + std::log(1.0 / L.gamma()) / L.eta(), 1e-9);
}

TEST(GreenIxLearner, LearnsBestArm) {
  GreenIxLearner L(5, 0.25);
  auto inst = make_smallloss_bandit(5, 20000, 0.0, 0.8, 8);
  double loss = 0.0;
  run_graph(L, inst, 8, &loss);
  EXPECT_LT(loss, 0.2 * 20000 * 0.8);
}

TEST(GreenIxGraphLearner, CleanRunAndGraphChange) {
  auto inst = make_clique_union(5, 4, 5000, 0.02, 0.5, 9);
  GreenIxGraphLearner L(inst.graph, 0.2, 5);
  EXPECT_NEAR(L.beta(), 0.01, 1e-12);
  EXPECT_NEAR(L.gamma(), 0.04, 1e-12);
  EXPECT_EQ(run_graph(L, inst, 9).violations(), 0u);

  auto other = FeedbackGraph::empty(20);
  LossVector l(std::vector<double>(20, 0.5));
  GraphLossOracle o(other, l);
  auto draws = CounterRng(1);
  StepContext ctx{0, &other, &o, nullptr, &draws, nullptr};
  try {
    L.step(ctx);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::GraphChanged);
  }
}

TEST(SemiBanditLearner, SampleCountAndCapHold) {
  auto env = make_layered_paths(2, 2, 300, 0.05, 0.5, 10);
  SemiBanditOptions opts;
  opts.horizon = 300;
  opts.delta = 0.1;
  SemiBanditLearner L(env.instance, 0.9, opts);
  EXPECT_NEAR(L.eps_prime(), 0.15, 1e-12);
  EXPECT_NEAR(L.gamma(), 0.15 / 4.0, 1e-12);
  EXPECT_EQ(L.samples_per_sweep(),
            sampled_freeze_sample_count(0.15, L.gamma(), 2, 4, 300, 0.1));

  auto draws = CounterRng::stream(10, 0, Stream::LearnerDraws);
  auto perturb = CounterRng::stream(10, 0, Stream::Perturbations);
  for (std::size_t t = 0; t < env.horizon; ++t) {
    LossVector l = env.element_losses->at(t, {});
    ElementLossOracle o(env.instance, l);
    StepContext ctx{t, nullptr, nullptr, &o, &draws, &perturb};
    auto rec = L.step(ctx);
    EXPECT_LE(rec.estimated.max(), 1.0 / L.gamma() * (1 + 1e-12));
  }
  EXPECT_EQ(L.tally().cap_violations, 0u);
  EXPECT_EQ(L.tally().sample_count_violations, 0u);
  EXPECT_EQ(L.tally().violations(), 0u);
}

TEST(UniformMix, MixRate) {
  UniformMixLearner L(10, 10000);
  EXPECT_NEAR(L.mix(), std::sqrt(10 * std::log(10.0) / ((std::exp(1.0) - 1) * 10000)), 1e-12);
}

TEST(EpsPrime, Maps) {
  EXPECT_DOUBLE_EQ(eps_prime_for(GraphMode::Blackbox, 0.5), 0.25);
  EXPECT_DOUBLE_EQ(eps_prime_for(GraphMode::GreenIx, 0.5), 0.25);
  EXPECT_DOUBLE_EQ(eps_prime_for(GraphMode::GreenIxGraph, 0.5), 0.1);
  EXPECT_DOUBLE_EQ(semibandit_eps_prime(0.6), 0.1);
}
