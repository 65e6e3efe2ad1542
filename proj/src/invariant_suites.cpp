#include "smallloss/invariant_suites.hpp"

#include <algorithm>
#include <cmath>

#include "smallloss/evaluation.hpp"
#include "smallloss/freezing.hpp"
#include "smallloss/graph_tools.hpp"
#include "smallloss/learners.hpp"

namespace smallloss {

namespace {

constexpr double kSlack = 1e-9;

SuiteReport freezing_suite(std::size_t trials, std::uint64_t seed) {
  SuiteReport r{"freezing", trials, 0, {}};
  std::uint64_t total_mass = 0, initial_mass = 0, propagation = 0, certificate = 0;
  double worst_ratio = 0.0;
  const double eps_values[] = {0.1, 0.3, 0.5};
  for (std::size_t k = 0; k < trials; ++k) {
    CounterRng rng = CounterRng::stream(seed, k, Stream::Trials);
    const std::size_t n = 1 + static_cast<std::size_t>(rng.below(20));
    const FeedbackGraph g = random_graph(n, rng.uniform(), rng);
    const Distribution p = random_distribution(n, rng);
    const double eps_prime = eps_values[k % 3];
    const std::size_t alpha = exact_independence_number(g);
    const double gamma = eps_prime / (4.0 * static_cast<double>(alpha));
    const FreezeResult fr = dual_threshold_freeze(g, p, gamma);
    const double initial = mass_of(p, fr.initial_frozen);
    const double propagated = propagation_mass(p, fr);
    if (fr.frozen_mass > eps_prime + kSlack) ++total_mass;
    if (initial > static_cast<double>(alpha) * gamma + kSlack) ++initial_mass;
    if (propagated > 3.0 * initial + kSlack) ++propagation;
    if (!freeze_certificate_holds(g, p, fr, gamma / 3.0)) ++certificate;
    worst_ratio = std::max(worst_ratio, fr.frozen_mass / eps_prime);
  }
  r.violations = total_mass + initial_mass + propagation + certificate;
  r.details = {{"frozen_mass_violations", total_mass},
               {"initial_mass_violations", initial_mass},
               {"propagation_mass_violations", propagation},
               {"certificate_violations", certificate},
               {"max_frozen_mass_over_eps", worst_ratio}};
  return r;
}

// Exact conditional expectation of each estimator over the draw of I(t).
SuiteReport estimator_suite(std::size_t trials, std::uint64_t seed) {
  SuiteReport r{"estimators", trials, 0, {}};
  std::uint64_t unbiased = 0, ix_bias = 0;
  for (std::size_t k = 0; k < trials; ++k) {
    CounterRng rng = CounterRng::stream(seed, k, Stream::Trials);
    const std::size_t n = 1 + static_cast<std::size_t>(rng.below(12));
    const FeedbackGraph g = random_graph(n, rng.uniform(), rng);
    const Distribution p = random_distribution(n, rng);
    std::vector<double> l(n);
    for (double& x : l) x = rng.uniform();
    const LossVector losses(l);
    const double eps_prime = 0.05 + 0.9 * rng.uniform();
    const double gamma = eps_prime / (4.0 * static_cast<double>(exact_independence_number(g)));
    const double zeta = eps_prime / (6.0 * static_cast<double>(n));

    const FreezeResult fr = dual_threshold_freeze(g, p, gamma);
    std::vector<double> mean(n, 0.0), mean_ix(n, 0.0);
    for (ArmId played = 0; played < n; ++played) {
      const double w = fr.play_dist[played];
      if (w == 0.0) continue;
      GraphLossOracle o1(g, losses), o2(g, losses);
      o1.commit(played);
      o2.commit(played);
      const auto est = graph_estimate(g, fr, o1, 0.0);
      const auto est_ix = graph_estimate(g, fr, o2, zeta);
      for (ArmId i = 0; i < n; ++i) {
        mean[i] += w * est[i];
        mean_ix[i] += w * est_ix[i];
      }
    }
    for (ArmId i = 0; i < n; ++i) {
      const double target = fr.is_frozen(i) ? 0.0 : l[i];
      if (std::abs(mean[i] - target) > 1e-9) ++unbiased;
      if (mean_ix[i] > l[i] + 1e-12) ++ix_bias;
    }
  }
  r.violations = unbiased + ix_bias;
  r.details = {{"unbiasedness_violations", unbiased}, {"ix_bias_violations", ix_bias}};
  return r;
}

SuiteReport concentration_suite(std::size_t trials, std::uint64_t seed) {
  SuiteReport r{"concentration", trials, 0, nlohmann::json::array()};
  const BernoulliSampler bern(0.5);
  const PolyaSampler polya(1.0, 1.0);
  const SequenceSampler* samplers[] = {&bern, &polya};
  std::uint64_t cell = 0;
  for (const SequenceSampler* s : samplers)
    for (double eps : {0.25, 0.5})
      for (double delta : {0.01, 0.05}) {
        const auto rates = concentration_check(*s, 1000, eps, delta, trials, seed + cell++);
        const double se = std::sqrt(delta * (1.0 - delta) / static_cast<double>(trials));
        const bool upper_ok = rates.upper <= delta + 3.0 * se;
        const bool lower_ok = rates.lower <= delta + 3.0 * se;
        r.violations += !upper_ok + !lower_ok;
        r.details.push_back({{"sampler", s->name()},
                             {"eps", eps},
                             {"delta", delta},
                             {"upper_rate", rates.upper},
                             {"lower_rate", rates.lower},
                             {"limit", delta + 3.0 * se}});
      }
  return r;
}

double brute_shift(std::span<const LossVector> losses, std::size_t K) {
  const std::size_t T = losses.size(), d = losses[0].size();
  std::size_t total = 1;
  for (std::size_t t = 0; t < T; ++t) total *= d;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t c = code, prev = d, switches = 0;
    double loss = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
      const std::size_t a = c % d;
      c /= d;
      if (prev != d && a != prev) ++switches;
      prev = a;
      loss += losses[t][a];
    }
    if (switches <= K) best = std::min(best, loss);
  }
  return best;
}

SuiteReport shifting_suite(std::size_t trials, std::uint64_t seed) {
  SuiteReport r{"shifting-dp", trials, 0, {}};
  std::uint64_t mismatch = 0, monotone = 0, fixed = 0, sequence = 0;
  for (std::size_t k = 0; k < trials; ++k) {
    CounterRng rng = CounterRng::stream(seed, k, Stream::Trials);
    const std::size_t T = 1 + static_cast<std::size_t>(rng.below(8));
    const std::size_t d = 1 + static_cast<std::size_t>(rng.below(3));
    std::vector<LossVector> losses;
    for (std::size_t t = 0; t < T; ++t) {
      std::vector<double> v(d);
      for (double& x : v) x = static_cast<double>(rng.below(5)) / 4.0;
      losses.emplace_back(v);
    }
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t K = 0; K < T; ++K) {
      const auto dp = best_shifting_sequence(losses, K);
      if (std::abs(dp.loss - brute_shift(losses, K)) > 1e-9) ++mismatch;
      if (dp.loss > prev + 1e-12) ++monotone;
      prev = dp.loss;
      double seq_loss = 0.0;
      std::size_t switches = 0;
      for (std::size_t t = 0; t < T; ++t) {
        seq_loss += losses[t][dp.sequence[t]];
        if (t > 0 && dp.sequence[t] != dp.sequence[t - 1]) ++switches;
      }
      if (switches > K || std::abs(seq_loss - dp.loss) > 1e-9) ++sequence;
      if (K == 0) {
        RegretTracker tr(d);
        for (const auto& l : losses) tr.add(l, 0.0);
        if (std::abs(tr.best_fixed_loss() - dp.loss) > 1e-9) ++fixed;
      }
    }
  }
  r.violations = mismatch + monotone + fixed + sequence;
  r.details = {{"brute_force_mismatches", mismatch},
               {"monotonicity_violations", monotone},
               {"fixed_arm_mismatches", fixed},
               {"sequence_violations", sequence}};
  return r;
}

SuiteReport graph_tools_suite(std::size_t trials, std::uint64_t seed) {
  SuiteReport r{"graph-tools", trials, 0, {}};
  std::uint64_t not_independent = 0, not_maximal = 0, too_large = 0, mass = 0;
  for (std::size_t k = 0; k < trials; ++k) {
    CounterRng rng = CounterRng::stream(seed, k, Stream::Trials);
    const std::size_t n = 1 + static_cast<std::size_t>(rng.below(20));
    const FeedbackGraph g = random_graph(n, rng.uniform(), rng);
    std::vector<ArmId> candidates;
    for (ArmId i = 0; i < n; ++i)
      if (rng.bernoulli(0.7)) candidates.push_back(i);
    const auto mis = greedy_maximal_independent_set(g, candidates);
    if (!is_independent(g, mis.members)) ++not_independent;
    for (ArmId c : candidates) {
      const bool covered = std::any_of(mis.members.begin(), mis.members.end(), [&](ArmId m) {
        return m == c || g.adjacent(m, c);
      });
      if (!covered) ++not_maximal;
    }
    const auto full = greedy_maximal_independent_set(g, mask_members(ArmMask(n, 1)));
    if (full.size() > exact_independence_number(g)) ++too_large;
    const ArmId i = static_cast<ArmId>(rng.below(n)), j = static_cast<ArmId>(rng.below(n));
    std::vector<double> point(n, 0.0);
    point[j] = 1.0;
    const double m = observation_mass(g, Distribution::from_probs(point), i);
    const bool expect = i == j || g.adjacent(i, j);
    if ((m == 1.0) != expect) ++mass;
  }
  r.violations = not_independent + not_maximal + too_large + mass;
  r.details = {{"independence_violations", not_independent},
               {"maximality_violations", not_maximal},
               {"greedy_exceeds_alpha", too_large},
               {"observation_mass_violations", mass}};
  return r;
}

}  // namespace

FeedbackGraph random_graph(std::size_t n, double edge_prob, CounterRng& rng) {
  std::vector<std::pair<ArmId, ArmId>> edges;
  for (ArmId a = 0; a < n; ++a)
    for (ArmId b = a + 1; b < n; ++b)
      if (rng.bernoulli(edge_prob)) edges.emplace_back(a, b);
  return FeedbackGraph(n, edges);
}

Distribution random_distribution(std::size_t n, CounterRng& rng) {
  std::vector<double> w(n);
  for (double& x : w) x = rng.exponential() + 1e-300;
  return make_distribution(w);
}

SuiteReport check_invariants(const std::string& suite, std::size_t trials, std::uint64_t seed) {
  if (suite == "freezing") return freezing_suite(trials, seed);
  if (suite == "estimators") return estimator_suite(trials, seed);
  if (suite == "concentration") return concentration_suite(trials, seed);
  if (suite == "shifting-dp") return shifting_suite(trials, seed);
  if (suite == "graph-tools") return graph_tools_suite(trials, seed);
  throw Error(Errc::InvalidArgument, "unknown suite " + suite);
}

nlohmann::json suite_json(const SuiteReport& r) {
  return {{"suite", r.suite}, {"trials", r.trials}, {"violations", r.violations},
          {"details", r.details}};
}

}  // namespace smallloss
