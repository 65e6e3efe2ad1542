#include "smallloss/freezing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace smallloss {

namespace {

// Slack for comparing recomputed sums against thresholds.
constexpr double kCertSlack = 1e-12;

Distribution renormalize(const Distribution& p, const ArmMask& frozen, double& frozen_mass) {
  double kept = 0.0;
  frozen_mass = 0.0;
  for (ArmId i = 0; i < p.size(); ++i) (frozen[i] ? frozen_mass : kept) += p[i];
  require(kept > 0.0, Errc::AllFrozen, "every arm with positive mass is frozen");
  std::vector<double> w(p.size(), 0.0);
  for (ArmId i = 0; i < p.size(); ++i)
    if (!frozen[i]) w[i] = p[i] / kept;
  frozen_mass = std::clamp(frozen_mass, 0.0, 1.0);
  return make_distribution(w);
}

// Propagation at gamma/3 from an initial frozen set. `obs` holds each arm's
// mass over currently unfrozen observers and is decremented as arms freeze.
void propagate(const FeedbackGraph& g, const Distribution& p, double threshold,
               std::vector<ArmId> last, ArmMask& frozen, std::vector<double>& obs,
               std::vector<std::vector<ArmId>>& levels) {
  ArmMask seen(g.n_arms(), 0);
  while (!last.empty()) {
    std::vector<ArmId> candidates;
    for (ArmId j : last)
      for (ArmId k : g.closed_neighborhood(j))
        if (!frozen[k] && !seen[k]) {
          seen[k] = 1;
          candidates.push_back(k);
        }
    for (ArmId k : candidates) seen[k] = 0;
    std::sort(candidates.begin(), candidates.end());

    std::vector<ArmId> level;
    for (ArmId k : candidates)
      if (obs[k] < threshold) level.push_back(k);
    for (ArmId k : level) frozen[k] = 1;
    for (ArmId k : level)
      for (ArmId n : g.closed_neighborhood(k)) obs[n] -= p[k];
    if (!level.empty()) levels.push_back(level);
    last = std::move(level);
  }
}

}  // namespace

std::size_t FreezeResult::frozen_count() const {
  return static_cast<std::size_t>(std::count(frozen.begin(), frozen.end(), 1));
}

double mass_of(const Distribution& p, std::span<const ArmId> arms) {
  double m = 0.0;
  for (ArmId i : arms) m += p[i];
  return m;
}

double propagation_mass(const Distribution& p, const FreezeResult& r) {
  double m = 0.0;
  for (const auto& level : r.propagation_frozen) m += mass_of(p, level);
  return m;
}

FreezeResult dual_threshold_freeze(const FeedbackGraph& g, const Distribution& p, double gamma) {
  return triple_threshold_freeze(g, p, 0.0, gamma);
}

FreezeResult play_prob_freeze(const Distribution& p, double beta) {
  require(beta >= 0.0, Errc::InvalidArgument, "beta must be non-negative");
  FreezeResult r;
  r.frozen.assign(p.size(), 0);
  for (ArmId i = 0; i < p.size(); ++i)
    if (p[i] < beta) {
      r.frozen[i] = 1;
      r.probability_frozen.push_back(i);
    }
  r.play_dist = renormalize(p, r.frozen, r.frozen_mass);
  return r;
}

FreezeResult triple_threshold_freeze(const FeedbackGraph& g, const Distribution& p,
                                     double beta, double gamma) {
  require(p.size() == g.n_arms(), Errc::LengthMismatch, "distribution/graph size mismatch");
  require(gamma > 0.0 && gamma < 1.0, Errc::InvalidArgument, "gamma must lie in (0,1)");
  require(beta >= 0.0, Errc::InvalidArgument, "beta must be non-negative");
  const std::size_t n = g.n_arms();
  FreezeResult r;
  r.frozen.assign(n, 0);

  for (ArmId i = 0; i < n; ++i)
    if (p[i] < beta) {
      r.frozen[i] = 1;
      r.probability_frozen.push_back(i);
    }

  std::vector<double> obs(n, 0.0);
  for (ArmId i = 0; i < n; ++i)
    for (ArmId j : g.closed_neighborhood(i))
      if (!r.frozen[j]) obs[i] += p[j];

  for (ArmId i = 0; i < n; ++i)
    if (!r.frozen[i] && obs[i] < gamma) r.initial_frozen.push_back(i);
  for (ArmId i : r.initial_frozen) r.frozen[i] = 1;
  for (ArmId i : r.initial_frozen)
    for (ArmId k : g.closed_neighborhood(i)) obs[k] -= p[i];

  propagate(g, p, gamma / 3.0, r.initial_frozen, r.frozen, obs, r.propagation_frozen);
  r.play_dist = renormalize(p, r.frozen, r.frozen_mass);
  return r;
}

double min_unfrozen_observation(const FeedbackGraph& g, const Distribution& p,
                                const ArmMask& frozen) {
  double lo = std::numeric_limits<double>::infinity();
  for (ArmId i = 0; i < g.n_arms(); ++i) {
    if (frozen[i]) continue;
    lo = std::min(lo, observation_mass(g, p, i, frozen));
  }
  return lo;
}

bool freeze_certificate_holds(const FeedbackGraph& g, const Distribution& p,
                              const FreezeResult& r, double threshold) {
  return min_unfrozen_observation(g, p, r.frozen) >= threshold - kCertSlack;
}

SemiBanditFreezeResult semibandit_freeze(const SemiBanditInstance& inst, const Distribution& p,
                                         double gamma) {
  require(gamma > 0.0 && gamma < 1.0, Errc::InvalidArgument, "gamma must lie in (0,1)");
  require(p.size() == inst.n_strategies(), Errc::LengthMismatch,
          "distribution must cover every strategy");
  const auto strategies = inst.strategies();
  const std::size_t ne = inst.n_elements();
  SemiBanditFreezeResult r;
  r.frozen_elements.assign(ne, 0);
  r.frozen_strategies.assign(strategies.size(), 0);

  while (true) {
    std::vector<double> mass(ne, 0.0);
    for (std::size_t f = 0; f < strategies.size(); ++f)
      if (!r.frozen_strategies[f])
        for (ElementId e : strategies[f]) mass[e] += p[f];
    bool changed = false;
    for (ElementId e = 0; e < ne; ++e)
      if (!r.frozen_elements[e] && mass[e] < gamma) {
        r.frozen_elements[e] = 1;
        changed = true;
      }
    if (!changed) break;
    for (std::size_t f = 0; f < strategies.size(); ++f)
      for (ElementId e : strategies[f])
        if (r.frozen_elements[e]) {
          r.frozen_strategies[f] = 1;
          break;
        }
  }
  r.play_dist = renormalize(p, r.frozen_strategies, r.frozen_mass);
  return r;
}

bool semibandit_certificate_holds(const SemiBanditInstance& inst, const Distribution& p,
                                  const SemiBanditFreezeResult& r, double gamma) {
  const auto strategies = inst.strategies();
  std::vector<double> mass(inst.n_elements(), 0.0);
  for (std::size_t f = 0; f < strategies.size(); ++f) {
    bool hits = false;
    for (ElementId e : strategies[f]) hits = hits || r.frozen_elements[e];
    if (hits != static_cast<bool>(r.frozen_strategies[f])) return false;
    if (!hits)
      for (ElementId e : strategies[f]) mass[e] += p[f];
  }
  for (ElementId e = 0; e < inst.n_elements(); ++e)
    if (!r.frozen_elements[e] && mass[e] < gamma - kCertSlack) return false;
  return true;
}

std::size_t sampled_freeze_sample_count(double eps_prime, double gamma, std::size_t m,
                                        std::size_t n_elements, std::size_t horizon,
                                        double delta) {
  require(eps_prime > 0.0 && gamma > 0.0 && delta > 0.0 && delta < 1.0,
          Errc::InvalidArgument, "invalid sampling parameters");
  const double logterm = std::log(static_cast<double>(n_elements) *
                                  static_cast<double>(horizon) / delta);
  const double n = (1.0 + 2.0 * eps_prime) * static_cast<double>(m) * logterm /
                   (eps_prime * gamma);
  return static_cast<std::size_t>(std::ceil(n));
}

SampledFreezeResult sampled_semibandit_freeze(const SemiBanditInstance& inst,
                                              const StrategySampler& draw, double gamma,
                                              std::size_t samples) {
  require(samples >= 1, Errc::InvalidArgument, "need at least one sample per sweep");
  const std::size_t ne = inst.n_elements();
  const std::uint64_t cap = 100ull * samples;
  SampledFreezeResult r;
  r.frozen_elements.assign(ne, 0);
  r.samples = samples;

  std::vector<std::uint64_t> counts(ne);
  std::vector<ElementId> elems;
  // Each non-final sweep freezes at least one element.
  for (std::size_t sweep = 0; sweep <= ne; ++sweep) {
    std::fill(counts.begin(), counts.end(), 0);
    std::uint64_t attempts = 0;
    std::size_t accepted = 0;
    while (accepted < samples) {
      require(++attempts <= cap, Errc::SweepCapExceeded,
              "rejection sampling exceeded 100 x samples draws");
      inst.strategy_elements(draw(), elems);
      bool hits = false;
      for (ElementId e : elems) hits = hits || r.frozen_elements[e];
      if (hits) continue;
      ++accepted;
      for (ElementId e : elems) ++counts[e];
    }
    r.sweeps = sweep + 1;
    r.attempts = attempts;
    r.total_attempts += attempts;
    r.p_hat.assign(ne, 0.0);
    for (ElementId e = 0; e < ne; ++e)
      r.p_hat[e] = static_cast<double>(counts[e]) / static_cast<double>(samples);

    bool changed = false;
    for (ElementId e = 0; e < ne; ++e)
      if (!r.frozen_elements[e] && r.p_hat[e] < gamma) {
        r.frozen_elements[e] = 1;
        changed = true;
      }
    if (!changed) {
      r.frozen_mass = 1.0 - static_cast<double>(samples) / static_cast<double>(attempts);
      return r;
    }
    require(std::find(r.frozen_elements.begin(), r.frozen_elements.end(), 0) !=
                r.frozen_elements.end(),
            Errc::AllFrozen, "every element frozen");
  }
  throw Error(Errc::SweepCapExceeded, "freezing did not settle within |E|+1 sweeps");
}

}  // namespace smallloss
