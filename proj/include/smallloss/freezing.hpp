#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "smallloss/core.hpp"
#include "smallloss/graph_tools.hpp"
#include "smallloss/semibandit_instance.hpp"

namespace smallloss {

struct FreezeResult {
  // Arms frozen for low play probability (GREEN-IX style thresholds).
  std::vector<ArmId> probability_frozen;
  // F_0: arms whose observation mass fell below the initial threshold.
  std::vector<ArmId> initial_frozen;
  // F_1, F_2, ...: level sets of the propagation at a third of the threshold.
  std::vector<std::vector<ArmId>> propagation_frozen;
  ArmMask frozen;
  Distribution play_dist;
  double frozen_mass = 0.0;

  bool is_frozen(ArmId i) const { return frozen[i] != 0; }
  std::size_t frozen_count() const;
};

double mass_of(const Distribution& p, std::span<const ArmId> arms);
double propagation_mass(const Distribution& p, const FreezeResult& r);

FreezeResult dual_threshold_freeze(const FeedbackGraph& g, const Distribution& p, double gamma);
FreezeResult play_prob_freeze(const Distribution& p, double beta);
FreezeResult triple_threshold_freeze(const FeedbackGraph& g, const Distribution& p,
                                     double beta, double gamma);

// Smallest observation mass over unfrozen arms, counting only unfrozen
// observers. Returns +inf when nothing is unfrozen.
double min_unfrozen_observation(const FeedbackGraph& g, const Distribution& p,
                                const ArmMask& frozen);
// Every unfrozen arm sees at least `threshold` (up to rounding) of unfrozen mass.
bool freeze_certificate_holds(const FeedbackGraph& g, const Distribution& p,
                              const FreezeResult& r, double threshold);

struct SemiBanditFreezeResult {
  ArmMask frozen_elements;
  ArmMask frozen_strategies;
  Distribution play_dist;
  double frozen_mass = 0.0;
};

// Exact-probability version over an explicit strategy list.
SemiBanditFreezeResult semibandit_freeze(const SemiBanditInstance& inst, const Distribution& p,
                                         double gamma);
bool semibandit_certificate_holds(const SemiBanditInstance& inst, const Distribution& p,
                                  const SemiBanditFreezeResult& r, double gamma);

// Sampled version: strategy probabilities are only reachable through draws
// from the engine. Each sweep collects `samples` draws avoiding frozen
// elements (rejecting the rest) and freezes elements whose empirical
// frequency is below gamma, until a sweep freezes nothing.
struct SampledFreezeResult {
  ArmMask frozen_elements;
  std::vector<double> p_hat;  // per element, from the final sweep
  std::size_t samples = 0;    // accepted draws per sweep
  std::size_t sweeps = 0;
  std::uint64_t attempts = 0;       // draws in the final sweep
  std::uint64_t total_attempts = 0;  // over all sweeps
  double frozen_mass = 0.0;         // estimated as the final sweep's rejection rate
};

std::size_t sampled_freeze_sample_count(double eps_prime, double gamma, std::size_t m,
                                        std::size_t n_elements, std::size_t horizon,
                                        double delta);

using StrategySampler = std::function<StrategyId()>;

SampledFreezeResult sampled_semibandit_freeze(const SemiBanditInstance& inst,
                                              const StrategySampler& draw, double gamma,
                                              std::size_t samples);

}  // namespace smallloss
