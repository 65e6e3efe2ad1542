#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "smallloss/core.hpp"
#include "smallloss/graph_tools.hpp"
#include "smallloss/rng.hpp"
#include "smallloss/semibandit_instance.hpp"

namespace smallloss {

// Multiplicative weights kept as cumulative estimated losses.
class HedgeState {
 public:
  HedgeState() = default;
  HedgeState(std::size_t d, double eta);

  std::size_t size() const { return cum_.size(); }
  double eta() const { return eta_; }
  std::span<const double> cum_est_loss() const { return cum_; }

  Distribution distribution() const;
  void update(const EstimatedLossVector& l);
  void update(std::span<const double> l);

 private:
  std::vector<double> cum_;
  double eta_ = 1.0;
};

Distribution hedge_distribution(const HedgeState& s);
HedgeState hedge_update(HedgeState s, const EstimatedLossVector& l);

// Hedge mixed with a uniform floor of weight `noise`.
class NoisyHedgeState {
 public:
  NoisyHedgeState() = default;
  NoisyHedgeState(std::size_t d, double eta, double noise);

  const HedgeState& inner() const { return inner_; }
  double noise() const { return noise_; }
  std::size_t size() const { return inner_.size(); }
  double eta() const { return inner_.eta(); }
  std::span<const double> cum_est_loss() const { return inner_.cum_est_loss(); }

  Distribution distribution() const;
  void update(const EstimatedLossVector& l) { inner_.update(l); }

 private:
  HedgeState inner_;
  double noise_ = 0.0;
};

Distribution noisy_hedge_distribution(const NoisyHedgeState& s);

// Default noise: 1/T when the horizon is known, else 2^-20.
double default_noise(std::optional<std::size_t> horizon);

// Min-cost oracle: per-element scores and forbidden elements in, best
// feasible strategy out.
using MinCostOracle =
    std::function<std::optional<StrategyId>(std::span<const double>, const ArmMask&)>;

MinCostOracle make_oracle(const SemiBanditInstance& inst);

// Follow the Perturbed Leader over elements with truncated exponential
// perturbations redrawn on every draw.
class FplState {
 public:
  FplState() = default;
  FplState(std::size_t n_elements, double eta, double trunc, MinCostOracle oracle);

  std::size_t n_elements() const { return cum_.size(); }
  double eta() const { return eta_; }
  double trunc() const { return trunc_; }
  std::span<const double> cum_element_loss() const { return cum_; }

  // Z_e = min(Exp(1)/eta, trunc) for every element, written into `z`.
  void perturbations(CounterRng& rng, std::vector<double>& z) const;
  StrategyId draw(CounterRng& rng, const ArmMask& forbidden = {}) const;
  // Same draw but reusing caller-owned scratch to avoid allocation.
  StrategyId draw(CounterRng& rng, const ArmMask& forbidden,
                  std::vector<double>& scratch) const;
  void update(const EstimatedLossVector& l);

 private:
  std::vector<double> cum_;
  double eta_ = 1.0;
  double trunc_ = 1.0;
  MinCostOracle oracle_;
};

// Truncation B = ln(n_elements·T/m)/eta, floored so that B > 0.
double fpl_truncation(std::size_t n_elements, std::size_t horizon, std::size_t m, double eta);

std::vector<double> fpl_perturbations(const FplState& s, CounterRng& rng);
StrategyId fpl_draw(const FplState& s, CounterRng& rng, const ArmMask& forbidden = {});
FplState fpl_update(FplState s, const EstimatedLossVector& l);

}  // namespace smallloss
