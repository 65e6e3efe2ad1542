#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "smallloss/core.hpp"
#include "smallloss/rng.hpp"
#include "smallloss/semibandit_instance.hpp"

namespace smallloss {

struct RegretSummary {
  double learner_loss = 0.0;
  double best_fixed_loss = 0.0;  // L*
  ArmId best_arm = 0;
  double regret = 0.0;
  double eps = 0.0;
  double apx_regret = 0.0;  // (1-eps)·learner_loss - L*
  double lstar = 0.0;
  std::vector<double> per_round;  // cumulative learner loss after each round
};

// Online accounting against the best fixed arm (ties to the lowest id).
class RegretTracker {
 public:
  explicit RegretTracker(std::size_t n_arms);

  void add(const LossVector& losses, double learner_loss);
  double learner_loss() const { return learner_; }
  double best_fixed_loss() const;
  ArmId best_arm() const;
  std::span<const double> cumulative() const { return cum_; }
  std::size_t rounds() const { return rounds_; }
  RegretSummary summary(double eps = 0.0) const;

 private:
  std::vector<double> cum_;
  double learner_ = 0.0;
  std::size_t rounds_ = 0;
};

// Same accounting for semi-bandits: the comparator is the best fixed
// strategy, found with the instance's min-cost oracle.
class StrategyRegretTracker {
 public:
  explicit StrategyRegretTracker(const SemiBanditInstance& inst);

  void add(const LossVector& element_losses, double learner_loss);
  double learner_loss() const { return learner_; }
  double best_fixed_loss() const;
  RegretSummary summary(double eps = 0.0) const;

 private:
  const SemiBanditInstance* inst_;
  std::vector<double> cum_;
  double learner_ = 0.0;
};

RegretSummary actual_regret(std::span<const RoundRecord> trace,
                            std::span<const LossVector> losses, double eps = 0.0);

double pseudo_regret(std::span<const RoundRecord> trace,
                     const std::optional<std::vector<double>>& means);

struct ShiftingComparator {
  std::vector<ArmId> sequence;
  double loss = 0.0;
};

// Minimum-loss arm sequence with at most K switches. Ties prefer staying on
// the current arm, then the lowest id.
ShiftingComparator best_shifting_sequence(std::span<const LossVector> losses, std::size_t K);

class SequenceSampler {
 public:
  virtual ~SequenceSampler() = default;
  virtual std::unique_ptr<SequenceSampler> clone() const = 0;
  virtual void reset() = 0;
  // Conditional mean of the next value given the history so far.
  virtual double next_mean() const = 0;
  virtual double draw(CounterRng& rng) = 0;
  virtual std::string name() const = 0;
};

// x_t = m_t for a fixed periodic pattern of means.
class DeterministicSampler final : public SequenceSampler {
 public:
  std::unique_ptr<SequenceSampler> clone() const override;
  void reset() override { t_ = 0; }
  double next_mean() const override;
  double draw(CounterRng& rng) override;
  std::string name() const override { return "deterministic"; }

 private:
  std::size_t t_ = 0;
};

class BernoulliSampler final : public SequenceSampler {
 public:
  explicit BernoulliSampler(double p = 0.5) : p_(p) {}
  std::unique_ptr<SequenceSampler> clone() const override;
  void reset() override {}
  double next_mean() const override { return p_; }
  double draw(CounterRng& rng) override { return rng.bernoulli(p_) ? 1.0 : 0.0; }
  std::string name() const override { return "bernoulli"; }

 private:
  double p_;
};

// Urn-style dependence: the next success probability is the smoothed
// success fraction so far, so early outcomes steer the rest of the sequence.
class PolyaSampler final : public SequenceSampler {
 public:
  PolyaSampler(double a = 1.0, double b = 1.0) : a_(a), b_(b) {}
  std::unique_ptr<SequenceSampler> clone() const override;
  void reset() override { successes_ = failures_ = 0.0; }
  double next_mean() const override;
  double draw(CounterRng& rng) override;
  std::string name() const override { return "polya"; }

 private:
  double a_, b_;
  double successes_ = 0.0, failures_ = 0.0;
};

struct ConcentrationRates {
  double upper = 0.0;
  double lower = 0.0;
  std::size_t trials = 0;
  std::size_t upper_violations = 0;
  std::size_t lower_violations = 0;
};

double concentration_bound(double eps, double delta);

ConcentrationRates concentration_check(const SequenceSampler& sampler, std::size_t T,
                                       double eps, double delta, std::size_t trials,
                                       std::uint64_t seed, std::size_t threads = 0);

struct ScalingFit {
  double exponent = 0.0;
  double intercept = 0.0;  // natural log of the prefactor
  double r_squared = 0.0;
  bool reliable = false;   // r^2 >= 0.9
  std::size_t used_points = 0;
  std::vector<std::string> warnings;
};

ScalingFit fit_scaling_exponent(std::span<const std::pair<double, double>> points);
// Drops points whose y is below twice the additive floor before fitting.
ScalingFit fit_scaling_exponent(std::span<const std::pair<double, double>> points,
                                double additive_floor);

}  // namespace smallloss
