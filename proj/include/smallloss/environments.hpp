#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "smallloss/core.hpp"
#include "smallloss/semibandit_instance.hpp"

namespace smallloss {

// Produces the loss vector of round t (0-based). Oblivious models ignore the
// play history; adaptive ones read it (history.size() == t).
class LossModel {
 public:
  virtual ~LossModel() = default;
  virtual std::size_t n() const = 0;
  virtual LossVector at(std::size_t t, std::span<const ArmId> history) const = 0;
  virtual bool adaptive() const { return false; }
  // Per-arm means when the model is stochastic and stationary.
  virtual std::optional<std::vector<double>> means() const { return std::nullopt; }
};

enum class LossMode { Bernoulli, Uniform };

// One segment of piecewise-stationary means; active from `start` onwards.
struct MeanSegment {
  std::size_t start = 0;
  std::vector<double> group_means;
};

// Independent draws per (round, group); all arms of a group share the draw.
// Materialized when T·groups <= 10^8, otherwise regenerated on demand from
// the same counter-based stream, so both paths return identical values.
class StochasticSchedule final : public LossModel {
 public:
  StochasticSchedule(std::size_t horizon, std::vector<std::size_t> group_of,
                     std::vector<MeanSegment> segments, LossMode mode, std::uint64_t seed);

  std::size_t n() const override { return group_of_.size(); }
  std::size_t horizon() const { return horizon_; }
  LossVector at(std::size_t t, std::span<const ArmId> history = {}) const override;
  std::optional<std::vector<double>> means() const override;
  bool materialized() const { return !table_.empty(); }
  const std::vector<MeanSegment>& segments() const { return segments_; }

 private:
  void draw_groups(std::size_t t, std::span<double> out) const;
  const MeanSegment& segment_at(std::size_t t) const;

  std::size_t horizon_;
  std::vector<std::size_t> group_of_;
  std::size_t groups_ = 0;
  std::vector<MeanSegment> segments_;
  LossMode mode_;
  std::uint64_t seed_;
  std::vector<double> table_;
};

// Loss 1 on the previously played arm, 0 elsewhere; all zeros at t = 0.
class PunishLastPlayed final : public LossModel {
 public:
  explicit PunishLastPlayed(std::size_t d) : d_(d) {}
  std::size_t n() const override { return d_; }
  LossVector at(std::size_t t, std::span<const ArmId> history) const override;
  bool adaptive() const override { return true; }

 private:
  std::size_t d_;
};

// User callback from play history to losses; values outside [0,1] raise
// OutOfRangeLoss.
class AdaptiveHook final : public LossModel {
 public:
  using Callback = std::function<std::vector<double>(std::size_t t, std::span<const ArmId>)>;
  AdaptiveHook(std::size_t d, Callback cb) : d_(d), cb_(std::move(cb)) {}
  std::size_t n() const override { return d_; }
  LossVector at(std::size_t t, std::span<const ArmId> history) const override;
  bool adaptive() const override { return true; }

 private:
  std::size_t d_;
  Callback cb_;
};

// Wraps an oblivious model behind the adaptive interface (history ignored).
std::shared_ptr<LossModel> as_adaptive(std::shared_ptr<const LossModel> oblivious);

// Scripted adversary: JSON object {"default": [...], "after": {"<arm>": [...]}};
// the vector used at round t is keyed by the arm played at t-1.
class ScriptAdversary final : public LossModel {
 public:
  static ScriptAdversary from_json_text(const std::string& text);
  static ScriptAdversary from_file(const std::string& path);

  std::size_t n() const override { return default_.size(); }
  LossVector at(std::size_t t, std::span<const ArmId> history) const override;
  bool adaptive() const override { return true; }

 private:
  std::vector<double> default_;
  std::vector<std::optional<std::vector<double>>> after_;
};

struct GraphInstance {
  std::string name;
  FeedbackGraph graph;
  std::shared_ptr<const LossModel> losses;
  std::size_t horizon = 0;
  std::size_t true_alpha = 0;
  std::size_t true_kappa = 0;
  double lstar_target = 0.0;
  // Shifting instances: rounds at which the low-loss arm changes.
  std::vector<std::size_t> switch_points;
};

struct SemiBanditEnvironment {
  std::string name;
  SemiBanditInstance instance;
  std::shared_ptr<const LossModel> element_losses;
  std::size_t horizon = 0;
  double lstar_target = 0.0;
};

GraphInstance make_smallloss_bandit(std::size_t d, std::size_t horizon, double mu_star,
                                    double mu_rest, std::uint64_t seed,
                                    LossMode mode = LossMode::Bernoulli);

GraphInstance make_clique_union(std::size_t num_cliques, std::size_t clique_size,
                                std::size_t horizon, double mu_star, double mu_rest,
                                std::uint64_t seed, LossMode mode = LossMode::Bernoulli);

SemiBanditEnvironment make_layered_paths(std::size_t layers, std::size_t width,
                                         std::size_t horizon, double mu_star, double mu_rest,
                                         std::uint64_t seed,
                                         LossMode mode = LossMode::Bernoulli);

GraphInstance make_shifting(std::size_t d, std::size_t horizon, std::size_t num_switches,
                            double mu_star, double mu_rest, std::uint64_t seed,
                            LossMode mode = LossMode::Bernoulli);

}  // namespace smallloss
