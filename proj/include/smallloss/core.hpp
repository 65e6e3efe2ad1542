#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace smallloss {

using ArmId = std::size_t;

// Tolerances used by invariant checks across the library.
inline constexpr double kProbTolerance = 1e-9;
inline constexpr double kIdempotenceTolerance = 1e-12;

enum class Errc {
  AllZero,
  NegativeEntry,
  LengthMismatch,
  ArmOutOfRange,
  TooLarge,
  NegativeLoss,
  OutOfRangeLoss,
  NoFeasibleStrategy,
  AllFrozen,
  GraphChanged,
  UnobservedArm,
  SweepCapExceeded,
  SizeCap,
  NotStochastic,
  NonPositive,
  InvalidArgument,
  ConfigParse,
  IoFailure,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

// Probability vector over arms (or strategies). Entries are non-negative and
// sum to one within kProbTolerance.
class Distribution {
 public:
  Distribution() = default;

  // Wraps an already-normalized vector; throws if it is not a distribution.
  static Distribution from_probs(std::vector<double> probs);

  std::size_t size() const { return probs_.size(); }
  bool empty() const { return probs_.empty(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  std::span<const double> probs() const { return probs_; }

  friend bool operator==(const Distribution&, const Distribution&) = default;

 private:
  explicit Distribution(std::vector<double> probs) : probs_(std::move(probs)) {}
  std::vector<double> probs_;
};

// Per-arm losses for one round, every entry in [0,1].
class LossVector {
 public:
  LossVector() = default;
  explicit LossVector(std::vector<double> losses);

  std::size_t size() const { return losses_.size(); }
  double operator[](std::size_t i) const { return losses_[i]; }
  std::span<const double> values() const { return losses_; }

  friend bool operator==(const LossVector&, const LossVector&) = default;

 private:
  std::vector<double> losses_;
};

// Importance-weighted loss estimates with a declared magnitude bound; every
// entry must lie in [0, bound].
class EstimatedLossVector {
 public:
  EstimatedLossVector() = default;
  EstimatedLossVector(std::vector<double> losses, double bound);

  static EstimatedLossVector zeros(std::size_t n, double bound);

  std::size_t size() const { return losses_.size(); }
  double operator[](std::size_t i) const { return losses_[i]; }
  std::span<const double> values() const { return losses_; }
  double bound() const { return bound_; }
  double max() const;

 private:
  std::vector<double> losses_;
  double bound_ = 0.0;
};

// Undirected feedback graph. Playing arm i reveals the losses of its closed
// neighborhood N_i, which always contains i itself.
class FeedbackGraph {
 public:
  FeedbackGraph() = default;
  FeedbackGraph(std::size_t n_arms,
                std::span<const std::pair<ArmId, ArmId>> edges);

  static FeedbackGraph empty(std::size_t n);
  static FeedbackGraph complete(std::size_t n);
  static FeedbackGraph path(std::size_t n);
  static FeedbackGraph disjoint_cliques(std::size_t num_cliques,
                                        std::size_t clique_size);

  std::size_t n_arms() const { return closed_.size(); }
  // Neighbors of i excluding i.
  std::vector<ArmId> neighbors(ArmId i) const;
  // N_i: neighbors of i plus i, ascending.
  std::span<const ArmId> closed_neighborhood(ArmId i) const;
  bool adjacent(ArmId a, ArmId b) const;
  std::size_t edge_count() const;

  friend bool operator==(const FeedbackGraph&, const FeedbackGraph&) = default;

 private:
  void check_arm(ArmId i) const;
  std::vector<std::vector<ArmId>> closed_;
};

struct RoundRecord {
  std::size_t t = 0;
  ArmId played = 0;
  double true_loss = 0.0;  // strategy loss (sum over elements) for semi-bandits
  EstimatedLossVector estimated;
  double frozen_mass = 0.0;
  // Empty for learners whose play distribution is only available through
  // sampling (semi-bandit FPL).
  Distribution play_dist;
};

// Normalizes a non-negative vector into a distribution.
Distribution make_distribution(std::span<const double> raw);

double expected_loss(const Distribution& d, const LossVector& l);

// Inverse-CDF draw over ascending ids with a single uniform variate in [0,1).
ArmId sample_index(std::span<const double> probs, double u);

void require(bool condition, Errc code, const std::string& what);
// Literal-message overload; builds no string unless the check fails.
inline void require(bool condition, Errc code, const char* what) {
  if (!condition) throw Error(code, what);
}

}  // namespace smallloss
