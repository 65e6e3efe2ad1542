#include "smallloss/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace smallloss {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::AllZero: return "AllZero";
    case Errc::NegativeEntry: return "NegativeEntry";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::ArmOutOfRange: return "ArmOutOfRange";
    case Errc::TooLarge: return "TooLarge";
    case Errc::NegativeLoss: return "NegativeLoss";
    case Errc::OutOfRangeLoss: return "OutOfRangeLoss";
    case Errc::NoFeasibleStrategy: return "NoFeasibleStrategy";
    case Errc::AllFrozen: return "AllFrozen";
    case Errc::GraphChanged: return "GraphChanged";
    case Errc::UnobservedArm: return "UnobservedArm";
    case Errc::SweepCapExceeded: return "SweepCapExceeded";
    case Errc::SizeCap: return "SizeCap";
    case Errc::NotStochastic: return "NotStochastic";
    case Errc::NonPositive: return "NonPositive";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::ConfigParse: return "ConfigParse";
    case Errc::IoFailure: return "IoFailure";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(errc_name(code)) + ": " + what),
      code_(code) {}

void require(bool condition, Errc code, const std::string& what) {
  if (!condition) throw Error(code, what);
}

Distribution Distribution::from_probs(std::vector<double> probs) {
  require(!probs.empty(), Errc::InvalidArgument, "empty distribution");
  double sum = 0.0;
  for (double p : probs) {
    require(std::isfinite(p) && p >= 0.0, Errc::NegativeEntry,
            "distribution entry must be finite and non-negative");
    sum += p;
  }
  require(std::abs(sum - 1.0) <= kProbTolerance, Errc::InvalidArgument,
          "distribution does not sum to one");
  return Distribution(std::move(probs));
}

LossVector::LossVector(std::vector<double> losses) : losses_(std::move(losses)) {
  for (double l : losses_) {
    if (!(std::isfinite(l) && l >= 0.0 && l <= 1.0))
      throw Error(Errc::OutOfRangeLoss, "loss outside [0,1]: " + std::to_string(l));
  }
}

EstimatedLossVector::EstimatedLossVector(std::vector<double> losses, double bound)
    : losses_(std::move(losses)), bound_(bound) {
  require(bound > 0.0, Errc::InvalidArgument, "estimate bound must be positive");
  for (double l : losses_) {
    if (!(l >= 0.0)) throw Error(Errc::NegativeLoss, "negative estimated loss");
    if (!(l <= bound_ * (1.0 + 1e-12)))
      throw Error(Errc::InvalidArgument, "estimated loss " + std::to_string(l) +
                                             " exceeds bound " + std::to_string(bound_));
  }
}

EstimatedLossVector EstimatedLossVector::zeros(std::size_t n, double bound) {
  return EstimatedLossVector(std::vector<double>(n, 0.0), bound);
}

double EstimatedLossVector::max() const {
  return losses_.empty() ? 0.0 : *std::max_element(losses_.begin(), losses_.end());
}

FeedbackGraph::FeedbackGraph(std::size_t n_arms,
                             std::span<const std::pair<ArmId, ArmId>> edges)
    : closed_(n_arms) {
  for (ArmId i = 0; i < n_arms; ++i) closed_[i].push_back(i);
  for (auto [a, b] : edges) {
    require(a < n_arms && b < n_arms, Errc::ArmOutOfRange, "edge endpoint out of range");
    if (a == b) continue;
    closed_[a].push_back(b);
    closed_[b].push_back(a);
  }
  for (auto& nb : closed_) {
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
  }
}

FeedbackGraph FeedbackGraph::empty(std::size_t n) {
  return FeedbackGraph(n, std::span<const std::pair<ArmId, ArmId>>{});
}

FeedbackGraph FeedbackGraph::complete(std::size_t n) {
  return disjoint_cliques(1, n);
}

FeedbackGraph FeedbackGraph::path(std::size_t n) {
  std::vector<std::pair<ArmId, ArmId>> edges;
  for (ArmId i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  return FeedbackGraph(n, edges);
}

FeedbackGraph FeedbackGraph::disjoint_cliques(std::size_t num_cliques,
                                              std::size_t clique_size) {
  std::vector<std::pair<ArmId, ArmId>> edges;
  for (std::size_t c = 0; c < num_cliques; ++c) {
    const ArmId base = c * clique_size;
    for (ArmId a = 0; a < clique_size; ++a)
      for (ArmId b = a + 1; b < clique_size; ++b) edges.emplace_back(base + a, base + b);
  }
  return FeedbackGraph(num_cliques * clique_size, edges);
}

void FeedbackGraph::check_arm(ArmId i) const {
  if (i >= closed_.size())
    throw Error(Errc::ArmOutOfRange, "arm " + std::to_string(i) + " out of range");
}

std::span<const ArmId> FeedbackGraph::closed_neighborhood(ArmId i) const {
  check_arm(i);
  return closed_[i];
}

std::vector<ArmId> FeedbackGraph::neighbors(ArmId i) const {
  check_arm(i);
  std::vector<ArmId> out;
  out.reserve(closed_[i].size() - 1);
  for (ArmId j : closed_[i])
    if (j != i) out.push_back(j);
  return out;
}

bool FeedbackGraph::adjacent(ArmId a, ArmId b) const {
  check_arm(a);
  check_arm(b);
  if (a == b) return false;
  return std::binary_search(closed_[a].begin(), closed_[a].end(), b);
}

std::size_t FeedbackGraph::edge_count() const {
  std::size_t total = 0;
  for (const auto& nb : closed_) total += nb.size() - 1;
  return total / 2;
}

Distribution make_distribution(std::span<const double> raw) {
  require(!raw.empty(), Errc::AllZero, "empty input");
  double sum = 0.0;
  for (double v : raw) {
    require(std::isfinite(v), Errc::NegativeEntry, "non-finite entry");
    require(v >= 0.0, Errc::NegativeEntry, "negative entry");
    sum += v;
  }
  require(sum > 0.0, Errc::AllZero, "entries sum to zero");
  std::vector<double> probs(raw.begin(), raw.end());
  for (double& p : probs) p /= sum;
  return Distribution::from_probs(std::move(probs));
}

double expected_loss(const Distribution& d, const LossVector& l) {
  require(d.size() == l.size(), Errc::LengthMismatch, "distribution/loss length mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) total += d[i] * l[i];
  return std::clamp(total, 0.0, 1.0);
}

ArmId sample_index(std::span<const double> probs, double u) {
  require(!probs.empty(), Errc::InvalidArgument, "cannot sample from empty vector");
  double cum = 0.0;
  ArmId last_positive = probs.size();
  for (ArmId i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    cum += probs[i];
    last_positive = i;
    if (u < cum) return i;
  }
  require(last_positive < probs.size(), Errc::AllZero, "no positive mass to sample");
  return last_positive;
}

}  // namespace smallloss
