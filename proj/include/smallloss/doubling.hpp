#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "smallloss/learners.hpp"

namespace smallloss {

struct PhaseState {
  std::size_t tau = 0;
  double eps_tau = 1.0;
  double phase_loss = 0.0;  // realized loss within the phase
  double psi = 0.0;
  double q = 1.0;
  std::size_t alpha_guess = 0;

  // eps·L̂ > Ψ/eps^q
  bool should_end() const;
};

struct PhaseBoundary {
  std::size_t tau = 0;
  double eps = 1.0;
  std::size_t start_t = 0;
  std::size_t end_t = 0;  // last round of the phase, inclusive
  double phase_loss = 0.0;
  double loss_before_end = 0.0;
  double psi = 0.0;             // Ψ in force at end_t
  double psi_before_end = 0.0;  // Ψ in force at end_t - 1
  std::size_t alpha_guess = 0;
};

// Builds the learner for a new phase; `previous` is the retiring learner
// (null for the first phase) so state such as an alpha guess can carry over.
using LearnerFactory = std::function<std::unique_ptr<Learner>(double eps, const Learner* previous)>;
using PsiFunction = std::function<double(const Learner& current)>;

// Runs a fresh inner learner per phase with eps_tau = 2^-tau; a phase ends
// after the first round at which eps·L̂ exceeds Ψ/eps^q.
class DoublingLearner final : public Learner {
 public:
  DoublingLearner(LearnerFactory factory, PsiFunction psi, double q);

  RoundRecord step(StepContext& ctx) override;
  std::string name() const override { return inner_->name(); }
  const InvariantTally& tally() const override;
  std::size_t alpha_guess() const override { return inner_->alpha_guess(); }

  const PhaseState& phase() const { return state_; }
  const std::vector<PhaseBoundary>& boundaries() const { return boundaries_; }
  const Learner& inner() const { return *inner_; }

 private:
  LearnerFactory factory_;
  PsiFunction psi_;
  std::unique_ptr<Learner> inner_;
  PhaseState state_;
  std::size_t phase_start_ = 0;
  std::vector<PhaseBoundary> boundaries_;
  InvariantTally retired_;
  mutable InvariantTally combined_;
};

// Ψ choices per learner family; see README for the constants.
double psi_blackbox(std::size_t alpha_guess, std::size_t d, double delta);
double psi_green_ix(std::size_t d, double delta);
double psi_green_ix_graph(std::size_t kappa, std::size_t d, double delta);
double psi_semibandit(std::size_t m, std::size_t n_elements, std::size_t horizon, double delta);

// Re-derives every boundary from per-round realized losses: the recorded
// phase loss matches, the end condition holds at end_t and fails one round
// earlier. Returns the number of violations.
std::size_t check_phase_boundaries(const std::vector<PhaseBoundary>& boundaries,
                                   const std::vector<double>& round_losses, double q);

// Phase count <= log2(total loss + 1) + 1.
bool phase_count_within_bound(std::size_t phases, double total_loss);

}  // namespace smallloss
