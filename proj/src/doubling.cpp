#include "smallloss/doubling.hpp"

#include <cmath>

namespace smallloss {

namespace {

bool end_condition(double eps, double loss, double psi, double q) {
  return eps * loss > psi / std::pow(eps, q);
}

}  // namespace

bool PhaseState::should_end() const { return end_condition(eps_tau, phase_loss, psi, q); }

DoublingLearner::DoublingLearner(LearnerFactory factory, PsiFunction psi, double q)
    : factory_(std::move(factory)), psi_(std::move(psi)) {
  require(q >= 1.0, Errc::InvalidArgument, "doubling exponent q must be >= 1");
  inner_ = factory_(1.0, nullptr);
  require(inner_ != nullptr, Errc::InvalidArgument, "factory returned no learner");
  state_.q = q;
  state_.psi = psi_(*inner_);
  state_.alpha_guess = inner_->alpha_guess();
  require(state_.psi > 0.0, Errc::InvalidArgument, "psi must be positive");
}

RoundRecord DoublingLearner::step(StepContext& ctx) {
  const double psi_before = state_.psi;
  const double loss_before = state_.phase_loss;
  RoundRecord rec = inner_->step(ctx);
  state_.phase_loss += rec.true_loss;
  state_.psi = psi_(*inner_);
  state_.alpha_guess = inner_->alpha_guess();

  if (state_.should_end()) {
    PhaseBoundary b;
    b.tau = state_.tau;
    b.eps = state_.eps_tau;
    b.start_t = phase_start_;
    b.end_t = ctx.t;
    b.phase_loss = state_.phase_loss;
    b.loss_before_end = loss_before;
    b.psi = state_.psi;
    b.psi_before_end = psi_before;
    b.alpha_guess = state_.alpha_guess;
    boundaries_.push_back(b);

    retired_ += inner_->tally();
    ++state_.tau;
    state_.eps_tau /= 2.0;
    state_.phase_loss = 0.0;
    phase_start_ = ctx.t + 1;
    inner_ = factory_(state_.eps_tau, inner_.get());
    state_.psi = psi_(*inner_);
    state_.alpha_guess = inner_->alpha_guess();
  }
  return rec;
}

const InvariantTally& DoublingLearner::tally() const {
  combined_ = retired_;
  combined_ += inner_->tally();
  return combined_;
}

double psi_blackbox(std::size_t alpha_guess, std::size_t d, double delta) {
  const double dd = static_cast<double>(d);
  return 48.0 * static_cast<double>(alpha_guess) * (std::log(dd) + std::log(dd / delta));
}

// The GREEN-IX variants use ln(d/delta)/eta evaluated at eps = 1, so a phase
// ends once the realized loss outweighs the learner's own additive term.
double psi_green_ix(std::size_t d, double delta) {
  const double dd = static_cast<double>(d);
  return 4.0 * dd * std::log(dd / delta);
}

double psi_green_ix_graph(std::size_t kappa, std::size_t d, double delta) {
  return 30.0 * static_cast<double>(kappa) * std::log(static_cast<double>(d) / delta);
}

double psi_semibandit(std::size_t m, std::size_t n_elements, std::size_t horizon, double delta) {
  const double mm = static_cast<double>(m);
  const double e = static_cast<double>(n_elements);
  return (mm * mm * mm + e) * std::log(e * static_cast<double>(horizon) / (mm * delta));
}

std::size_t check_phase_boundaries(const std::vector<PhaseBoundary>& boundaries,
                                   const std::vector<double>& round_losses, double q) {
  std::size_t bad = 0;
  std::size_t expected_start = boundaries.empty() ? 0 : boundaries.front().start_t;
  double expected_eps = 1.0;
  for (const auto& b : boundaries) {
    if (b.start_t != expected_start || b.end_t < b.start_t || b.end_t >= round_losses.size() ||
        b.eps != expected_eps) {
      ++bad;
      continue;
    }
    double sum = 0.0;
    for (std::size_t t = b.start_t; t <= b.end_t; ++t) sum += round_losses[t];
    const double before = sum - round_losses[b.end_t];
    if (std::abs(sum - b.phase_loss) > 1e-9 * std::max(1.0, sum)) ++bad;
    if (!end_condition(b.eps, sum, b.psi, q)) ++bad;
    if (b.end_t > b.start_t && end_condition(b.eps, before, b.psi_before_end, q)) ++bad;
    expected_start = b.end_t + 1;
    expected_eps = b.eps / 2.0;
  }
  return bad;
}

bool phase_count_within_bound(std::size_t phases, double total_loss) {
  return static_cast<double>(phases) <= std::log2(total_loss + 1.0) + 1.0 + 1e-12;
}

}  // namespace smallloss
