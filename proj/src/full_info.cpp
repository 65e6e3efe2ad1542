#include "smallloss/full_info.hpp"

#include <algorithm>
#include <cmath>

namespace smallloss {

HedgeState::HedgeState(std::size_t d, double eta) : cum_(d, 0.0), eta_(eta) {
  require(d >= 1, Errc::InvalidArgument, "hedge needs at least one arm");
  require(eta > 0.0 && std::isfinite(eta), Errc::InvalidArgument, "eta must be positive");
}

Distribution HedgeState::distribution() const {
  const double lo = *std::min_element(cum_.begin(), cum_.end());
  std::vector<double> w(cum_.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < cum_.size(); ++i) {
    w[i] = std::exp(-eta_ * (cum_[i] - lo));
    sum += w[i];
  }
  for (double& x : w) x /= sum;
  return Distribution::from_probs(std::move(w));
}

void HedgeState::update(std::span<const double> l) {
  require(l.size() == cum_.size(), Errc::LengthMismatch, "hedge update size mismatch");
  for (double x : l) require(x >= 0.0, Errc::NegativeLoss, "negative loss in hedge update");
  for (std::size_t i = 0; i < cum_.size(); ++i) cum_[i] += l[i];
}

void HedgeState::update(const EstimatedLossVector& l) { update(l.values()); }

Distribution hedge_distribution(const HedgeState& s) { return s.distribution(); }

HedgeState hedge_update(HedgeState s, const EstimatedLossVector& l) {
  s.update(l);
  return s;
}

NoisyHedgeState::NoisyHedgeState(std::size_t d, double eta, double noise)
    : inner_(d, eta), noise_(noise) {
  require(noise >= 0.0 && noise < 1.0, Errc::InvalidArgument, "noise must lie in [0,1)");
}

Distribution NoisyHedgeState::distribution() const {
  Distribution h = inner_.distribution();
  if (noise_ == 0.0) return h;
  const double floor = noise_ / static_cast<double>(h.size());
  std::vector<double> w(h.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = (1.0 - noise_) * h[i] + floor;
  return make_distribution(w);
}

Distribution noisy_hedge_distribution(const NoisyHedgeState& s) { return s.distribution(); }

double default_noise(std::optional<std::size_t> horizon) {
  if (horizon && *horizon > 1) return 1.0 / static_cast<double>(*horizon);
  return std::ldexp(1.0, -20);
}

MinCostOracle make_oracle(const SemiBanditInstance& inst) {
  return [&inst](std::span<const double> scores, const ArmMask& forbidden) {
    return inst.min_cost(scores, forbidden);
  };
}

FplState::FplState(std::size_t n_elements, double eta, double trunc, MinCostOracle oracle)
    : cum_(n_elements, 0.0), eta_(eta), trunc_(trunc), oracle_(std::move(oracle)) {
  require(n_elements >= 1, Errc::InvalidArgument, "FPL needs at least one element");
  require(eta > 0.0, Errc::InvalidArgument, "eta must be positive");
  require(trunc > 0.0, Errc::InvalidArgument, "truncation must be positive");
  require(static_cast<bool>(oracle_), Errc::InvalidArgument, "missing oracle");
}

void FplState::perturbations(CounterRng& rng, std::vector<double>& z) const {
  z.resize(cum_.size());
  for (double& x : z) x = std::min(rng.exponential() / eta_, trunc_);
}

StrategyId FplState::draw(CounterRng& rng, const ArmMask& forbidden,
                          std::vector<double>& scratch) const {
  perturbations(rng, scratch);
  for (std::size_t e = 0; e < cum_.size(); ++e) scratch[e] = cum_[e] - scratch[e];
  auto f = oracle_(scratch, forbidden);
  require(f.has_value(), Errc::NoFeasibleStrategy, "every strategy uses a forbidden element");
  return *f;
}

StrategyId FplState::draw(CounterRng& rng, const ArmMask& forbidden) const {
  std::vector<double> scratch;
  return draw(rng, forbidden, scratch);
}

void FplState::update(const EstimatedLossVector& l) {
  require(l.size() == cum_.size(), Errc::LengthMismatch, "FPL update size mismatch");
  for (double x : l.values()) require(x >= 0.0, Errc::NegativeLoss, "negative loss in FPL update");
  for (std::size_t e = 0; e < cum_.size(); ++e) cum_[e] += l[e];
}

double fpl_truncation(std::size_t n_elements, std::size_t horizon, std::size_t m, double eta) {
  const double ratio = static_cast<double>(n_elements) * static_cast<double>(horizon) /
                       static_cast<double>(std::max<std::size_t>(m, 1));
  return std::max(std::log(std::max(ratio, 2.0)), std::log(2.0)) / eta;
}

std::vector<double> fpl_perturbations(const FplState& s, CounterRng& rng) {
  std::vector<double> z;
  s.perturbations(rng, z);
  return z;
}

StrategyId fpl_draw(const FplState& s, CounterRng& rng, const ArmMask& forbidden) {
  return s.draw(rng, forbidden);
}

FplState fpl_update(FplState s, const EstimatedLossVector& l) {
  s.update(l);
  return s;
}

}  // namespace smallloss
