#include "smallloss/learners.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace smallloss {

namespace {

constexpr double kCapSlack = 1e-9;

void check_graph_context(const StepContext& ctx, std::size_t d) {
  require(ctx.graph && ctx.graph_oracle && ctx.draws, Errc::InvalidArgument,
          "graph learner needs graph, oracle and draw stream");
  require(&ctx.graph_oracle->graph() == ctx.graph || ctx.graph_oracle->graph() == *ctx.graph,
          Errc::GraphChanged, "oracle graph differs from the round's graph");
  require(ctx.graph->n_arms() == d, Errc::LengthMismatch, "graph size differs from learner");
}

}  // namespace

GraphLossOracle::GraphLossOracle(const FeedbackGraph& g, const LossVector& losses)
    : graph_(&g), losses_(&losses) {
  require(g.n_arms() == losses.size(), Errc::LengthMismatch, "loss vector/graph size mismatch");
}

void GraphLossOracle::commit(ArmId played) {
  require(!played_, Errc::InvalidArgument, "arm already committed this round");
  require(played < graph_->n_arms(), Errc::ArmOutOfRange, "played arm out of range");
  played_ = played;
}

ArmId GraphLossOracle::played() const {
  require(played_.has_value(), Errc::InvalidArgument, "no arm committed");
  return *played_;
}

double GraphLossOracle::reveal(ArmId j) const {
  require(played_.has_value(), Errc::UnobservedArm, "loss queried before committing an arm");
  auto nb = graph_->closed_neighborhood(*played_);
  if (!std::binary_search(nb.begin(), nb.end(), j))
    throw Error(Errc::UnobservedArm, "arm " + std::to_string(j) + " is not observed");
  return (*losses_)[j];
}

ElementLossOracle::ElementLossOracle(const SemiBanditInstance& inst,
                                     const LossVector& element_losses)
    : inst_(&inst), losses_(&element_losses) {
  require(inst.n_elements() == element_losses.size(), Errc::LengthMismatch,
          "element loss vector size mismatch");
}

void ElementLossOracle::commit(StrategyId played) {
  require(in_played_.empty(), Errc::InvalidArgument, "strategy already committed this round");
  inst_->strategy_elements(played, elements_);
  in_played_ = make_mask(inst_->n_elements(), elements_);
}

double ElementLossOracle::reveal(ElementId e) const {
  if (in_played_.empty() || e >= in_played_.size() || !in_played_[e])
    throw Error(Errc::UnobservedArm, "element " + std::to_string(e) + " is not observed");
  return (*losses_)[e];
}

std::uint64_t InvariantTally::violations() const {
  return certificate_violations + cap_violations + frozen_mass_violations +
         alpha_observation_violations + gap_violations + hedge_bound_violations +
         sample_count_violations + phase_violations;
}

InvariantTally& InvariantTally::operator+=(const InvariantTally& o) {
  rounds += o.rounds;
  freeze_calls += o.freeze_calls;
  alpha_doublings += o.alpha_doublings;
  certificate_violations += o.certificate_violations;
  cap_violations += o.cap_violations;
  frozen_mass_violations += o.frozen_mass_violations;
  alpha_observation_violations += o.alpha_observation_violations;
  gap_violations += o.gap_violations;
  hedge_bound_violations += o.hedge_bound_violations;
  sample_count_violations += o.sample_count_violations;
  phase_violations += o.phase_violations;
  return *this;
}

double GraphLearnerConfig::gamma(std::size_t d) const {
  switch (mode) {
    case GraphMode::Blackbox: return eps_prime / (4.0 * static_cast<double>(alpha_guess));
    case GraphMode::GreenIx: return eps_prime / static_cast<double>(d);
    case GraphMode::GreenIxGraph: return eps_prime / static_cast<double>(kappa_guess);
  }
  return 0.0;
}

double GraphLearnerConfig::beta(std::size_t d) const {
  return mode == GraphMode::Blackbox ? 0.0 : eps_prime / static_cast<double>(d);
}

double GraphLearnerConfig::zeta(std::size_t d) const {
  switch (mode) {
    case GraphMode::Blackbox: return 0.0;
    case GraphMode::GreenIx: return eps_prime / (2.0 * static_cast<double>(d));
    case GraphMode::GreenIxGraph: return eps_prime / (6.0 * static_cast<double>(kappa_guess));
  }
  return 0.0;
}

double GraphLearnerConfig::eta(std::size_t d) const {
  if (mode == GraphMode::Blackbox) return eps_prime * gamma_prime(d);
  return zeta(d);
}

double eps_prime_for(GraphMode mode, double eps) {
  switch (mode) {
    case GraphMode::Blackbox: return eps / 2.0;
    case GraphMode::GreenIx: return eps / 2.0;
    case GraphMode::GreenIxGraph: return eps / 5.0;
  }
  return eps;
}

double semibandit_eps_prime(double eps) { return eps / 6.0; }

std::vector<double> graph_estimate(const FeedbackGraph& g, const FreezeResult& fr,
                                   GraphLossOracle& oracle, double zeta) {
  std::vector<double> est(g.n_arms(), 0.0);
  for (ArmId i : g.closed_neighborhood(oracle.played())) {
    if (fr.is_frozen(i)) continue;
    double w_obs = 0.0;
    for (ArmId j : g.closed_neighborhood(i)) w_obs += fr.play_dist[j];
    est[i] = oracle.reveal(i) / (w_obs + zeta);
  }
  return est;
}

void HedgeBoundTracker::add(const Distribution& p, std::span<const double> est) {
  for (std::size_t i = 0; i < est.size(); ++i) {
    first_ += p[i] * est[i];
    second_ += p[i] * est[i] * est[i];
  }
}

bool HedgeBoundTracker::holds(std::span<const double> cum, double eta) const {
  const double best = *std::min_element(cum.begin(), cum.end());
  const double rhs = eta * second_ + std::log(static_cast<double>(cum.size())) / eta;
  return first_ - best <= rhs * (1.0 + 1e-9) + 1e-9;
}

BlackboxLearner::BlackboxLearner(std::size_t d, double eps_prime, std::size_t alpha_guess,
                                 BlackboxOptions opts)
    : d_(d), eps_prime_(eps_prime), alpha_(alpha_guess), opts_(opts) {
  require(d >= 1, Errc::InvalidArgument, "need at least one arm");
  require(eps_prime > 0.0 && eps_prime < 1.0, Errc::InvalidArgument, "eps' must lie in (0,1)");
  require(alpha_guess >= 1, Errc::InvalidArgument, "alpha guess must be >= 1");
  require(opts.threshold_scale > 0.0, Errc::InvalidArgument, "threshold scale must be positive");
  reset_engine();
}

void BlackboxLearner::reset_engine() {
  if (opts_.engine == Engine::Hedge)
    engine_ = HedgeState(d_, eta());
  else
    engine_ = NoisyHedgeState(d_, eta(), opts_.noise);
}

Distribution BlackboxLearner::engine_distribution() const {
  return std::visit([](const auto& e) { return e.distribution(); }, engine_);
}

RoundRecord BlackboxLearner::step(StepContext& ctx) {
  check_graph_context(ctx, d_);
  const FeedbackGraph& g = *ctx.graph;

  Distribution p = engine_distribution();
  auto double_alpha = [&] {
    alpha_ *= 2;
    ++tally_.alpha_doublings;
    reset_engine();
    p = engine_distribution();
  };
  if (opts_.alpha_doubling) {
    // F_0 is computed up front so the check runs even when freezing would
    // leave nothing playable.
    std::vector<ArmId> initial;
    const double threshold = gamma() * opts_.threshold_scale;
    for (ArmId i = 0; i < d_; ++i)
      if (observation_mass(g, p, i) < threshold) initial.push_back(i);
    if (greedy_maximal_independent_set(g, initial).size() > alpha_) double_alpha();
  }
  FreezeResult fr;
  for (;;) {
    try {
      fr = dual_threshold_freeze(g, p, gamma() * opts_.threshold_scale);
      ++tally_.freeze_calls;
      break;
    } catch (const Error& e) {
      // A guess at or above alpha keeps the frozen mass below eps' < 1, so
      // this only fires while the guess is still too small.
      if (e.code() != Errc::AllFrozen || !opts_.alpha_doubling || alpha_ >= d_) throw;
      double_alpha();
    }
  }
  const double gamma_prime = gamma() / 3.0;
  if (!freeze_certificate_holds(g, p, fr, gamma_prime)) ++tally_.certificate_violations;

  const ArmId played = sample_index(fr.play_dist.probs(), ctx.draws->uniform());
  ctx.graph_oracle->commit(played);
  std::vector<double> est = graph_estimate(g, fr, *ctx.graph_oracle, 0.0);

  const double cap = 1.0 / gamma_prime;
  const double max_est = *std::max_element(est.begin(), est.end());
  if (max_est > cap * (1.0 + kCapSlack)) ++tally_.cap_violations;

  RoundRecord rec;
  rec.t = ctx.t;
  rec.played = played;
  rec.true_loss = ctx.graph_oracle->reveal(played);
  rec.frozen_mass = fr.frozen_mass;
  rec.estimated = EstimatedLossVector(std::move(est), std::max(cap, max_est));

  if (auto* h = std::get_if<HedgeState>(&engine_)) {
    h->update(rec.estimated);
  } else {
    std::get<NoisyHedgeState>(engine_).update(rec.estimated);
  }
  rec.play_dist = std::move(fr.play_dist);
  ++tally_.rounds;
  return rec;
}

GreenIxLearner::GreenIxLearner(std::size_t d, double eps_prime)
    : d_(d), eps_prime_(eps_prime) {
  require(d >= 1, Errc::InvalidArgument, "need at least one arm");
  require(eps_prime > 0.0 && eps_prime < 1.0, Errc::InvalidArgument, "eps' must lie in (0,1)");
  hedge_ = HedgeState(d, eta());
}

double GreenIxLearner::gap_bound() const {
  return 1.0 / gamma() + std::log(1.0 / gamma()) / eta();
}

RoundRecord GreenIxLearner::step(StepContext& ctx) {
  require(ctx.graph_oracle && ctx.draws, Errc::InvalidArgument, "missing oracle or draw stream");
  const Distribution p = hedge_.distribution();
  FreezeResult fr = play_prob_freeze(p, gamma());
  ++tally_.freeze_calls;

  const ArmId played = sample_index(fr.play_dist.probs(), ctx.draws->uniform());
  ctx.graph_oracle->commit(played);
  const double loss = ctx.graph_oracle->reveal(played);

  std::vector<double> est(d_, 0.0);
  est[played] = loss / (fr.play_dist[played] + zeta());
  const double cap = 1.0 / zeta();
  if (est[played] > cap * (1.0 + kCapSlack)) ++tally_.cap_violations;

  bound_.add(p, est);
  RoundRecord rec;
  rec.t = ctx.t;
  rec.played = played;
  rec.true_loss = loss;
  rec.frozen_mass = fr.frozen_mass;
  rec.estimated = EstimatedLossVector(std::move(est), cap);
  hedge_.update(rec.estimated);

  auto cum = hedge_.cum_est_loss();
  const auto [lo, hi] = std::minmax_element(cum.begin(), cum.end());
  if (*hi - *lo > gap_bound() * (1.0 + 1e-12)) ++tally_.gap_violations;
  if (!bound_.holds(cum, eta())) ++tally_.hedge_bound_violations;

  rec.play_dist = std::move(fr.play_dist);
  ++tally_.rounds;
  return rec;
}

GreenIxGraphLearner::GreenIxGraphLearner(FeedbackGraph g, double eps_prime, std::size_t kappa)
    : graph_(std::move(g)), eps_prime_(eps_prime), kappa_(kappa) {
  require(graph_.n_arms() >= 1, Errc::InvalidArgument, "need at least one arm");
  require(eps_prime > 0.0 && eps_prime < 1.0, Errc::InvalidArgument, "eps' must lie in (0,1)");
  require(kappa >= 1, Errc::InvalidArgument, "kappa must be >= 1");
  if (graph_.n_arms() <= 30) alpha_exact_ = exact_independence_number(graph_);
  hedge_ = HedgeState(graph_.n_arms(), eta());
}

RoundRecord GreenIxGraphLearner::step(StepContext& ctx) {
  check_graph_context(ctx, graph_.n_arms());
  require(ctx.graph == &graph_ || *ctx.graph == graph_, Errc::GraphChanged,
          "feedback graph changed between rounds");
  const FeedbackGraph& g = graph_;

  const Distribution p = hedge_.distribution();
  FreezeResult fr = triple_threshold_freeze(g, p, beta(), gamma());
  ++tally_.freeze_calls;
  const double gamma_prime = gamma() / 3.0;
  if (!freeze_certificate_holds(g, p, fr, gamma_prime)) ++tally_.certificate_violations;

  if (alpha_exact_) {
    // Only unfrozen arms carry estimates; for them p_i <= w_i.
    double sum = 0.0;
    for (ArmId i = 0; i < g.n_arms(); ++i) {
      if (fr.is_frozen(i)) continue;
      double w_obs = 0.0;
      for (ArmId j : g.closed_neighborhood(i)) w_obs += fr.play_dist[j];
      if (w_obs > 0.0) sum += p[i] / w_obs;
    }
    if (sum > static_cast<double>(*alpha_exact_) + 1e-9) ++tally_.alpha_observation_violations;
  }

  const ArmId played = sample_index(fr.play_dist.probs(), ctx.draws->uniform());
  ctx.graph_oracle->commit(played);
  std::vector<double> est = graph_estimate(g, fr, *ctx.graph_oracle, zeta());

  const double cap = 1.0 / gamma_prime;
  const double max_est = *std::max_element(est.begin(), est.end());
  if (max_est > cap * (1.0 + kCapSlack)) ++tally_.cap_violations;

  bound_.add(p, est);
  RoundRecord rec;
  rec.t = ctx.t;
  rec.played = played;
  rec.true_loss = ctx.graph_oracle->reveal(played);
  rec.frozen_mass = fr.frozen_mass;
  rec.estimated = EstimatedLossVector(std::move(est), std::max(cap, max_est));
  hedge_.update(rec.estimated);
  if (!bound_.holds(hedge_.cum_est_loss(), eta())) ++tally_.hedge_bound_violations;

  rec.play_dist = std::move(fr.play_dist);
  ++tally_.rounds;
  return rec;
}

UniformMixLearner::UniformMixLearner(std::size_t d, std::size_t horizon) : d_(d) {
  require(d >= 1 && horizon >= 1, Errc::InvalidArgument, "need d >= 1 and T >= 1");
  const double dd = static_cast<double>(d);
  mix_ = d == 1 ? 1.0
                : std::min(1.0, std::sqrt(dd * std::log(dd) /
                                          ((std::numbers::e - 1.0) * static_cast<double>(horizon))));
  hedge_ = HedgeState(d, mix_ / dd);
}

RoundRecord UniformMixLearner::step(StepContext& ctx) {
  require(ctx.graph_oracle && ctx.draws, Errc::InvalidArgument, "missing oracle or draw stream");
  const Distribution h = hedge_.distribution();
  std::vector<double> w(d_);
  for (std::size_t i = 0; i < d_; ++i)
    w[i] = (1.0 - mix_) * h[i] + mix_ / static_cast<double>(d_);
  Distribution play = make_distribution(w);

  const ArmId played = sample_index(play.probs(), ctx.draws->uniform());
  ctx.graph_oracle->commit(played);
  const double loss = ctx.graph_oracle->reveal(played);
  std::vector<double> est(d_, 0.0);
  est[played] = loss / play[played];

  RoundRecord rec;
  rec.t = ctx.t;
  rec.played = played;
  rec.true_loss = loss;
  rec.estimated = EstimatedLossVector(std::move(est), static_cast<double>(d_) / mix_);
  hedge_.update(rec.estimated);
  rec.play_dist = std::move(play);
  ++tally_.rounds;
  return rec;
}

SemiBanditLearner::SemiBanditLearner(const SemiBanditInstance& inst, double eps,
                                     SemiBanditOptions opts)
    : inst_(&inst), eps_prime_(semibandit_eps_prime(eps)), opts_(opts) {
  require(eps > 0.0 && eps < 1.0 + 1e-12, Errc::InvalidArgument, "eps must lie in (0,1]");
  require(opts.horizon >= 1, Errc::InvalidArgument, "horizon must be >= 1");
  const double m = static_cast<double>(inst.m());
  eta_ = eps / (2.0 * m * m);
  samples_ = sampled_freeze_sample_count(eps_prime_, gamma(), inst.m(), inst.n_elements(),
                                         opts.horizon, opts.delta);
  fpl_ = FplState(inst.n_elements(), eta_,
                  fpl_truncation(inst.n_elements(), opts.horizon, inst.m(), eta_),
                  make_oracle(inst));
}

RoundRecord SemiBanditLearner::step(StepContext& ctx) {
  require(ctx.element_oracle && ctx.draws && ctx.perturbations, Errc::InvalidArgument,
          "semi-bandit learner needs an element oracle and both random streams");
  CounterRng& sampling = *ctx.perturbations;
  last_ = sampled_semibandit_freeze(
      *inst_, [&] { return fpl_.draw(sampling, {}, scratch_); }, gamma(), samples_);
  ++tally_.freeze_calls;
  if (last_.samples != sampled_freeze_sample_count(eps_prime_, gamma(), inst_->m(),
                                                   inst_->n_elements(), opts_.horizon,
                                                   opts_.delta))
    ++tally_.sample_count_violations;
  for (ElementId e = 0; e < inst_->n_elements(); ++e)
    if (!last_.frozen_elements[e] && last_.p_hat[e] < gamma()) ++tally_.certificate_violations;

  // The played strategy is a fresh draw conditioned on avoiding frozen elements.
  const std::uint64_t cap = 100ull * samples_;
  std::vector<ElementId> elems;
  StrategyId played = 0;
  for (std::uint64_t attempt = 1;; ++attempt) {
    require(attempt <= cap, Errc::SweepCapExceeded, "play draw exceeded rejection cap");
    played = fpl_.draw(*ctx.draws, {}, scratch_);
    inst_->strategy_elements(played, elems);
    if (std::none_of(elems.begin(), elems.end(),
                     [&](ElementId e) { return last_.frozen_elements[e] != 0; }))
      break;
  }

  ElementLossOracle& oracle = *ctx.element_oracle;
  oracle.commit(played);
  const double zeta = opts_.implicit_exploration ? gamma() : 0.0;
  const double cap_est = 1.0 / gamma();
  std::vector<double> est(inst_->n_elements(), 0.0);
  double strategy_loss = 0.0;
  for (ElementId e : oracle.played_elements()) {
    const double l = oracle.reveal(e);
    strategy_loss += l;
    est[e] = l / (last_.p_hat[e] + zeta);
  }
  const double max_est = *std::max_element(est.begin(), est.end());
  if (max_est > cap_est * (1.0 + kCapSlack)) ++tally_.cap_violations;

  RoundRecord rec;
  rec.t = ctx.t;
  rec.played = static_cast<ArmId>(played);
  rec.true_loss = strategy_loss;
  rec.frozen_mass = std::clamp(last_.frozen_mass, 0.0, 1.0);
  rec.estimated = EstimatedLossVector(std::move(est), std::max(cap_est, max_est));
  fpl_.update(rec.estimated);
  ++tally_.rounds;
  return rec;
}

}  // namespace smallloss
