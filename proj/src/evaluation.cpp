#include "smallloss/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

namespace smallloss {

RegretTracker::RegretTracker(std::size_t n_arms) : cum_(n_arms, 0.0) {}

void RegretTracker::add(const LossVector& losses, double learner_loss) {
  require(losses.size() == cum_.size(), Errc::LengthMismatch, "loss vector size mismatch");
  for (std::size_t i = 0; i < cum_.size(); ++i) cum_[i] += losses[i];
  learner_ += learner_loss;
  ++rounds_;
}

ArmId RegretTracker::best_arm() const {
  return static_cast<ArmId>(std::min_element(cum_.begin(), cum_.end()) - cum_.begin());
}

double RegretTracker::best_fixed_loss() const { return cum_[best_arm()]; }

RegretSummary RegretTracker::summary(double eps) const {
  RegretSummary s;
  s.learner_loss = learner_;
  s.best_arm = best_arm();
  s.best_fixed_loss = cum_[s.best_arm];
  s.lstar = s.best_fixed_loss;
  s.regret = s.learner_loss - s.best_fixed_loss;
  s.eps = eps;
  s.apx_regret = (1.0 - eps) * s.learner_loss - s.best_fixed_loss;
  return s;
}

StrategyRegretTracker::StrategyRegretTracker(const SemiBanditInstance& inst)
    : inst_(&inst), cum_(inst.n_elements(), 0.0) {}

void StrategyRegretTracker::add(const LossVector& element_losses, double learner_loss) {
  require(element_losses.size() == cum_.size(), Errc::LengthMismatch, "loss vector size mismatch");
  for (std::size_t e = 0; e < cum_.size(); ++e) cum_[e] += element_losses[e];
  learner_ += learner_loss;
}

double StrategyRegretTracker::best_fixed_loss() const {
  const StrategyId f = *inst_->min_cost(cum_, {});
  double total = 0.0;
  for (ElementId e : inst_->strategy_elements(f)) total += cum_[e];
  return total;
}

RegretSummary StrategyRegretTracker::summary(double eps) const {
  RegretSummary s;
  s.learner_loss = learner_;
  s.best_arm = static_cast<ArmId>(*inst_->min_cost(cum_, {}));
  s.best_fixed_loss = best_fixed_loss();
  s.lstar = s.best_fixed_loss;
  s.regret = s.learner_loss - s.best_fixed_loss;
  s.eps = eps;
  s.apx_regret = (1.0 - eps) * s.learner_loss - s.best_fixed_loss;
  return s;
}

RegretSummary actual_regret(std::span<const RoundRecord> trace,
                            std::span<const LossVector> losses, double eps) {
  require(trace.size() == losses.size(), Errc::LengthMismatch, "trace/schedule length mismatch");
  require(!losses.empty(), Errc::InvalidArgument, "empty schedule");
  RegretTracker tracker(losses[0].size());
  std::vector<double> per_round;
  per_round.reserve(trace.size());
  for (std::size_t t = 0; t < trace.size(); ++t) {
    require(trace[t].played < losses[t].size(), Errc::ArmOutOfRange, "played arm out of range");
    tracker.add(losses[t], losses[t][trace[t].played]);
    per_round.push_back(tracker.learner_loss());
  }
  RegretSummary s = tracker.summary(eps);
  s.per_round = std::move(per_round);
  return s;
}

double pseudo_regret(std::span<const RoundRecord> trace,
                     const std::optional<std::vector<double>>& means) {
  require(means.has_value() && !means->empty(), Errc::NotStochastic,
          "pseudo-regret needs per-arm means");
  const double best = *std::min_element(means->begin(), means->end());
  double total = 0.0;
  for (const auto& r : trace) {
    require(r.played < means->size(), Errc::ArmOutOfRange, "played arm out of range");
    total += (*means)[r.played] - best;
  }
  return total;
}

ShiftingComparator best_shifting_sequence(std::span<const LossVector> losses, std::size_t K) {
  const std::size_t T = losses.size();
  require(T >= 1, Errc::InvalidArgument, "empty schedule");
  require(K < T, Errc::InvalidArgument, "need K < T");
  const std::size_t d = losses[0].size();
  const std::size_t levels = K + 1;
  constexpr std::uint32_t kStay = std::numeric_limits<std::uint32_t>::max();

  // dp[k][i]: least loss through round t ending on arm i with at most k switches.
  std::vector<double> dp(levels * d), next(levels * d);
  // from[t][k][i]: predecessor arm if round t switched, kStay otherwise.
  std::vector<std::uint32_t> from(T * levels * d, kStay);
  for (std::size_t k = 0; k < levels; ++k)
    for (std::size_t i = 0; i < d; ++i) dp[k * d + i] = losses[0][i];

  for (std::size_t t = 1; t < T; ++t) {
    require(losses[t].size() == d, Errc::LengthMismatch, "ragged schedule");
    for (std::size_t k = 0; k < levels; ++k) {
      std::size_t best_prev = 0;
      if (k > 0)
        for (std::size_t j = 1; j < d; ++j)
          if (dp[(k - 1) * d + j] < dp[(k - 1) * d + best_prev]) best_prev = j;
      for (std::size_t i = 0; i < d; ++i) {
        double base = dp[k * d + i];
        std::uint32_t src = kStay;
        if (k > 0 && dp[(k - 1) * d + best_prev] < base) {
          base = dp[(k - 1) * d + best_prev];
          src = static_cast<std::uint32_t>(best_prev);
        }
        next[k * d + i] = base + losses[t][i];
        from[(t * levels + k) * d + i] = src;
      }
    }
    std::swap(dp, next);
  }

  ShiftingComparator out;
  std::size_t arm = 0;
  for (std::size_t i = 1; i < d; ++i)
    if (dp[K * d + i] < dp[K * d + arm]) arm = i;
  out.loss = dp[K * d + arm];
  out.sequence.assign(T, 0);
  std::size_t k = K;
  for (std::size_t t = T; t-- > 0;) {
    out.sequence[t] = arm;
    if (t == 0) break;
    const std::uint32_t src = from[(t * levels + k) * d + arm];
    if (src != kStay) {
      arm = src;
      --k;
    }
  }
  return out;
}

std::unique_ptr<SequenceSampler> DeterministicSampler::clone() const {
  return std::make_unique<DeterministicSampler>(*this);
}

double DeterministicSampler::next_mean() const {
  static constexpr double kPattern[] = {0.1, 0.9, 0.5, 0.0, 1.0, 0.3};
  return kPattern[t_ % std::size(kPattern)];
}

double DeterministicSampler::draw(CounterRng&) {
  const double x = next_mean();
  ++t_;
  return x;
}

std::unique_ptr<SequenceSampler> BernoulliSampler::clone() const {
  return std::make_unique<BernoulliSampler>(*this);
}

std::unique_ptr<SequenceSampler> PolyaSampler::clone() const {
  return std::make_unique<PolyaSampler>(*this);
}

double PolyaSampler::next_mean() const {
  return (a_ + successes_) / (a_ + b_ + successes_ + failures_);
}

double PolyaSampler::draw(CounterRng& rng) {
  const bool hit = rng.bernoulli(next_mean());
  (hit ? successes_ : failures_) += 1.0;
  return hit ? 1.0 : 0.0;
}

double concentration_bound(double eps, double delta) {
  return (1.0 + eps) * std::log(1.0 / delta) / eps;
}

ConcentrationRates concentration_check(const SequenceSampler& sampler, std::size_t T,
                                       double eps, double delta, std::size_t trials,
                                       std::uint64_t seed, std::size_t threads) {
  require(eps > 0.0 && delta > 0.0 && delta < 1.0, Errc::InvalidArgument,
          "need eps > 0 and delta in (0,1)");
  const double bound = concentration_bound(eps, delta);
  std::vector<std::uint8_t> upper(trials, 0), lower(trials, 0);

  auto run_range = [&](std::size_t lo, std::size_t hi) {
    auto s = sampler.clone();
    for (std::size_t k = lo; k < hi; ++k) {
      s->reset();
      CounterRng rng = CounterRng::stream(seed, k, Stream::Trials);
      double sum_x = 0.0, sum_m = 0.0;
      for (std::size_t t = 0; t < T; ++t) {
        sum_m += s->next_mean();
        sum_x += s->draw(rng);
      }
      upper[k] = sum_x - (1.0 + eps) * sum_m > bound;
      lower[k] = (1.0 - eps) * sum_m - sum_x > bound;
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, std::max<std::size_t>(trials, 1));
  std::vector<std::thread> pool;
  const std::size_t chunk = (trials + threads - 1) / threads;
  for (std::size_t w = 0; w < threads; ++w) {
    const std::size_t lo = w * chunk, hi = std::min(trials, lo + chunk);
    if (lo < hi) pool.emplace_back(run_range, lo, hi);
  }
  for (auto& th : pool) th.join();

  ConcentrationRates r;
  r.trials = trials;
  r.upper_violations = static_cast<std::size_t>(std::count(upper.begin(), upper.end(), 1));
  r.lower_violations = static_cast<std::size_t>(std::count(lower.begin(), lower.end(), 1));
  if (trials > 0) {
    r.upper = static_cast<double>(r.upper_violations) / static_cast<double>(trials);
    r.lower = static_cast<double>(r.lower_violations) / static_cast<double>(trials);
  }
  return r;
}

ScalingFit fit_scaling_exponent(std::span<const std::pair<double, double>> points) {
  require(points.size() >= 3, Errc::InvalidArgument, "need at least 3 points to fit");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(points.size());
  std::vector<double> xs, ys;
  for (auto [x, y] : points) {
    require(x > 0.0 && y > 0.0, Errc::NonPositive, "scaling fit needs positive points");
    xs.push_back(std::log(x));
    ys.push_back(std::log(y));
  }
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double denom = n * sxx - sx * sx;
  require(denom > 0.0, Errc::InvalidArgument, "x values must not all coincide");
  ScalingFit f;
  f.exponent = (n * sxy - sx * sy) / denom;
  f.intercept = (sy - f.exponent * sx) / n;
  const double mean_y = sy / n;
  double ss_tot = 0, ss_res = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double pred = f.intercept + f.exponent * xs[i];
    ss_res += (ys[i] - pred) * (ys[i] - pred);
    ss_tot += (ys[i] - mean_y) * (ys[i] - mean_y);
  }
  f.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  f.reliable = f.r_squared >= 0.9;
  f.used_points = xs.size();
  if (!f.reliable) f.warnings.push_back("fit unreliable: r^2 below 0.9");
  return f;
}

ScalingFit fit_scaling_exponent(std::span<const std::pair<double, double>> points,
                                double additive_floor) {
  std::vector<std::pair<double, double>> kept;
  std::vector<std::string> warnings;
  for (auto p : points) {
    if (p.second < 2.0 * additive_floor) {
      warnings.push_back("dropped point x=" + std::to_string(p.first) +
                         " below additive floor");
      continue;
    }
    kept.push_back(p);
  }
  ScalingFit f = fit_scaling_exponent(kept);
  f.warnings.insert(f.warnings.begin(), warnings.begin(), warnings.end());
  return f;
}

}  // namespace smallloss
