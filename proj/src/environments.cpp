#include "smallloss/environments.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "smallloss/rng.hpp"

namespace smallloss {

namespace {

constexpr std::size_t kMaterializeCap = 100'000'000;

void check_means(double mu_star, double mu_rest) {
  require(mu_star >= 0.0 && mu_star < mu_rest && mu_rest <= 1.0, Errc::InvalidArgument,
          "need 0 <= mu_star < mu_rest <= 1");
}

std::vector<double> best_one(std::size_t groups, std::size_t best, double mu_star,
                             double mu_rest) {
  std::vector<double> m(groups, mu_rest);
  m[best] = mu_star;
  return m;
}

}  // namespace

StochasticSchedule::StochasticSchedule(std::size_t horizon, std::vector<std::size_t> group_of,
                                       std::vector<MeanSegment> segments, LossMode mode,
                                       std::uint64_t seed)
    : horizon_(horizon), group_of_(std::move(group_of)), segments_(std::move(segments)),
      mode_(mode), seed_(seed) {
  require(horizon_ >= 1, Errc::InvalidArgument, "horizon must be >= 1");
  require(!group_of_.empty(), Errc::InvalidArgument, "need at least one arm");
  groups_ = *std::max_element(group_of_.begin(), group_of_.end()) + 1;
  require(!segments_.empty() && segments_.front().start == 0, Errc::InvalidArgument,
          "first segment must start at round 0");
  for (std::size_t s = 0; s < segments_.size(); ++s) {
    require(segments_[s].group_means.size() == groups_, Errc::LengthMismatch,
            "segment means must cover every group");
    for (double m : segments_[s].group_means)
      require(m >= 0.0 && m <= 1.0, Errc::OutOfRangeLoss, "mean outside [0,1]");
    if (s > 0)
      require(segments_[s].start > segments_[s - 1].start, Errc::InvalidArgument,
              "segments must start in increasing order");
  }
  if (horizon_ * groups_ <= kMaterializeCap) {
    table_.resize(horizon_ * groups_);
    for (std::size_t t = 0; t < horizon_; ++t)
      draw_groups(t, std::span<double>(table_).subspan(t * groups_, groups_));
  }
}

const MeanSegment& StochasticSchedule::segment_at(std::size_t t) const {
  auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                             [](std::size_t v, const MeanSegment& s) { return v < s.start; });
  return *(it - 1);
}

void StochasticSchedule::draw_groups(std::size_t t, std::span<double> out) const {
  CounterRng rng = CounterRng::stream(seed_, t, Stream::Environment);
  const auto& means = segment_at(t).group_means;
  for (std::size_t g = 0; g < groups_; ++g) {
    const double u = rng.uniform();
    const double mu = means[g];
    if (mode_ == LossMode::Bernoulli) {
      out[g] = u < mu ? 1.0 : 0.0;
    } else if (mu <= 0.5) {
      out[g] = 2.0 * mu * u;  // uniform on [0, 2mu]
    } else {
      out[g] = 2.0 * mu - 1.0 + (2.0 - 2.0 * mu) * u;  // uniform on [2mu-1, 1]
    }
  }
}

LossVector StochasticSchedule::at(std::size_t t, std::span<const ArmId>) const {
  require(t < horizon_, Errc::InvalidArgument, "round beyond horizon");
  std::vector<double> g(groups_);
  if (!table_.empty())
    std::copy_n(table_.begin() + static_cast<std::ptrdiff_t>(t * groups_), groups_, g.begin());
  else
    draw_groups(t, g);
  std::vector<double> l(group_of_.size());
  for (std::size_t i = 0; i < l.size(); ++i) l[i] = g[group_of_[i]];
  return LossVector(std::move(l));
}

std::optional<std::vector<double>> StochasticSchedule::means() const {
  if (segments_.size() != 1) return std::nullopt;
  std::vector<double> m(group_of_.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = segments_[0].group_means[group_of_[i]];
  return m;
}

LossVector PunishLastPlayed::at(std::size_t, std::span<const ArmId> history) const {
  std::vector<double> l(d_, 0.0);
  if (!history.empty()) {
    require(history.back() < d_, Errc::ArmOutOfRange, "history arm out of range");
    l[history.back()] = 1.0;
  }
  return LossVector(std::move(l));
}

LossVector AdaptiveHook::at(std::size_t t, std::span<const ArmId> history) const {
  std::vector<double> l = cb_(t, history);
  require(l.size() == d_, Errc::LengthMismatch, "hook returned wrong number of losses");
  return LossVector(std::move(l));
}

std::shared_ptr<LossModel> as_adaptive(std::shared_ptr<const LossModel> oblivious) {
  const std::size_t d = oblivious->n();
  return std::make_shared<AdaptiveHook>(
      d, [m = std::move(oblivious)](std::size_t t, std::span<const ArmId> h) {
        const LossVector l = m->at(t, h);
        return std::vector<double>(l.values().begin(), l.values().end());
      });
}

ScriptAdversary ScriptAdversary::from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ConfigParse, std::string("adversary script: ") + e.what());
  }
  require(j.is_object() && j.contains("default"), Errc::ConfigParse,
          "adversary script needs a \"default\" loss vector");
  ScriptAdversary s;
  try {
    s.default_ = j.at("default").get<std::vector<double>>();
    require(!s.default_.empty(), Errc::ConfigParse, "empty default loss vector");
    LossVector check(s.default_);
    s.after_.assign(s.default_.size(), std::nullopt);
    if (j.contains("after")) {
      for (const auto& [key, value] : j.at("after").items()) {
        const std::size_t arm = std::stoul(key);
        require(arm < s.default_.size(), Errc::ConfigParse, "script arm out of range");
        auto v = value.get<std::vector<double>>();
        require(v.size() == s.default_.size(), Errc::ConfigParse, "script vector length mismatch");
        LossVector checked(v);
        s.after_[arm] = std::move(v);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ConfigParse, std::string("adversary script: ") + e.what());
  } catch (const std::logic_error& e) {
    if (dynamic_cast<const Error*>(&e)) throw;
    throw Error(Errc::ConfigParse, std::string("adversary script: ") + e.what());
  }
  return s;
}

ScriptAdversary ScriptAdversary::from_file(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), Errc::IoFailure, "cannot open adversary script " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

LossVector ScriptAdversary::at(std::size_t, std::span<const ArmId> history) const {
  if (!history.empty() && history.back() < after_.size() && after_[history.back()])
    return LossVector(*after_[history.back()]);
  return LossVector(default_);
}

GraphInstance make_smallloss_bandit(std::size_t d, std::size_t horizon, double mu_star,
                                    double mu_rest, std::uint64_t seed, LossMode mode) {
  require(d >= 1, Errc::InvalidArgument, "d must be >= 1");
  check_means(mu_star, mu_rest);
  CounterRng pick = CounterRng::stream(seed, 0, Stream::Instance);
  const std::size_t best = static_cast<std::size_t>(pick.below(d));
  std::vector<std::size_t> group(d);
  for (std::size_t i = 0; i < d; ++i) group[i] = i;
  GraphInstance inst;
  inst.name = "smallloss_bandit";
  inst.graph = FeedbackGraph::empty(d);
  inst.horizon = horizon;
  inst.true_alpha = d;
  inst.true_kappa = d;
  inst.lstar_target = mu_star * static_cast<double>(horizon);
  inst.losses = std::make_shared<StochasticSchedule>(
      horizon, std::move(group),
      std::vector<MeanSegment>{{0, best_one(d, best, mu_star, mu_rest)}}, mode, seed);
  return inst;
}

GraphInstance make_clique_union(std::size_t num_cliques, std::size_t clique_size,
                                std::size_t horizon, double mu_star, double mu_rest,
                                std::uint64_t seed, LossMode mode) {
  require(num_cliques >= 1 && clique_size >= 1, Errc::InvalidArgument, "counts must be >= 1");
  check_means(mu_star, mu_rest);
  CounterRng pick = CounterRng::stream(seed, 0, Stream::Instance);
  const std::size_t best = static_cast<std::size_t>(pick.below(num_cliques));
  const std::size_t d = num_cliques * clique_size;
  std::vector<std::size_t> group(d);
  for (std::size_t i = 0; i < d; ++i) group[i] = i / clique_size;
  GraphInstance inst;
  inst.name = "clique_union";
  inst.graph = FeedbackGraph::disjoint_cliques(num_cliques, clique_size);
  inst.horizon = horizon;
  inst.true_alpha = num_cliques;
  inst.true_kappa = num_cliques;
  inst.lstar_target = mu_star * static_cast<double>(horizon);
  inst.losses = std::make_shared<StochasticSchedule>(
      horizon, std::move(group),
      std::vector<MeanSegment>{{0, best_one(num_cliques, best, mu_star, mu_rest)}}, mode, seed);
  return inst;
}

SemiBanditEnvironment make_layered_paths(std::size_t layers, std::size_t width,
                                         std::size_t horizon, double mu_star, double mu_rest,
                                         std::uint64_t seed, LossMode mode) {
  check_means(mu_star, mu_rest);
  SemiBanditEnvironment env{"layered_paths", SemiBanditInstance::layered_paths(layers, width),
                            nullptr, horizon, 0.0};
  CounterRng pick = CounterRng::stream(seed, 0, Stream::Instance);
  const std::size_t ne = layers * width;
  std::vector<double> means(ne, mu_rest);
  for (std::size_t l = 0; l < layers; ++l)
    means[l * width + static_cast<std::size_t>(pick.below(width))] = mu_star;
  std::vector<std::size_t> group(ne);
  for (std::size_t e = 0; e < ne; ++e) group[e] = e;
  env.lstar_target = mu_star * static_cast<double>(layers) * static_cast<double>(horizon);
  env.element_losses = std::make_shared<StochasticSchedule>(
      horizon, std::move(group), std::vector<MeanSegment>{{0, std::move(means)}}, mode, seed);
  return env;
}

GraphInstance make_shifting(std::size_t d, std::size_t horizon, std::size_t num_switches,
                            double mu_star, double mu_rest, std::uint64_t seed, LossMode mode) {
  require(num_switches < horizon, Errc::InvalidArgument, "need num_switches < T");
  require(d >= 2 || num_switches == 0, Errc::InvalidArgument, "switching needs two arms");
  check_means(mu_star, mu_rest);
  CounterRng pick = CounterRng::stream(seed, 0, Stream::Instance);

  // Distinct breakpoints in [1, T-1] by partial Fisher-Yates over the range.
  std::vector<std::size_t> points;
  {
    std::vector<std::size_t> pool(horizon - 1);
    for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = i + 1;
    for (std::size_t k = 0; k < num_switches; ++k) {
      const std::size_t j = k + static_cast<std::size_t>(pick.below(pool.size() - k));
      std::swap(pool[k], pool[j]);
      points.push_back(pool[k]);
    }
    std::sort(points.begin(), points.end());
  }

  std::vector<MeanSegment> segments;
  std::size_t best = static_cast<std::size_t>(pick.below(d));
  segments.push_back({0, best_one(d, best, mu_star, mu_rest)});
  for (std::size_t p : points) {
    const std::size_t next = (best + 1 + static_cast<std::size_t>(pick.below(d - 1))) % d;
    best = next;
    segments.push_back({p, best_one(d, best, mu_star, mu_rest)});
  }

  std::vector<std::size_t> group(d);
  for (std::size_t i = 0; i < d; ++i) group[i] = i;
  GraphInstance inst;
  inst.name = "shifting";
  inst.graph = FeedbackGraph::empty(d);
  inst.horizon = horizon;
  inst.true_alpha = d;
  inst.true_kappa = d;
  inst.lstar_target = mu_star * static_cast<double>(horizon);
  inst.switch_points = points;
  inst.losses = std::make_shared<StochasticSchedule>(horizon, std::move(group),
                                                     std::move(segments), mode, seed);
  return inst;
}

}  // namespace smallloss
