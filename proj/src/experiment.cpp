#include "smallloss/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <thread>

namespace smallloss {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::size_t kFullTraceLimit = 100'000;
constexpr std::size_t kCheckpoints = 1024;

template <typename T>
T required(const json& j, const char* key, const char* section) {
  if (!j.contains(key))
    throw Error(Errc::ConfigParse, std::string("missing ") + section + "." + key);
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(Errc::ConfigParse, std::string("bad ") + section + "." + key + ": " + e.what());
  }
}

template <typename T>
T optional_field(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(Errc::ConfigParse, std::string("bad ") + key + ": " + e.what());
  }
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::uint64_t env_seed(const ExperimentConfig& cfg, std::uint64_t seed) {
  return CounterRng::mix(cfg.instance.seed ^ CounterRng::mix(seed));
}

bool is_semibandit(const ExperimentConfig& cfg) { return cfg.instance.kind == "layered_paths"; }

GraphInstance build_graph_instance(const ExperimentConfig& cfg, std::uint64_t seed) {
  const auto& ic = cfg.instance;
  const std::uint64_t s = env_seed(cfg, seed);
  GraphInstance inst;
  if (ic.kind == "smallloss_bandit") {
    inst = make_smallloss_bandit(ic.d, cfg.T, ic.mu_star, ic.mu_rest, s, ic.loss_mode);
  } else if (ic.kind == "clique_union") {
    inst = make_clique_union(ic.num_cliques, ic.clique_size, cfg.T, ic.mu_star, ic.mu_rest, s,
                             ic.loss_mode);
  } else if (ic.kind == "shifting") {
    inst = make_shifting(ic.d, cfg.T, ic.num_switches, ic.mu_star, ic.mu_rest, s, ic.loss_mode);
  } else {
    throw Error(Errc::ConfigParse, "unknown instance kind " + ic.kind);
  }
  if (ic.adversary == "punish_last") {
    inst.losses = std::make_shared<PunishLastPlayed>(inst.graph.n_arms());
  } else if (ic.adversary != "oblivious") {
    auto script = std::make_shared<ScriptAdversary>(ScriptAdversary::from_file(ic.adversary));
    require(script->n() == inst.graph.n_arms(), Errc::ConfigParse,
            "adversary script arm count differs from instance");
    inst.losses = script;
  }
  return inst;
}

struct LearnerSetup {
  std::unique_ptr<Learner> learner;
  DoublingLearner* doubling = nullptr;
  SemiBanditLearner* semibandit = nullptr;
};

LearnerSetup build_learner(const ExperimentConfig& cfg, const GraphInstance* g,
                           const SemiBanditEnvironment* sb) {
  const auto& ac = cfg.algorithm;
  const double delta = ac.delta;
  LearnerFactory factory;
  PsiFunction psi;
  double q = 1.0;

  if (ac.name == "semibandit") {
    require(sb != nullptr, Errc::ConfigParse, "semibandit algorithm needs layered_paths");
    const SemiBanditInstance* inst = &sb->instance;
    SemiBanditOptions opts{ac.implicit_exploration, cfg.T, delta};
    factory = [inst, opts](double eps, const Learner*) {
      return std::make_unique<SemiBanditLearner>(*inst, eps, opts);
    };
    psi = [inst, T = cfg.T, delta](const Learner&) {
      return psi_semibandit(inst->m(), inst->n_elements(), T, delta);
    };
  } else {
    require(g != nullptr, Errc::ConfigParse, ac.name + " needs a graph instance");
    const std::size_t d = g->graph.n_arms();
    if (ac.name == "blackbox") {
      BlackboxOptions opts;
      opts.engine = ac.engine;
      opts.noise = ac.noise.value_or(default_noise(cfg.T));
      opts.alpha_doubling = ac.alpha_doubling;
      opts.threshold_scale = ac.threshold_scale;
      const std::size_t alpha0 = ac.alpha_guess;
      factory = [d, opts, alpha0](double eps, const Learner* prev) {
        const std::size_t alpha = prev ? std::max<std::size_t>(1, prev->alpha_guess()) : alpha0;
        return std::make_unique<BlackboxLearner>(d, eps_prime_for(GraphMode::Blackbox, eps),
                                                 alpha, opts);
      };
      psi = [d, delta](const Learner& l) { return psi_blackbox(l.alpha_guess(), d, delta); };
      q = 2.0;
    } else if (ac.name == "green_ix") {
      factory = [d](double eps, const Learner*) {
        return std::make_unique<GreenIxLearner>(d, eps_prime_for(GraphMode::GreenIx, eps));
      };
      psi = [d, delta](const Learner&) { return psi_green_ix(d, delta); };
    } else if (ac.name == "green_ix_graph") {
      const std::size_t kappa = ac.kappa_guess ? ac.kappa_guess : g->true_kappa;
      FeedbackGraph graph = g->graph;
      factory = [graph, kappa](double eps, const Learner*) {
        return std::make_unique<GreenIxGraphLearner>(
            graph, eps_prime_for(GraphMode::GreenIxGraph, eps), kappa);
      };
      psi = [kappa, d, delta](const Learner&) { return psi_green_ix_graph(kappa, d, delta); };
    } else if (ac.name == "uniform_mix") {
      require(!ac.doubling, Errc::ConfigParse, "uniform_mix does not support doubling");
      LearnerSetup s;
      s.learner = std::make_unique<UniformMixLearner>(d, cfg.T);
      return s;
    } else {
      throw Error(Errc::ConfigParse, "unknown algorithm " + ac.name);
    }
  }

  LearnerSetup s;
  if (ac.doubling) {
    auto dl = std::make_unique<DoublingLearner>(factory, psi, q);
    s.doubling = dl.get();
    s.learner = std::move(dl);
  } else {
    s.learner = factory(ac.eps, nullptr);
    s.semibandit = dynamic_cast<SemiBanditLearner*>(s.learner.get());
  }
  return s;
}

std::vector<std::uint8_t> checkpoint_mask(std::size_t T) {
  std::vector<std::uint8_t> keep(T, T <= kFullTraceLimit ? 1 : 0);
  if (T > kFullTraceLimit)
    for (std::size_t k = 0; k < kCheckpoints; ++k) keep[(k + 1) * T / kCheckpoints - 1] = 1;
  return keep;
}

class CsvWriter {
 public:
  CsvWriter(const std::optional<fs::path>& path, const ExperimentConfig& cfg, std::size_t run_id,
            std::uint64_t seed)
      : keep_(checkpoint_mask(cfg.T)) {
    if (!path) return;
    out_.open(*path, std::ios::out | std::ios::trunc | std::ios::binary);
    require(static_cast<bool>(out_), Errc::IoFailure, "cannot write " + path->string());
    prefix_ = std::to_string(run_id) + "," + std::to_string(seed) + "," + cfg.algorithm.name +
              "," + cfg.instance.kind + ",";
    out_ << kCsvHeader << '\n';
  }

  void row(std::size_t phase, std::size_t t, std::uint64_t arm, double loss, double cum,
           double best, double frozen_mass, bool phase_end) {
    if (!out_.is_open() || !(keep_[t] || phase_end)) return;
    out_ << prefix_ << phase << ',' << t << ',' << arm << ',' << fmt(loss) << ',' << fmt(cum)
         << ',' << fmt(best) << ',' << fmt(frozen_mass) << '\n';
  }

  void close() {
    if (!out_.is_open()) return;
    out_.close();
    require(!out_.fail(), Errc::IoFailure, "failed writing trace");
  }

 private:
  std::ofstream out_;
  std::string prefix_;
  std::vector<std::uint8_t> keep_;
};

}  // namespace

ExperimentConfig parse_config(const json& j) {
  if (!j.is_object()) throw Error(Errc::ConfigParse, "config must be a JSON object");
  ExperimentConfig cfg;
  const json& a = j.contains("algorithm") ? j.at("algorithm") : throw Error(Errc::ConfigParse, "missing algorithm");
  const json& in = j.contains("instance") ? j.at("instance") : throw Error(Errc::ConfigParse, "missing instance");

  auto& ac = cfg.algorithm;
  ac.name = required<std::string>(a, "name", "algorithm");
  ac.eps = required<double>(a, "eps", "algorithm");
  ac.delta = required<double>(a, "delta", "algorithm");
  ac.alpha_guess = optional_field<std::size_t>(a, "alpha_guess", 1);
  ac.kappa_guess = optional_field<std::size_t>(a, "kappa_guess", 0);
  const auto engine = optional_field<std::string>(a, "engine", "hedge");
  if (engine == "hedge") ac.engine = Engine::Hedge;
  else if (engine == "noisy_hedge") ac.engine = Engine::NoisyHedge;
  else throw Error(Errc::ConfigParse, "unknown engine " + engine);
  if (a.contains("noise")) ac.noise = required<double>(a, "noise", "algorithm");
  ac.doubling = optional_field<bool>(a, "doubling", false);
  ac.alpha_doubling = optional_field<bool>(a, "alpha_doubling", false);
  ac.implicit_exploration = optional_field<bool>(a, "implicit_exploration", true);
  ac.threshold_scale = optional_field<double>(a, "threshold_scale", 1.0);

  auto& ic = cfg.instance;
  ic.kind = required<std::string>(in, "kind", "instance");
  ic.d = optional_field<std::size_t>(in, "d", 0);
  ic.num_cliques = optional_field<std::size_t>(in, "num_cliques", 0);
  ic.clique_size = optional_field<std::size_t>(in, "clique_size", 0);
  ic.layers = optional_field<std::size_t>(in, "layers", 0);
  ic.width = optional_field<std::size_t>(in, "width", 0);
  ic.num_switches = optional_field<std::size_t>(in, "num_switches", 0);
  ic.mu_star = required<double>(in, "mu_star", "instance");
  ic.mu_rest = required<double>(in, "mu_rest", "instance");
  const auto mode = optional_field<std::string>(in, "loss_mode", "bernoulli");
  if (mode == "bernoulli") ic.loss_mode = LossMode::Bernoulli;
  else if (mode == "uniform") ic.loss_mode = LossMode::Uniform;
  else throw Error(Errc::ConfigParse, "unknown loss_mode " + mode);
  ic.seed = optional_field<std::uint64_t>(in, "seed", 0);
  ic.adversary = optional_field<std::string>(in, "adversary", "oblivious");

  cfg.T = required<std::size_t>(j, "T", "config");
  cfg.seeds = required<std::vector<std::uint64_t>>(j, "seeds", "config");
  cfg.assertions = optional_field<bool>(j, "assertions", true);
  if (j.contains("apx_eps")) cfg.apx_eps = required<double>(j, "apx_eps", "config");

  require(ac.eps > 0.0 && ac.eps < 1.0, Errc::ConfigParse, "eps must lie in (0,1)");
  require(ac.delta > 0.0 && ac.delta < 1.0, Errc::ConfigParse, "delta must lie in (0,1)");
  require(cfg.T >= 1, Errc::ConfigParse, "T must be >= 1");
  require(!cfg.seeds.empty(), Errc::ConfigParse, "seeds must be non-empty");
  require(ac.alpha_guess >= 1, Errc::ConfigParse, "alpha_guess must be >= 1");
  if (ic.kind == "clique_union")
    require(ic.num_cliques >= 1 && ic.clique_size >= 1, Errc::ConfigParse,
            "clique_union needs num_cliques and clique_size");
  else if (ic.kind == "layered_paths")
    require(ic.layers >= 1 && ic.width >= 1, Errc::ConfigParse, "layered_paths needs layers and width");
  else if (ic.kind == "smallloss_bandit" || ic.kind == "shifting")
    require(ic.d >= 1, Errc::ConfigParse, ic.kind + " needs d");
  else
    throw Error(Errc::ConfigParse, "unknown instance kind " + ic.kind);
  return cfg;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), Errc::ConfigParse, "cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(Errc::ConfigParse, std::string("config parse: ") + e.what());
  }
  return parse_config(j);
}

json to_json(const ExperimentConfig& cfg) {
  const auto& ac = cfg.algorithm;
  const auto& ic = cfg.instance;
  json a = {{"name", ac.name},
            {"eps", ac.eps},
            {"delta", ac.delta},
            {"alpha_guess", ac.alpha_guess},
            {"kappa_guess", ac.kappa_guess},
            {"engine", ac.engine == Engine::Hedge ? "hedge" : "noisy_hedge"},
            {"doubling", ac.doubling},
            {"alpha_doubling", ac.alpha_doubling},
            {"implicit_exploration", ac.implicit_exploration},
            {"threshold_scale", ac.threshold_scale}};
  if (ac.noise) a["noise"] = *ac.noise;
  json in = {{"kind", ic.kind},
             {"d", ic.d},
             {"num_cliques", ic.num_cliques},
             {"clique_size", ic.clique_size},
             {"layers", ic.layers},
             {"width", ic.width},
             {"num_switches", ic.num_switches},
             {"mu_star", ic.mu_star},
             {"mu_rest", ic.mu_rest},
             {"loss_mode", ic.loss_mode == LossMode::Bernoulli ? "bernoulli" : "uniform"},
             {"seed", ic.seed},
             {"adversary", ic.adversary}};
  json j = {{"algorithm", a}, {"instance", in}, {"T", cfg.T}, {"seeds", cfg.seeds},
            {"assertions", cfg.assertions}};
  if (cfg.apx_eps) j["apx_eps"] = *cfg.apx_eps;
  return j;
}

void set_sweep_param(ExperimentConfig& cfg, const std::string& param, double value) {
  auto as_count = [&](double v) {
    require(v >= 1.0 && v == std::floor(v), Errc::ConfigParse, param + " needs a positive integer");
    return static_cast<std::size_t>(v);
  };
  if (param == "mu_star") {
    cfg.instance.mu_star = value;
  } else if (param == "T") {
    cfg.T = as_count(value);
  } else if (param == "K") {
    require(value >= 0.0 && value == std::floor(value), Errc::ConfigParse, "K must be a count");
    cfg.instance.num_switches = static_cast<std::size_t>(value);
  } else if (param == "num_cliques") {
    cfg.instance.num_cliques = as_count(value);
  } else if (param == "d") {
    const std::size_t d = as_count(value);
    if (cfg.instance.kind == "clique_union") {
      // Keep the clique count (alpha) fixed and grow the cliques.
      require(d % cfg.instance.num_cliques == 0, Errc::ConfigParse,
              "d must be a multiple of num_cliques");
      cfg.instance.clique_size = d / cfg.instance.num_cliques;
    } else {
      cfg.instance.d = d;
    }
  } else {
    throw Error(Errc::ConfigParse, "unknown sweep parameter " + param);
  }
}

RunResult run_seed(const ExperimentConfig& cfg, std::size_t run_id,
                   const std::optional<fs::path>& csv_path) {
  require(run_id < cfg.seeds.size(), Errc::InvalidArgument, "run id out of range");
  const std::uint64_t seed = cfg.seeds[run_id];
  RunResult res;
  res.run_id = run_id;
  res.seed = seed;

  std::optional<GraphInstance> gi;
  std::optional<SemiBanditEnvironment> sb;
  if (is_semibandit(cfg)) {
    const auto& ic = cfg.instance;
    sb = make_layered_paths(ic.layers, ic.width, cfg.T, ic.mu_star, ic.mu_rest,
                            env_seed(cfg, seed), ic.loss_mode);
  } else {
    gi = build_graph_instance(cfg, seed);
    res.true_alpha = gi->true_alpha;
  }
  LearnerSetup setup = build_learner(cfg, gi ? &*gi : nullptr, sb ? &*sb : nullptr);
  Learner& learner = *setup.learner;

  CounterRng draws = CounterRng::stream(seed, 0, Stream::LearnerDraws);
  CounterRng perturb = CounterRng::stream(seed, 0, Stream::Perturbations);
  const double apx_eps = cfg.apx_eps.value_or(cfg.algorithm.eps);

  std::optional<RegretTracker> tracker;
  std::optional<StrategyRegretTracker> stracker;
  if (gi) tracker.emplace(gi->graph.n_arms());
  else stracker.emplace(sb->instance);

  const bool keep_losses = gi && cfg.instance.kind == "shifting";
  std::vector<LossVector> schedule;
  std::vector<ArmId> history;
  std::vector<double> round_losses;
  round_losses.reserve(cfg.T);
  double pseudo = 0.0;
  std::optional<std::vector<double>> means = gi ? gi->losses->means() : std::nullopt;
  const double best_mean = means ? *std::min_element(means->begin(), means->end()) : 0.0;

  CsvWriter csv(csv_path, cfg, run_id, seed);
  for (std::size_t t = 0; t < cfg.T; ++t) {
    const std::size_t phase = setup.doubling ? setup.doubling->phase().tau : 0;
    const std::size_t phases_before = setup.doubling ? setup.doubling->boundaries().size() : 0;
    RoundRecord rec;
    double best = 0.0;
    if (gi) {
      LossVector l = gi->losses->at(t, history);
      GraphLossOracle oracle(gi->graph, l);
      StepContext ctx{t, &gi->graph, &oracle, nullptr, &draws, &perturb};
      rec = learner.step(ctx);
      if (rec.played >= l.size() || rec.true_loss != l[rec.played]) ++res.harness_violations;
      tracker->add(l, rec.true_loss);
      best = tracker->best_fixed_loss();
      if (means) pseudo += (*means)[rec.played] - best_mean;
      if (keep_losses) schedule.push_back(std::move(l));
    } else {
      LossVector l = sb->element_losses->at(t, {});
      ElementLossOracle oracle(sb->instance, l);
      StepContext ctx{t, nullptr, nullptr, &oracle, &draws, &perturb};
      rec = learner.step(ctx);
      double expect = 0.0;
      for (ElementId e : sb->instance.strategy_elements(rec.played)) expect += l[e];
      if (std::abs(expect - rec.true_loss) > 1e-12) ++res.harness_violations;
      stracker->add(l, rec.true_loss);
      best = stracker->best_fixed_loss();
    }
    if (!(rec.frozen_mass >= 0.0 && rec.frozen_mass <= 1.0)) ++res.harness_violations;
    history.push_back(rec.played);
    round_losses.push_back(rec.true_loss);
    const bool phase_end =
        setup.doubling && setup.doubling->boundaries().size() != phases_before;
    const double cum = gi ? tracker->learner_loss() : stracker->learner_loss();
    csv.row(phase, t, rec.played, rec.true_loss, cum, best, rec.frozen_mass, phase_end);
  }
  csv.close();

  res.regret = gi ? tracker->summary(apx_eps) : stracker->summary(apx_eps);
  if (means) res.pseudo_regret = pseudo;
  if (keep_losses) {
    const std::size_t K = std::min(cfg.instance.num_switches, cfg.T - 1);
    res.shifting_loss = best_shifting_sequence(schedule, K).loss;
    res.shifting_apx = (1.0 - apx_eps) * res.regret.learner_loss - *res.shifting_loss;
  }
  res.tally = learner.tally();
  if (setup.doubling) {
    res.boundaries = setup.doubling->boundaries();
    res.phases = res.boundaries.size() + 1;
    const double q = cfg.algorithm.name == "blackbox" ? 2.0 : 1.0;
    res.harness_violations += check_phase_boundaries(res.boundaries, round_losses, q);
    if (!phase_count_within_bound(res.phases, res.regret.learner_loss)) ++res.harness_violations;
  }
  if (cfg.algorithm.alpha_doubling && res.true_alpha > 0) {
    const auto limit = static_cast<std::uint64_t>(
        std::ceil(std::log2(static_cast<double>(res.true_alpha)) - 1e-12));
    if (res.tally.alpha_doublings > limit) ++res.harness_violations;
  }
  return res;
}

ExperimentSummary run_experiment(const ExperimentConfig& cfg, std::size_t parallel,
                                 const std::optional<fs::path>& out_dir) {
  if (out_dir) {
    std::error_code ec;
    fs::create_directories(*out_dir, ec);
    require(!ec, Errc::IoFailure, "cannot create output directory " + out_dir->string());
  }
  const std::size_t n = cfg.seeds.size();
  std::vector<std::optional<RunResult>> results(n);
  std::atomic<std::size_t> next{0};
  std::mutex err_mu;
  std::exception_ptr first_error;

  auto worker = [&] {
    while (true) {
      const std::size_t k = next.fetch_add(1);
      if (k >= n) return;
      try {
        std::optional<fs::path> csv;
        if (out_dir) csv = *out_dir / ("run_" + std::to_string(k) + "_seed_" +
                                       std::to_string(cfg.seeds[k]) + ".csv");
        results[k] = run_seed(cfg, k, csv);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  parallel = std::clamp<std::size_t>(parallel, 1, n);
  if (parallel == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < parallel; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  ExperimentSummary s;
  s.algo = cfg.algorithm.name;
  s.instance = cfg.instance.kind;
  s.T = cfg.T;
  s.seeds = cfg.seeds;
  double pseudo = 0.0, shifting = 0.0;
  bool have_pseudo = true, have_shifting = true;
  for (auto& r : results) {
    s.runs.push_back(std::move(*r));
    const RunResult& run = s.runs.back();
    s.mean_regret += run.regret.regret;
    s.mean_lstar += run.regret.lstar;
    s.mean_learner_loss += run.regret.learner_loss;
    s.mean_apx_regret += run.regret.apx_regret;
    s.violations += run.violations();
    have_pseudo = have_pseudo && run.pseudo_regret.has_value();
    have_shifting = have_shifting && run.shifting_apx.has_value();
    if (run.pseudo_regret) pseudo += *run.pseudo_regret;
    if (run.shifting_apx) shifting += *run.shifting_apx;
  }
  const double dn = static_cast<double>(n);
  s.mean_regret /= dn;
  s.mean_lstar /= dn;
  s.mean_learner_loss /= dn;
  s.mean_apx_regret /= dn;
  if (have_pseudo) s.mean_pseudo_regret = pseudo / dn;
  if (have_shifting) s.mean_shifting_apx = shifting / dn;
  double var = 0.0;
  for (const auto& run : s.runs) var += std::pow(run.regret.regret - s.mean_regret, 2);
  s.std_regret = n > 1 ? std::sqrt(var / (dn - 1.0)) : 0.0;
  return s;
}

json summary_json(const ExperimentSummary& s) {
  json phases = json::array();
  json per_seed = json::array();
  for (const auto& r : s.runs) {
    json b = json::array();
    for (const auto& p : r.boundaries)
      b.push_back({{"tau", p.tau},
                   {"eps", p.eps},
                   {"start_t", p.start_t},
                   {"end_t", p.end_t},
                   {"phase_loss", p.phase_loss},
                   {"psi", p.psi}});
    phases.push_back(b);
    json row = {{"seed", r.seed},
                {"regret", r.regret.regret},
                {"lstar", r.regret.lstar},
                {"learner_loss", r.regret.learner_loss},
                {"apx_regret", r.regret.apx_regret},
                {"phases", r.phases},
                {"alpha_doublings", r.tally.alpha_doublings},
                {"violations", r.violations()}};
    if (r.pseudo_regret) row["pseudo_regret"] = *r.pseudo_regret;
    if (r.shifting_apx) row["shifting_apx_regret"] = *r.shifting_apx;
    per_seed.push_back(row);
  }
  json j = {{"algo", s.algo},
            {"instance", s.instance},
            {"T", s.T},
            {"seeds", s.seeds},
            {"mean_regret", s.mean_regret},
            {"std_regret", s.std_regret},
            {"mean_lstar", s.mean_lstar},
            {"mean_learner_loss", s.mean_learner_loss},
            {"mean_apx_regret", s.mean_apx_regret},
            {"phases", phases},
            {"violations", s.violations},
            {"runs", per_seed}};
  if (s.mean_pseudo_regret) j["mean_pseudo_regret"] = *s.mean_pseudo_regret;
  if (s.mean_shifting_apx) j["mean_shifting_apx_regret"] = *s.mean_shifting_apx;
  return j;
}

SweepReport run_sweep(const ExperimentConfig& base, const std::string& param,
                      const std::vector<double>& values, std::size_t parallel,
                      const std::optional<fs::path>& out_dir) {
  require(!values.empty(), Errc::ConfigParse, "sweep needs at least one value");
  SweepReport rep;
  rep.param = param;
  for (double v : values) {
    ExperimentConfig cfg = base;
    set_sweep_param(cfg, param, v);
    std::optional<fs::path> dir;
    if (out_dir) dir = *out_dir / (param + "_" + fmt(v));
    rep.rows.push_back({v, run_experiment(cfg, parallel, dir)});
  }
  // Regret against measured L* for loss-driven sweeps, against the swept
  // value otherwise.
  const bool by_lstar = param == "mu_star" || param == "T";
  std::vector<std::pair<double, double>> pts;
  for (const auto& row : rep.rows) {
    const double x = by_lstar ? row.summary.mean_lstar : row.value;
    if (x > 0.0 && row.summary.mean_regret > 0.0) pts.emplace_back(x, row.summary.mean_regret);
  }
  if (pts.size() >= 3) {
    try {
      rep.fit = fit_scaling_exponent(pts);
    } catch (const Error&) {
      rep.fit.reset();
    }
  }
  return rep;
}

json sweep_json(const SweepReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    json j = summary_json(row.summary);
    j.erase("runs");
    j.erase("phases");
    j["value"] = row.value;
    rows.push_back(j);
  }
  json out = {{"param", r.param}, {"rows", rows}};
  if (r.fit) {
    out["fitted_exponent"] = r.fit->exponent;
    out["intercept"] = r.fit->intercept;
    out["r_squared"] = r.fit->r_squared;
    out["fit_reliable"] = r.fit->reliable;
    out["warnings"] = r.fit->warnings;
  } else {
    out["fitted_exponent"] = nullptr;
  }
  return out;
}

}  // namespace smallloss
