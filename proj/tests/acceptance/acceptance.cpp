// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "smallloss/experiment.hpp"
#include "smallloss/freezing.hpp"
#include "smallloss/graph_tools.hpp"
#include "smallloss/invariant_suites.hpp"

using namespace smallloss;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int id, bool pass, const std::string& detail) {
  std::printf("criterion %2d: %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<std::uint64_t> seeds(std::size_t n) {
  std::vector<std::uint64_t> s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = i + 1;
  return s;
}

ExperimentConfig config(const std::string& text) {
  return parse_config(nlohmann::json::parse(text));
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Every run from every experiment, kept for the certificate and doubling checks.
struct Collected {
  RunResult run;
  bool doubled = false;
  bool alpha_doubling = false;
  double q = 1.0;
};
std::vector<Collected> all_runs;

void collect(const ExperimentConfig& cfg, const ExperimentSummary& s) {
  for (const auto& r : s.runs)
    all_runs.push_back({r, cfg.algorithm.doubling, cfg.algorithm.alpha_doubling,
                        cfg.algorithm.name == "blackbox" ? 2.0 : 1.0});
}

void collect(const ExperimentConfig& cfg, const SweepReport& rep) {
  for (const auto& row : rep.rows) collect(cfg, row.summary);
}

std::uint64_t sweep_violations(const SweepReport& rep) {
  std::uint64_t v = 0;
  for (const auto& row : rep.rows) v += row.summary.violations;
  return v;
}

std::string rows_text(const SweepReport& rep) {
  std::string out;
  for (const auto& row : rep.rows)
    out += fmt("[%g: L*=%.0f R=%.0f] ", row.value, row.summary.mean_lstar, row.summary.mean_regret);
  return out;
}

// ---------------------------------------------------------------------------

void criterion1() {
  const auto start = std::chrono::steady_clock::now();
  const auto r = check_invariants("freezing", 10000, 20240601);
  const double secs = seconds_since(start);
  report(1, r.violations == 0 && secs < 60.0,
         fmt("10000 instances, %llu violations, %.1fs, %s", (unsigned long long)r.violations, secs,
             r.details.dump().c_str()));
}

// Monte Carlo estimator means at random frozen states.
void criterion3() {
  const auto start = std::chrono::steady_clock::now();
  const std::size_t states = 100, redraws = 100000;
  std::size_t unfrozen_checks = 0, unfrozen_bad = 0, upper_bad = 0, built = 0;
  double worst_z = 0.0;
  CounterRng rng(777);
  while (built < states) {
    const std::size_t n = 2 + rng.below(14);
    const FeedbackGraph g = random_graph(n, rng.uniform() * 0.6, rng);
    const Distribution p = random_distribution(n, rng);
    const double eps_prime = 0.1 + 0.4 * rng.uniform();
    const double gamma = eps_prime / (4.0 * static_cast<double>(exact_independence_number(g)));
    FreezeResult fr;
    try {
      fr = dual_threshold_freeze(g, p, gamma);
    } catch (const Error&) {
      continue;
    }
    ++built;
    std::vector<double> lv(n);
    for (double& x : lv) x = rng.uniform();
    const LossVector l(lv);
    const double zeta = (built % 2 == 0) ? eps_prime / (6.0 * static_cast<double>(n)) : 0.0;
    std::vector<double> sum(n, 0.0), sq(n, 0.0);
    CounterRng draws = CounterRng::stream(777, built, Stream::Trials);
    for (std::size_t k = 0; k < redraws; ++k) {
      const ArmId played = sample_index(fr.play_dist.probs(), draws.uniform());
      GraphLossOracle o(g, l);
      o.commit(played);
      const auto est = graph_estimate(g, fr, o, zeta);
      for (ArmId i = 0; i < n; ++i) {
        sum[i] += est[i];
        sq[i] += est[i] * est[i];
      }
    }
    for (ArmId i = 0; i < n; ++i) {
      const double mean = sum[i] / redraws;
      const double var = std::max(0.0, sq[i] / redraws - mean * mean);
      const double se = std::sqrt(var / redraws);
      // 1e-9 absorbs summation rounding when every draw gives the same estimate.
      if (mean > lv[i] + 3.0 * se + 1e-9) ++upper_bad;
      if (!fr.is_frozen(i) && zeta == 0.0) {
        ++unfrozen_checks;
        const double dev = std::abs(mean - lv[i]);
        if (se > 0.0) worst_z = std::max(worst_z, dev / se);
        if (dev > 3.0 * se + 1e-9) ++unfrozen_bad;
      }
    }
  }
  const double secs = seconds_since(start);
  report(3, unfrozen_bad == 0 && upper_bad == 0 && secs < 120.0,
         fmt("%zu states x %zu redraws: unbiased %zu/%zu outside 3SE (max z %.2f), "
             "upper-bound breaches %zu, %.1fs",
             states, redraws, unfrozen_bad, unfrozen_checks, worst_z, upper_bad, secs));
}

void criterion4() {
  const auto start = std::chrono::steady_clock::now();
  const auto r = check_invariants("concentration", 10000, 4242);
  const double secs = seconds_since(start);
  double worst = 0.0;
  for (const auto& cell : r.details)
    worst = std::max({worst, cell["upper_rate"].get<double>() - cell["limit"].get<double>(),
                      cell["lower_rate"].get<double>() - cell["limit"].get<double>()});
  report(4, r.violations == 0 && secs < 120.0,
         fmt("8 cells x 10000 trials, %llu violations, worst rate-limit %.4f, %.1fs",
             (unsigned long long)r.violations, worst, secs));
}

void criteria5and6() {
  auto cfg = config(R"({"algorithm":{"name":"green_ix","eps":0.5,"delta":0.05,"doubling":true},
      "instance":{"kind":"smallloss_bandit","d":10,"mu_star":0.01,"mu_rest":0.5,"seed":3},
      "T":131072,"seeds":[1]})");
  cfg.seeds = seeds(20);
  const std::vector<double> mus{100.0 / 131072, 400.0 / 131072, 1600.0 / 131072, 6400.0 / 131072};
  const auto rep = run_sweep(cfg, "mu_star", mus);
  collect(cfg, rep);

  auto base = cfg;
  base.algorithm.name = "uniform_mix";
  base.algorithm.doubling = false;
  base.instance.mu_star = mus.back();
  const auto baseline = run_experiment(base);
  collect(base, baseline);

  const double top = rep.rows.back().summary.mean_regret;
  const bool fit_ok = rep.fit && rep.fit->exponent >= 0.35 && rep.fit->exponent <= 0.65 &&
                      rep.fit->r_squared >= 0.9;
  const bool base_ok = top <= baseline.mean_regret / 3.0;
  const std::uint64_t v = sweep_violations(rep);
  report(5, fit_ok && base_ok && v == 0,
         fmt("exponent %.3f r2 %.3f; regret at largest L* %.0f vs baseline %.0f (need <= %.0f); "
             "violations %llu; %s",
             rep.fit ? rep.fit->exponent : NAN, rep.fit ? rep.fit->r_squared : NAN, top,
             baseline.mean_regret, baseline.mean_regret / 3.0, (unsigned long long)v,
             rows_text(rep).c_str()));

  std::uint64_t gap = 0, hedge = 0, runs = 0;
  for (const auto& row : rep.rows)
    for (const auto& r : row.summary.runs) {
      gap += r.tally.gap_violations;
      hedge += r.tally.hedge_bound_violations;
      ++runs;
    }
  report(6, gap == 0 && runs == 80,
         fmt("%llu GREEN-IX runs, gap violations %llu, hedge bound violations %llu",
             (unsigned long long)runs, (unsigned long long)gap, (unsigned long long)hedge));
}

void criterion7() {
  auto cfg = config(R"({"algorithm":{"name":"blackbox","eps":0.5,"delta":0.05,"doubling":true},
      "instance":{"kind":"clique_union","num_cliques":5,"clique_size":4,"mu_star":0.0153,
                  "mu_rest":0.5,"seed":3},
      "T":32768,"seeds":[1]})");
  cfg.seeds = seeds(20);
  const auto dsweep = run_sweep(cfg, "d", {20, 50, 100, 200});
  collect(cfg, dsweep);
  double lo = INFINITY, hi = 0.0;
  for (const auto& row : dsweep.rows) {
    lo = std::min(lo, row.summary.mean_regret);
    hi = std::max(hi, row.summary.mean_regret);
  }

  auto lcfg = cfg;
  lcfg.T = 131072;
  const auto lsweep = run_sweep(lcfg, "mu_star", {0.004, 0.016, 0.064, 0.25});
  collect(lcfg, lsweep);
  const bool exp_ok = lsweep.fit && lsweep.fit->exponent >= 0.5 && lsweep.fit->exponent <= 0.8;
  const std::uint64_t v = sweep_violations(dsweep) + sweep_violations(lsweep);
  report(7, hi < 2.0 * lo && exp_ok && v == 0,
         fmt("d sweep max/min regret %.2f %s; L* sweep exponent %.3f %s; violations %llu",
             hi / lo, rows_text(dsweep).c_str(), lsweep.fit ? lsweep.fit->exponent : NAN,
             rows_text(lsweep).c_str(), (unsigned long long)v));
}

void criterion8() {
  auto cfg = config(R"({"algorithm":{"name":"green_ix_graph","eps":0.5,"delta":0.05,"doubling":true},
      "instance":{"kind":"clique_union","num_cliques":5,"clique_size":4,"mu_star":0.01,
                  "mu_rest":0.5,"seed":3},
      "T":131072,"seeds":[1]})");
  cfg.seeds = seeds(20);
  const auto rep = run_sweep(
      cfg, "mu_star", {100.0 / 131072, 400.0 / 131072, 1600.0 / 131072, 6400.0 / 131072});
  collect(cfg, rep);
  const bool ok = rep.fit && rep.fit->exponent >= 0.35 && rep.fit->exponent <= 0.65;
  const std::uint64_t v = sweep_violations(rep);
  report(8, ok && v == 0,
         fmt("exponent %.3f r2 %.3f; violations %llu; %s", rep.fit ? rep.fit->exponent : NAN,
             rep.fit ? rep.fit->r_squared : NAN, (unsigned long long)v, rows_text(rep).c_str()));
}

void criterion9() {
  auto cfg = config(R"({"algorithm":{"name":"semibandit","eps":0.5,"delta":0.1,"doubling":true},
      "instance":{"kind":"layered_paths","layers":3,"width":3,"mu_star":0.01,"mu_rest":0.9,"seed":3},
      "T":1024,"seeds":[1]})");
  cfg.seeds = seeds(20);
  const auto rep = run_sweep(cfg, "mu_star", {0.03, 0.08, 0.2, 0.5});
  collect(cfg, rep);
  std::uint64_t cap = 0, samples = 0;
  for (const auto& row : rep.rows)
    for (const auto& r : row.summary.runs) {
      cap += r.tally.cap_violations;
      samples += r.tally.sample_count_violations;
    }
  const bool ok = rep.fit && rep.fit->exponent >= 0.35 && rep.fit->exponent <= 0.7;
  const std::uint64_t v = sweep_violations(rep);
  report(9, ok && cap == 0 && samples == 0 && v == 0,
         fmt("exponent %.3f; cap violations %llu; sample count violations %llu; violations %llu; %s",
             rep.fit ? rep.fit->exponent : NAN, (unsigned long long)cap,
             (unsigned long long)samples, (unsigned long long)v, rows_text(rep).c_str()));
}

void criterion10() {
  auto cfg = config(R"({"algorithm":{"name":"blackbox","eps":0.25,"delta":0.05,
                                    "engine":"noisy_hedge","alpha_guess":10},
      "instance":{"kind":"shifting","d":10,"num_switches":1,"mu_star":0.02,"mu_rest":0.5,"seed":11},
      "T":32768,"seeds":[1]})");
  cfg.seeds = seeds(10);
  const auto rep = run_sweep(cfg, "K", {1, 4, 16});
  collect(cfg, rep);
  bool ratios_ok = true;
  std::string text;
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    const auto& s = rep.rows[i].summary;
    const double apx = s.mean_shifting_apx.value_or(NAN);
    text += fmt("[K=%g apx %.0f] ", rep.rows[i].value, apx);
    if (i > 0) {
      const double prev = rep.rows[i - 1].summary.mean_shifting_apx.value_or(NAN);
      // Ratio is only meaningful against a positive predecessor.
      const double ratio = prev > 0.0 ? apx / prev : (apx <= 0.0 ? 0.0 : INFINITY);
      text += fmt("ratio %.2f ", ratio);
      if (!(ratio <= 5.0)) ratios_ok = false;
    }
  }
  const auto dp = check_invariants("shifting-dp", 2000, 99);
  const std::uint64_t v = sweep_violations(rep);
  report(10, ratios_ok && dp.violations == 0 && v == 0,
         fmt("%s; DP vs brute force (T<=8, 2000 instances) violations %llu; run violations %llu",
             text.c_str(), (unsigned long long)dp.violations, (unsigned long long)v));
}

// Alpha-guess doubling runs feed criterion 11.
void alpha_doubling_runs() {
  for (const char* inst : {R"({"kind":"clique_union","num_cliques":5,"clique_size":4})",
                           R"({"kind":"clique_union","num_cliques":16,"clique_size":1})",
                           R"({"kind":"clique_union","num_cliques":1,"clique_size":8})"}) {
    auto j = nlohmann::json::parse(R"({"algorithm":{"name":"blackbox","eps":0.5,"delta":0.05,
        "doubling":true,"alpha_doubling":true},"T":16384,"seeds":[1]})");
    j["instance"] = nlohmann::json::parse(inst);
    j["instance"]["mu_star"] = 0.02;
    j["instance"]["mu_rest"] = 0.5;
    auto cfg = parse_config(j);
    cfg.seeds = seeds(10);
    collect(cfg, run_experiment(cfg));
  }
}

void criterion11() {
  std::size_t doubled = 0, transitions = 0, count_bad = 0, boundary_bad = 0;
  std::size_t alpha_runs = 0, alpha_bad = 0, alpha_total = 0;
  for (const auto& c : all_runs) {
    if (c.doubled) {
      ++doubled;
      const auto& r = c.run;
      if (static_cast<double>(r.phases) > std::log2(r.regret.learner_loss + 1.0) + 1.0 + 1e-9)
        ++count_bad;
      std::size_t expect_start = 0;
      for (std::size_t k = 0; k < r.boundaries.size(); ++k) {
        const auto& b = r.boundaries[k];
        ++transitions;
        const double e = b.eps;
        const bool ends = e * b.phase_loss > b.psi / std::pow(e, c.q);
        const bool not_before = !(e * b.loss_before_end > b.psi_before_end / std::pow(e, c.q));
        const bool eps_ok = std::abs(e - std::ldexp(1.0, -static_cast<int>(b.tau))) < 1e-15;
        if (!ends || !not_before || !eps_ok || b.start_t != expect_start || b.end_t < b.start_t)
          ++boundary_bad;
        expect_start = b.end_t + 1;
      }
      if (r.phases != r.boundaries.size() + 1) ++count_bad;
    }
    if (c.alpha_doubling && c.run.true_alpha > 0) {
      ++alpha_runs;
      alpha_total += c.run.tally.alpha_doublings;
      const auto limit = static_cast<std::uint64_t>(
          std::ceil(std::log2(static_cast<double>(c.run.true_alpha)) - 1e-12));
      if (c.run.tally.alpha_doublings > limit) ++alpha_bad;
    }
  }
  report(11, doubled > 0 && transitions > 0 && alpha_runs > 0 && count_bad == 0 &&
                 boundary_bad == 0 && alpha_bad == 0,
         fmt("%zu doubled runs, %zu phase transitions: count violations %zu, boundary "
             "violations %zu; %zu alpha-doubling runs (%zu doublings), over-limit %zu",
             doubled, transitions, count_bad, boundary_bad, alpha_runs, alpha_total, alpha_bad));
}

void criterion2() {
  std::uint64_t freezes = 0, cert = 0;
  for (const auto& c : all_runs) {
    freezes += c.run.tally.freeze_calls;
    cert += c.run.tally.certificate_violations;
  }
  report(2, freezes > 0 && cert == 0,
         fmt("%zu runs, %llu freeze calls, certificate violations %llu", all_runs.size(),
             (unsigned long long)freezes, (unsigned long long)cert));
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void criterion12() {
  const char* configs[] = {
      R"({"algorithm":{"name":"green_ix","eps":0.5,"delta":0.05,"doubling":true},
          "instance":{"kind":"smallloss_bandit","d":10,"mu_star":0.02,"mu_rest":0.5,"seed":5},
          "T":4000,"seeds":[1,2,3]})",
      R"({"algorithm":{"name":"blackbox","eps":0.5,"delta":0.05,"doubling":true,"alpha_doubling":true},
          "instance":{"kind":"clique_union","num_cliques":4,"clique_size":3,"mu_star":0.02,"mu_rest":0.5},
          "T":4000,"seeds":[4,5]})",
      R"({"algorithm":{"name":"green_ix_graph","eps":0.5,"delta":0.05,"doubling":true},
          "instance":{"kind":"clique_union","num_cliques":4,"clique_size":3,"mu_star":0.02,"mu_rest":0.5},
          "T":4000,"seeds":[6]})",
      R"({"algorithm":{"name":"blackbox","eps":0.25,"delta":0.05,"engine":"noisy_hedge","alpha_guess":10},
          "instance":{"kind":"shifting","d":10,"num_switches":4,"mu_star":0.02,"mu_rest":0.5},
          "T":4000,"seeds":[7]})",
      R"({"algorithm":{"name":"semibandit","eps":0.5,"delta":0.1,"doubling":true},
          "instance":{"kind":"layered_paths","layers":3,"width":3,"mu_star":0.05,"mu_rest":0.9},
          "T":300,"seeds":[8]})",
      R"({"algorithm":{"name":"uniform_mix","eps":0.5,"delta":0.05},
          "instance":{"kind":"smallloss_bandit","d":6,"mu_star":0.02,"mu_rest":0.5,"adversary":"punish_last"},
          "T":4000,"seeds":[9]})",
  };
  const fs::path root = fs::temp_directory_path() / "smallloss_acceptance_repro";
  std::size_t files = 0, mismatched = 0, k = 0;
  for (const char* text : configs) {
    const auto cfg = config(text);
    const fs::path a = root / std::to_string(k) / "a", b = root / std::to_string(k) / "b";
    ++k;
    fs::remove_all(a);
    fs::remove_all(b);
    run_experiment(cfg, 1, a);
    run_experiment(cfg, 2, b);
    for (const auto& e : fs::directory_iterator(a)) {
      if (e.path().extension() != ".csv") continue;
      ++files;
      const auto x = slurp(e.path());
      if (x.empty() || x != slurp(b / e.path().filename())) ++mismatched;
    }
  }
  fs::remove_all(root);
  report(12, files > 0 && mismatched == 0,
         fmt("%zu CSV files compared across reruns, %zu differ", files, mismatched));
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  try {
    criterion1();
    criterion3();
    criterion4();
    criteria5and6();
    criterion7();
    criterion8();
    criterion9();
    criterion10();
    alpha_doubling_runs();
    criterion11();
    criterion2();
    criterion12();
  } catch (const std::exception& e) {
    std::printf("acceptance aborted: %s\n", e.what());
    return 2;
  }
  std::printf("%d criteria failed, %.0fs total\n", failures, seconds_since(start));
  return failures == 0 ? 0 : 1;
}
