#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "smallloss/experiment.hpp"
#include "smallloss/invariant_suites.hpp"

using namespace smallloss;
namespace fs = std::filesystem;

namespace {

nlohmann::json base_json() {
  return nlohmann::json::parse(R"({
    "algorithm": {"name": "green_ix", "eps": 0.5, "delta": 0.05, "doubling": true},
    "instance": {"kind": "smallloss_bandit", "d": 5, "mu_star": 0.02, "mu_rest": 0.5, "seed": 7},
    "T": 3000,
    "seeds": [1, 2, 3, 4]
  })");
}

fs::path fresh_dir(const std::string& name) {
  auto p = fs::temp_directory_path() / ("smallloss_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cli(const std::string& args) {
  const std::string cmd = std::string(SMALLLOSS_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path write_config(const fs::path& dir, const nlohmann::json& j) {
  auto p = dir / "config.json";
  std::ofstream(p) << j.dump();
  return p;
}

}  // namespace

TEST(Config, RoundTrip) {
  auto cfg = parse_config(base_json());
  EXPECT_EQ(cfg.algorithm.name, "green_ix");
  EXPECT_EQ(cfg.T, 3000u);
  EXPECT_EQ(cfg.seeds.size(), 4u);
  auto again = parse_config(to_json(cfg));
  EXPECT_EQ(to_json(again), to_json(cfg));
}

TEST(Config, MissingFieldsRejected) {
  for (const char* path : {"/algorithm/eps", "/instance/mu_star", "/T", "/seeds"}) {
    auto j = base_json();
    const nlohmann::json::json_pointer ptr(path);
    j[ptr.parent_pointer()].erase(ptr.back());
    try {
      parse_config(j);
      ADD_FAILURE() << path;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::ConfigParse) << path;
    }
  }
}

TEST(Config, SweepParam) {
  auto j = base_json();
  j["instance"] = {{"kind", "clique_union"}, {"num_cliques", 5}, {"clique_size", 4},
                   {"mu_star", 0.01}, {"mu_rest", 0.5}};
  auto cfg = parse_config(j);
  set_sweep_param(cfg, "d", 50);
  EXPECT_EQ(cfg.instance.clique_size, 10u);
  set_sweep_param(cfg, "mu_star", 0.03);
  EXPECT_DOUBLE_EQ(cfg.instance.mu_star, 0.03);
}

TEST(Experiment, ByteIdenticalReruns) {
  auto cfg = parse_config(base_json());
  auto a = fresh_dir("rerun_a"), b = fresh_dir("rerun_b");
  run_experiment(cfg, 1, a);
  run_experiment(cfg, 1, b);
  for (std::size_t k = 0; k < cfg.seeds.size(); ++k) {
    const auto name = "run_" + std::to_string(k) + "_seed_" + std::to_string(cfg.seeds[k]) + ".csv";
    const auto text = slurp(a / name);
    ASSERT_FALSE(text.empty());
    EXPECT_EQ(text.substr(0, text.find('\n')), kCsvHeader);
    EXPECT_EQ(text, slurp(b / name));
  }
}

TEST(Experiment, ParallelMatchesSerial) {
  auto j = base_json();
  j["seeds"] = nlohmann::json::array();
  for (int s = 1; s <= 20; ++s) j["seeds"].push_back(s);
  j["T"] = 500;
  auto cfg = parse_config(j);
  auto a = fresh_dir("par1"), b = fresh_dir("par4");
  auto s1 = run_experiment(cfg, 1, a);
  auto s4 = run_experiment(cfg, 4, b);
  EXPECT_EQ(summary_json(s1).dump(), summary_json(s4).dump());
  for (const auto& e : fs::directory_iterator(a)) EXPECT_EQ(slurp(e.path()), slurp(b / e.path().filename()));
}

TEST(Experiment, AllAlgorithmsRunClean) {
  const char* configs[] = {
      R"({"algorithm":{"name":"blackbox","eps":0.5,"delta":0.05,"doubling":true,"alpha_doubling":true},
          "instance":{"kind":"clique_union","num_cliques":3,"clique_size":3,"mu_star":0.02,"mu_rest":0.5},
          "T":2000,"seeds":[1,2]})",
      R"({"algorithm":{"name":"green_ix_graph","eps":0.5,"delta":0.05,"doubling":true},
          "instance":{"kind":"clique_union","num_cliques":3,"clique_size":3,"mu_star":0.02,"mu_rest":0.5},
          "T":2000,"seeds":[1,2]})",
      R"({"algorithm":{"name":"blackbox","eps":0.25,"delta":0.05,"engine":"noisy_hedge","alpha_guess":10},
          "instance":{"kind":"shifting","d":10,"num_switches":4,"mu_star":0.02,"mu_rest":0.5},
          "T":2000,"seeds":[1]})",
      R"({"algorithm":{"name":"semibandit","eps":0.9,"delta":0.1,"doubling":false},
          "instance":{"kind":"layered_paths","layers":2,"width":2,"mu_star":0.05,"mu_rest":0.5},
          "T":200,"seeds":[1]})",
      R"({"algorithm":{"name":"uniform_mix","eps":0.5,"delta":0.05},
          "instance":{"kind":"smallloss_bandit","d":4,"mu_star":0.02,"mu_rest":0.5},
          "T":2000,"seeds":[1]})",
  };
  for (const char* text : configs) {
    auto cfg = parse_config(nlohmann::json::parse(text));
    auto s = run_experiment(cfg);
    EXPECT_EQ(s.violations, 0u) << text;
    EXPECT_EQ(s.runs.size(), cfg.seeds.size());
    if (cfg.instance.kind == "shifting") EXPECT_TRUE(s.mean_shifting_apx.has_value());
  }
}

TEST(Experiment, SingleArmHasZeroRegret) {
  auto j = base_json();
  j["instance"]["d"] = 1;
  j["algorithm"]["doubling"] = false;
  auto s = run_experiment(parse_config(j));
  EXPECT_DOUBLE_EQ(s.mean_regret, 0.0);
}

TEST(Experiment, CorruptedThresholdReportsViolations) {
  auto j = base_json();
  j["algorithm"] = {{"name", "blackbox"}, {"eps", 0.5}, {"delta", 0.05}, {"threshold_scale", 0.01}};
  auto s = run_experiment(parse_config(j));
  EXPECT_GT(s.violations, 0u);
}

TEST(Sweep, ShapeAndErrors) {
  auto j = base_json();
  j["T"] = 1000;
  j["seeds"] = {1, 2};
  auto cfg = parse_config(j);
  auto rep = run_sweep(cfg, "mu_star", {0.01, 0.02, 0.04, 0.08, 0.16});
  EXPECT_EQ(rep.rows.size(), 5u);
  ASSERT_TRUE(rep.fit.has_value());
  auto out = sweep_json(rep);
  EXPECT_TRUE(out.contains("fitted_exponent"));
  EXPECT_THROW(run_sweep(cfg, "mu_star", {}), Error);
  EXPECT_THROW(run_sweep(cfg, "bogus", {1, 2, 3}), Error);
}

TEST(Suites, AllSuitesClean) {
  for (const auto& name : suite_names()) {
    auto r = check_invariants(name, 200, 3);
    EXPECT_EQ(r.violations, 0u) << name;
    EXPECT_EQ(suite_json(r)["suite"], name);
  }
  EXPECT_THROW(check_invariants("nope", 10, 1), Error);
}

TEST(Cli, ExitCodes) {
  auto dir = fresh_dir("cli");
  auto ok = write_config(dir, base_json());
  EXPECT_EQ(cli("run --config " + ok.string() + " --out " + (dir / "ok").string()), 0);
  EXPECT_TRUE(fs::exists(dir / "ok" / "summary.json"));

  auto j = base_json();
  j["algorithm"] = {{"name", "blackbox"}, {"eps", 0.5}, {"delta", 0.05}, {"threshold_scale", 0.01}};
  auto bad = dir / "bad";
  fs::create_directories(bad);
  auto corrupt = write_config(bad, j);
  EXPECT_EQ(cli("run --config " + corrupt.string() + " --out " + (bad / "o").string() + " --assert"), 2);

  EXPECT_EQ(cli("check --suite nope"), 1);
  EXPECT_EQ(cli("check --suite graph-tools --trials 50"), 0);
  EXPECT_EQ(cli("run --config " + (dir / "missing.json").string() + " --out " + dir.string()), 1);
  EXPECT_EQ(cli("frobnicate"), 1);
  EXPECT_EQ(cli("sweep --config " + ok.string() + " --param mu_star --values ,"), 1);
}
