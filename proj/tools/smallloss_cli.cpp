// Command-line driver: run, sweep and check.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "smallloss/experiment.hpp"
#include "smallloss/invariant_suites.hpp"

namespace fs = std::filesystem;
using namespace smallloss;

namespace {

enum Exit { kOk = 0, kConfig = 1, kViolation = 2, kRuntime = 3 };

void write_json(const fs::path& path, const nlohmann::json& j) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), Errc::IoFailure, "cannot write " + path.string());
  out << j.dump(2) << '\n';
  require(static_cast<bool>(out), Errc::IoFailure, "failed writing " + path.string());
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(Errc::ConfigParse, "bad sweep value '" + item + "'");
    }
  }
  require(!values.empty(), Errc::ConfigParse, "sweep needs at least one value");
  return values;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Small-loss bandit experiments"};
  app.require_subcommand(1);

  std::string config_path, out_dir, param, values_text, suite;
  std::size_t parallel = 1, trials = 1000;
  std::uint64_t seed = 1;
  bool assert_flag = false;

  auto* run = app.add_subcommand("run", "run an experiment config");
  run->add_option("--config", config_path, "experiment config (JSON)")->required();
  run->add_option("--out", out_dir, "output directory")->required();
  run->add_option("--parallel", parallel, "worker threads")->check(CLI::PositiveNumber);
  run->add_flag("--assert", assert_flag, "exit 2 on any invariant violation");

  auto* sweep = app.add_subcommand("sweep", "sweep one parameter");
  sweep->add_option("--config", config_path, "experiment config (JSON)")->required();
  sweep->add_option("--param", param, "mu_star | d | num_cliques | T | K")->required();
  sweep->add_option("--values", values_text, "comma separated values")->required();
  sweep->add_option("--out", out_dir, "output directory (report printed to stdout if absent)");
  sweep->add_option("--parallel", parallel, "worker threads")->check(CLI::PositiveNumber);

  auto* check = app.add_subcommand("check", "run an invariant suite");
  check->add_option("--suite", suite, "freezing | estimators | concentration | shifting-dp | graph-tools")
      ->required();
  check->add_option("--trials", trials, "number of trials");
  check->add_option("--seed", seed, "master seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*run) {
      const ExperimentConfig cfg = load_config(config_path);
      const ExperimentSummary s = run_experiment(cfg, parallel, fs::path(out_dir));
      write_json(fs::path(out_dir) / "summary.json", summary_json(s));
      std::printf("%s %s T=%zu seeds=%zu mean_regret=%.4f mean_lstar=%.2f violations=%llu\n",
                  s.algo.c_str(), s.instance.c_str(), s.T, s.seeds.size(), s.mean_regret,
                  s.mean_lstar, static_cast<unsigned long long>(s.violations));
      if ((assert_flag || cfg.assertions) && s.violations > 0) return kViolation;
      return kOk;
    }
    if (*sweep) {
      const ExperimentConfig cfg = load_config(config_path);
      const auto values = parse_values(values_text);
      std::optional<fs::path> dir;
      if (!out_dir.empty()) dir = fs::path(out_dir);
      const SweepReport rep = run_sweep(cfg, param, values, parallel, dir);
      const auto j = sweep_json(rep);
      if (dir)
        write_json(*dir / "sweep.json", j);
      else
        std::cout << j.dump(2) << '\n';
      std::uint64_t violations = 0;
      for (const auto& row : rep.rows) violations += row.summary.violations;
      if (cfg.assertions && violations > 0) return kViolation;
      return kOk;
    }
    if (*check) {
      bool known = false;
      for (const auto& name : suite_names()) known = known || name == suite;
      if (!known) {
        std::cerr << "unknown suite: " << suite << '\n';
        return kConfig;
      }
      const SuiteReport r = check_invariants(suite, trials, seed);
      std::cout << suite_json(r).dump(2) << '\n';
      return r.violations == 0 ? kOk : kViolation;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == Errc::ConfigParse ? kConfig : kRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
  return kOk;
}
