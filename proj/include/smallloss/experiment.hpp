#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "smallloss/doubling.hpp"
#include "smallloss/environments.hpp"
#include "smallloss/evaluation.hpp"
#include "smallloss/learners.hpp"

namespace smallloss {

struct AlgorithmConfig {
  std::string name;  // blackbox | green_ix | green_ix_graph | semibandit | uniform_mix
  double eps = 0.0;
  double delta = 0.0;
  std::size_t alpha_guess = 1;
  std::size_t kappa_guess = 0;  // 0: take the instance's clique count
  Engine engine = Engine::Hedge;
  std::optional<double> noise;  // default 1/T
  bool doubling = false;
  bool alpha_doubling = false;
  bool implicit_exploration = true;
  double threshold_scale = 1.0;
};

struct InstanceConfig {
  std::string kind;  // smallloss_bandit | clique_union | layered_paths | shifting
  std::size_t d = 0;
  std::size_t num_cliques = 0;
  std::size_t clique_size = 0;
  std::size_t layers = 0;
  std::size_t width = 0;
  std::size_t num_switches = 0;
  double mu_star = 0.0;
  double mu_rest = 0.5;
  LossMode loss_mode = LossMode::Bernoulli;
  std::uint64_t seed = 0;
  std::string adversary = "oblivious";  // oblivious | punish_last | path to script
};

struct ExperimentConfig {
  AlgorithmConfig algorithm;
  InstanceConfig instance;
  std::size_t T = 0;
  std::vector<std::uint64_t> seeds;
  bool assertions = true;
  // Epsilon used for approximate-regret reporting; defaults to algorithm eps.
  std::optional<double> apx_eps;
};

ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const ExperimentConfig& cfg);

// Applies a sweep parameter (mu_star, d, num_cliques, T, K) to a config.
void set_sweep_param(ExperimentConfig& cfg, const std::string& param, double value);

inline constexpr const char* kCsvHeader =
    "run_id,seed,algo,instance,phase,t,arm,loss,cum_loss,best_fixed_cum_loss,frozen_mass";

struct RunResult {
  std::size_t run_id = 0;
  std::uint64_t seed = 0;
  RegretSummary regret;
  std::optional<double> pseudo_regret;
  std::optional<double> shifting_loss;   // best K-switch comparator loss
  std::optional<double> shifting_apx;    // (1-eps)·learner - shifting_loss
  std::vector<PhaseBoundary> boundaries;
  std::size_t phases = 1;
  InvariantTally tally;
  std::uint64_t harness_violations = 0;  // record, phase and alpha-doubling checks
  std::size_t true_alpha = 0;

  std::uint64_t violations() const { return tally.violations() + harness_violations; }
};

// Runs one seed. When `csv_path` is set, writes the per-round trace there.
RunResult run_seed(const ExperimentConfig& cfg, std::size_t run_id,
                   const std::optional<std::filesystem::path>& csv_path = std::nullopt);

struct ExperimentSummary {
  std::string algo;
  std::string instance;
  std::size_t T = 0;
  std::vector<std::uint64_t> seeds;
  double mean_regret = 0.0;
  double std_regret = 0.0;
  double mean_lstar = 0.0;
  double mean_learner_loss = 0.0;
  double mean_apx_regret = 0.0;
  std::optional<double> mean_pseudo_regret;
  std::optional<double> mean_shifting_apx;
  std::uint64_t violations = 0;
  std::vector<RunResult> runs;
};

// Runs every seed on up to `parallel` worker threads; results are ordered by
// seed index regardless of scheduling.
ExperimentSummary run_experiment(const ExperimentConfig& cfg, std::size_t parallel = 1,
                                 const std::optional<std::filesystem::path>& out_dir = std::nullopt);

nlohmann::json summary_json(const ExperimentSummary& s);

struct SweepRow {
  double value = 0.0;
  ExperimentSummary summary;
};

struct SweepReport {
  std::string param;
  std::vector<SweepRow> rows;
  std::optional<ScalingFit> fit;
};

SweepReport run_sweep(const ExperimentConfig& base, const std::string& param,
                      const std::vector<double>& values, std::size_t parallel = 1,
                      const std::optional<std::filesystem::path>& out_dir = std::nullopt);

nlohmann::json sweep_json(const SweepReport& r);

}  // namespace smallloss
