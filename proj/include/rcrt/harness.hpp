// harness.hpp
// Seeded Monte Carlo experiments: trial execution, success scoring,
// aggregation and CSV output.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rcrt/ensemble.hpp"
#include "rcrt/model.hpp"

namespace rcrt {

struct ExperimentConfig {
  int N = 2;
  double gamma = 100.0;
  std::optional<int> L;                              ///< defaults to 2N
  std::optional<std::vector<std::uint64_t>> moduli;  ///< overrides the prime sequence
  std::optional<int> lmin = 2;  ///< D = gamma * M_1 ... M_lmin; nullopt means full range
  std::vector<double> snr_grid = default_snr_grid();
  int trials = 1000;
  PipelineConfig pipeline;
  std::optional<EnsembleConfig> ensemble = EnsembleConfig{};
  std::uint64_t master_seed = 1;
  std::optional<double> success_threshold;  ///< defaults to gamma
  int workers = 1;
  bool timing = false;  ///< wall-clock timings make the CSV non-reproducible

  static std::vector<double> default_snr_grid();
  double threshold() const { return success_threshold.value_or(gamma); }
  void validate() const;
};

/// Moduli and dynamic range used by every trial of an experiment.
ModuliSet experiment_moduli(const ExperimentConfig& cfg);

struct SuccessScore {
  std::vector<bool> per_number;  ///< indexed by truth
  bool perfect = false;
  int matched = 0;
};

/// Maximum one-to-one matching of estimates to truths with |Y_hat - Y| <= threshold.
SuccessScore score_success(const Eigen::VectorXd& Y_hat, const Eigen::VectorXd& Y,
                           double threshold);

struct TrialResult {
  Eigen::VectorXd Y;
  Eigen::VectorXd Y_hat;
  SuccessScore score;
  std::vector<int> iterations;  ///< per Algorithm 2 run
  bool monotone = true;
  bool degenerate = false;
  double runtime_ms = 0.0;

  /// One count per trial for histograms: the largest run in the trial.
  int max_iterations() const;
};

/// Deterministic in (master_seed, snr, trial_index). snr = +inf is noiseless.
TrialResult run_trial(const ExperimentConfig& cfg, double snr, std::uint64_t trial_index);

struct MetricsRow {
  double snr = 0.0;
  int trials = 0;
  double avg_success = 0.0;
  double perfect_success = 0.0;
  double mean_iters = 0.0;
  double mean_runtime_ms = 0.0;
  int monotone_violations = 0;
  int degenerate_trials = 0;
  std::map<int, int> iteration_histogram;  ///< per-trial max iterations -> count
};

struct Metrics {
  std::vector<MetricsRow> rows;
};

Metrics run_experiment(const ExperimentConfig& cfg);

std::string csv_header();
void write_csv(std::ostream& out, const ExperimentConfig& cfg, const Metrics& metrics);
void write_histogram_csv(std::ostream& out, const ExperimentConfig& cfg, const Metrics& metrics);

std::string algorithm_name(Algorithm a);
std::string objective_name(ObjectiveMode m);
std::string ensemble_name(const std::optional<EnsembleConfig>& e);

/// Parses "none", "pairs", "subsets:S", "disjoint:S" or "random:S:K".
std::optional<EnsembleConfig> parse_ensemble(const std::string& text);

}  // namespace rcrt
