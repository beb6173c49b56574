#include "rcrt/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <thread>

#include "rcrt/rng.hpp"

namespace rcrt {

std::vector<double> ExperimentConfig::default_snr_grid() {
  std::vector<double> grid;
  for (int s = -40; s <= 0; ++s) grid.push_back(s);
  return grid;
}

void ExperimentConfig::validate() const {
  if (N < 1) throw std::invalid_argument("experiment: N must be >= 1");
  if (trials < 1) throw std::invalid_argument("experiment: trials must be >= 1");
  if (snr_grid.empty()) throw std::invalid_argument("experiment: empty SNR grid");
  if (workers < 1) throw std::invalid_argument("experiment: workers must be >= 1");
  if (!(threshold() >= 0)) throw std::invalid_argument("experiment: negative threshold");
}

ModuliSet experiment_moduli(const ExperimentConfig& cfg) {
  ModuliSet ms;
  if (cfg.moduli) {
    ms = make_moduli(cfg.gamma, *cfg.moduli);
    if (cfg.lmin) {
      if (*cfg.lmin < 1 || *cfg.lmin > ms.size())
        throw std::invalid_argument("experiment: lmin must be in [1, L]");
      double D = cfg.gamma;
      for (int l = 0; l < *cfg.lmin; ++l) D *= static_cast<double>(ms.M[l]);
      set_dynamic_range(ms, D);
    }
  } else {
    PrimePolicy policy;
    policy.count = cfg.L.value_or(2 * cfg.N);
    policy.lmin = cfg.lmin;
    ms = build_moduli(cfg.N, cfg.gamma, policy);
  }
  return ms;
}

SuccessScore score_success(const Eigen::VectorXd& Y_hat, const Eigen::VectorXd& Y,
                           double threshold) {
  const int N = static_cast<int>(Y.size());
  if (Y_hat.size() != N) throw std::invalid_argument("score_success: length mismatch");

  // Kuhn's augmenting paths on the bipartite "close enough" graph.
  std::vector<int> truth_of_estimate(N, -1);
  std::vector<char> visited;
  auto augment = [&](auto&& self, int truth) -> bool {
    for (int e = 0; e < N; ++e) {
      if (visited[e] || std::abs(Y_hat[e] - Y[truth]) > threshold) continue;
      visited[e] = 1;
      if (truth_of_estimate[e] < 0 || self(self, truth_of_estimate[e])) {
        truth_of_estimate[e] = truth;
        return true;
      }
    }
    return false;
  };

  SuccessScore score;
  score.per_number.assign(N, false);
  for (int i = 0; i < N; ++i) {
    visited.assign(N, 0);
    if (augment(augment, i)) ++score.matched;
  }
  for (int e = 0; e < N; ++e)
    if (truth_of_estimate[e] >= 0) score.per_number[truth_of_estimate[e]] = true;
  score.perfect = score.matched == N;
  return score;
}

int TrialResult::max_iterations() const {
  return iterations.empty() ? 0 : *std::max_element(iterations.begin(), iterations.end());
}

TrialResult run_trial(const ExperimentConfig& cfg, double snr, std::uint64_t trial_index) {
  const auto started = std::chrono::steady_clock::now();
  ModuliSet ms = experiment_moduli(cfg);
  set_noise(ms, NoiseSpec{snr}.sigma());

  Rng rng = trial_rng(cfg.master_seed, snr, trial_index);
  const GroundTruth truth = sample_instance(ms, cfg.N, rng);
  const ObservationSet obs = observe(truth, ms, rng);

  PipelineRun run = cfg.ensemble
                        ? estimate_ensemble(obs.data, ms, cfg.pipeline, *cfg.ensemble, rng)
                        : estimate_numbers(obs.data, ms, cfg.pipeline, rng);

  TrialResult result;
  result.Y = truth.Y;
  result.Y_hat.resize(cfg.N);
  for (int i = 0; i < cfg.N; ++i) result.Y_hat[i] = run.estimates[i].Y_hat;
  result.score = score_success(result.Y_hat, result.Y, cfg.threshold());
  result.iterations = std::move(run.iterations);
  result.monotone = run.monotone;
  result.degenerate = run.degenerate;
  result.runtime_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started)
          .count();
  return result;
}

Metrics run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  experiment_moduli(cfg);  // surface configuration errors before spawning workers

  const std::size_t per_snr = static_cast<std::size_t>(cfg.trials);
  const std::size_t jobs = cfg.snr_grid.size() * per_snr;
  std::vector<TrialResult> results(jobs);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};

  auto worker = [&] {
    while (!failed) {
      const std::size_t job = next++;
      if (job >= jobs) return;
      try {
        results[job] = run_trial(cfg, cfg.snr_grid[job / per_snr], job % per_snr);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (int w = 1; w < cfg.workers; ++w) pool.emplace_back(worker);
    worker();
  }
  if (failure) std::rethrow_exception(failure);

  Metrics metrics;
  for (std::size_t s = 0; s < cfg.snr_grid.size(); ++s) {
    MetricsRow row;
    row.snr = cfg.snr_grid[s];
    row.trials = cfg.trials;
    double success = 0.0, perfect = 0.0, runtime = 0.0;
    long iter_sum = 0, iter_runs = 0;
    for (std::size_t t = 0; t < per_snr; ++t) {
      const TrialResult& r = results[s * per_snr + t];
      success += static_cast<double>(r.score.matched) / cfg.N;
      perfect += r.score.perfect ? 1.0 : 0.0;
      runtime += r.runtime_ms;
      for (int it : r.iterations) iter_sum += it;
      iter_runs += static_cast<long>(r.iterations.size());
      if (!r.iterations.empty()) ++row.iteration_histogram[r.max_iterations()];
      if (!r.monotone) ++row.monotone_violations;
      if (r.degenerate) ++row.degenerate_trials;
    }
    row.avg_success = success / cfg.trials;
    row.perfect_success = perfect / cfg.trials;
    row.mean_iters = iter_runs > 0 ? static_cast<double>(iter_sum) / iter_runs : 0.0;
    row.mean_runtime_ms = runtime / cfg.trials;
    metrics.rows.push_back(std::move(row));
  }
  return metrics;
}

std::string algorithm_name(Algorithm a) { return a == Algorithm::Algo1 ? "algo1" : "algo2"; }

std::string objective_name(ObjectiveMode m) {
  return m == ObjectiveMode::FullPosterior ? "full" : "literal";
}

std::string ensemble_name(const std::optional<EnsembleConfig>& e) {
  if (!e) return "none";
  switch (e->policy) {
    case GroupPolicy::AllPairs:
      return "pairs";
    case GroupPolicy::AllSubsets:
      return "subsets:" + std::to_string(e->subset_size);
    case GroupPolicy::DisjointGroups:
      return "disjoint:" + std::to_string(e->subset_size);
    case GroupPolicy::RandomK:
      return "random:" + std::to_string(e->subset_size) + ":" + std::to_string(e->kappa);
  }
  return "none";
}

std::optional<EnsembleConfig> parse_ensemble(const std::string& text) {
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || v < 1)
      throw std::invalid_argument("ensemble: bad number in '" + text + "'");
    return v;
  };
  if (text == "none") return std::nullopt;
  EnsembleConfig e;
  if (text == "pairs") return e;
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("ensemble: unknown '" + text + "'");
  const std::string kind = text.substr(0, colon);
  const std::string rest = text.substr(colon + 1);
  if (kind == "subsets" || kind == "disjoint") {
    e.policy = kind == "subsets" ? GroupPolicy::AllSubsets : GroupPolicy::DisjointGroups;
    e.subset_size = number(rest);
    return e;
  }
  if (kind == "random") {
    const auto second = rest.find(':');
    if (second == std::string::npos)
      throw std::invalid_argument("ensemble: expected random:S:K");
    e.policy = GroupPolicy::RandomK;
    e.subset_size = number(rest.substr(0, second));
    e.kappa = number(rest.substr(second + 1));
    return e;
  }
  throw std::invalid_argument("ensemble: unknown '" + text + "'");
}

namespace {

std::string fmt_double(double v, const char* spec) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

}  // namespace

std::string csv_header() {
  return "snr,n,l,algo,objective,ensemble,ec,trials,avg_success,perfect_success,mean_iters,"
         "mean_runtime_ms";
}

void write_csv(std::ostream& out, const ExperimentConfig& cfg, const Metrics& metrics) {
  const int L = experiment_moduli(cfg).size();
  const bool algo2 = cfg.pipeline.algorithm == Algorithm::Algo2;
  out << csv_header() << '\n';
  for (const auto& row : metrics.rows) {
    out << fmt_double(row.snr, "%g") << ',' << cfg.N << ',' << L << ','
        << algorithm_name(cfg.pipeline.algorithm) << ',' << objective_name(cfg.pipeline.objective)
        << ',' << ensemble_name(cfg.ensemble) << ',' << (cfg.pipeline.ec ? "on" : "off") << ','
        << row.trials << ',' << fmt_double(row.avg_success, "%.6f") << ','
        << fmt_double(row.perfect_success, "%.6f") << ','
        << (algo2 ? fmt_double(row.mean_iters, "%.4f") : std::string()) << ','
        << (cfg.timing ? fmt_double(row.mean_runtime_ms, "%.4f") : std::string()) << '\n';
  }
}

void write_histogram_csv(std::ostream& out, const ExperimentConfig& cfg, const Metrics& metrics) {
  out << "snr,n,scenario,iterations,count\n";
  for (const auto& row : metrics.rows) {
    const char* scenario = row.snr < -20 ? "low" : "high";
    for (const auto& [iters, count] : row.iteration_histogram)
      out << fmt_double(row.snr, "%g") << ',' << cfg.N << ',' << scenario << ',' << iters << ','
          << count << '\n';
  }
}

}  // namespace rcrt
