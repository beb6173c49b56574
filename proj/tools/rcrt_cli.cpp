// Command-line front end: Monte Carlo sweeps, solving observation files,
// generating instances and evaluating the analytic bounds.
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "rcrt/analytics.hpp"
#include "rcrt/harness.hpp"

namespace {

using rcrt::Algorithm;
using rcrt::ObjectiveMode;

const std::map<std::string, Algorithm> kAlgorithms{{"algo1", Algorithm::Algo1},
                                                   {"algo2", Algorithm::Algo2}};
const std::map<std::string, ObjectiveMode> kObjectives{
    {"full", ObjectiveMode::FullPosterior}, {"literal", ObjectiveMode::Literal}};
const std::map<std::string, bool> kSwitch{{"on", true}, {"off", false}};

std::vector<double> snr_range(double lo, double hi, double step) {
  if (!(step > 0)) throw std::invalid_argument("--snr-step must be positive");
  if (hi < lo) throw std::invalid_argument("--snr-max must be >= --snr-min");
  const auto count = static_cast<long>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> grid;
  for (long k = 0; k < count; ++k) grid.push_back(lo + static_cast<double>(k) * step);
  return grid;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path);
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-")
    std::cout << text;
  else
    write_file(path, text);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust reconstruction of multiple numbers from unordered noisy residues"};
  app.require_subcommand(1);

  // simulate
  rcrt::ExperimentConfig sim;
  double snr_min = -40, snr_max = 0, snr_step = 1;
  std::string ensemble_text = "pairs", out_path, hist_path;
  bool sim_ec = false;
  std::optional<int> lmin_opt;
  bool full_range = false;
  auto* simulate = app.add_subcommand("simulate", "Success rate versus SNR sweep, written as CSV");
  simulate->add_option("--n", sim.N, "Numbers per instance")->capture_default_str();
  simulate->add_option("--gamma", sim.gamma, "Common factor of the moduli")->capture_default_str();
  simulate->add_option("--l", sim.L, "Number of samplers (default 2N)");
  simulate->add_option("--moduli", sim.moduli, "Explicit coprime M_l, overriding --l");
  simulate->add_option("--lmin", lmin_opt, "D = gamma * M_1 ... M_lmin (default 2)");
  simulate->add_flag("--full-range", full_range, "D = gamma * prod(M)")->excludes("--lmin");
  simulate->add_option("--snr-min", snr_min)->capture_default_str();
  simulate->add_option("--snr-max", snr_max)->capture_default_str();
  simulate->add_option("--snr-step", snr_step)->capture_default_str();
  simulate->add_option("--trials", sim.trials)->capture_default_str();
  simulate->add_option("--algo", sim.pipeline.algorithm)
      ->transform(CLI::CheckedTransformer(kAlgorithms));
  simulate->add_option("--objective", sim.pipeline.objective)
      ->transform(CLI::CheckedTransformer(kObjectives));
  simulate->add_option("--ensemble", ensemble_text,
                       "none, pairs, subsets:S, disjoint:S or random:S:K")
      ->capture_default_str();
  simulate->add_option("--ec", sim_ec)->transform(CLI::CheckedTransformer(kSwitch));
  simulate->add_option("--restarts", sim.pipeline.algo2.restarts)->capture_default_str();
  simulate->add_option("--max-iter", sim.pipeline.algo2.max_iter)->capture_default_str();
  simulate->add_option("--seed", sim.master_seed)->capture_default_str();
  simulate->add_option("--threshold", sim.success_threshold, "Success threshold (default gamma)");
  simulate->add_option("--workers", sim.workers)->capture_default_str();
  simulate->add_flag("--timing", sim.timing, "Fill mean_runtime_ms (breaks byte reproducibility)");
  simulate->add_option("--out", out_path, "CSV path, stdout when omitted");
  simulate->add_option("--hist", hist_path, "Iteration histogram CSV path");

  // solve
  std::string input_path, solve_ensemble = "none";
  Algorithm solve_algo = Algorithm::Algo2;
  ObjectiveMode solve_objective = ObjectiveMode::FullPosterior;
  bool solve_ec = false;
  std::uint64_t solve_seed = 1;
  rcrt::Algo2Options solve_algo2;
  auto* solve = app.add_subcommand("solve", "Estimate the numbers behind an observation file");
  solve->add_option("--input", input_path, "Observation JSON")->required();
  solve->add_option("--algo", solve_algo)->transform(CLI::CheckedTransformer(kAlgorithms));
  solve->add_option("--objective", solve_objective)
      ->transform(CLI::CheckedTransformer(kObjectives));
  solve->add_option("--ec", solve_ec)->transform(CLI::CheckedTransformer(kSwitch));
  solve->add_option("--ensemble", solve_ensemble)->capture_default_str();
  solve->add_option("--restarts", solve_algo2.restarts)->capture_default_str();
  solve->add_option("--max-iter", solve_algo2.max_iter)->capture_default_str();
  solve->add_option("--seed", solve_seed, "Seed for restart initialisation")->capture_default_str();

  // generate
  int gen_n = 2;
  double gen_gamma = 100.0;
  std::optional<int> gen_l;
  std::optional<double> gen_snr;
  std::uint64_t gen_seed = 1;
  std::string gen_out;
  auto* generate = app.add_subcommand("generate", "Write a random observation file");
  generate->add_option("--n", gen_n)->capture_default_str();
  generate->add_option("--gamma", gen_gamma)->capture_default_str();
  generate->add_option("--l", gen_l, "Number of samplers (default 2N)");
  generate->add_option("--snr", gen_snr, "SNR in dB; noiseless when omitted");
  generate->add_option("--seed", gen_seed)->capture_default_str();
  generate->add_option("--out", gen_out, "JSON path, stdout when omitted");

  // analyze
  auto* analyze = app.add_subcommand("analyze", "Analytic success probabilities");
  analyze->require_subcommand(1);
  double a_sigma = 1.0, a_delta = 1.0, a_p = 1.0;
  int a_n = 1, a_l = 2, a_kappa = 1;
  auto* bound = analyze->add_subcommand("bound", "Noise span probability and its product bound");
  bound->add_option("--sigma", a_sigma)->required();
  bound->add_option("--delta", a_delta)->required();
  bound->add_option("--n", a_n)->required();
  bound->add_option("--l", a_l)->required();
  auto* chernoff = analyze->add_subcommand("chernoff", "Majority-vote success lower bound");
  chernoff->add_option("--p", a_p)->required();
  chernoff->add_option("--kappa", a_kappa)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) {
      sim.snr_grid = snr_range(snr_min, snr_max, snr_step);
      sim.ensemble = rcrt::parse_ensemble(ensemble_text);
      sim.pipeline.ec = sim_ec;
      if (full_range)
        sim.lmin.reset();
      else if (lmin_opt)
        sim.lmin = lmin_opt;
      const rcrt::Metrics metrics = rcrt::run_experiment(sim);
      std::ostringstream csv;
      rcrt::write_csv(csv, sim, metrics);
      emit(out_path, csv.str());
      if (!hist_path.empty()) {
        std::ostringstream hist;
        rcrt::write_histogram_csv(hist, sim, metrics);
        write_file(hist_path, hist.str());
      }
    } else if (*solve) {
      const rcrt::ObservationFile file = rcrt::observations_from_json(read_file(input_path));
      rcrt::PipelineConfig cfg;
      cfg.algorithm = solve_algo;
      cfg.objective = solve_objective;
      cfg.ec = solve_ec;
      cfg.algo2 = solve_algo2;
      rcrt::Rng rng(solve_seed);
      const auto ens = rcrt::parse_ensemble(solve_ensemble);
      const rcrt::PipelineRun run =
          ens ? rcrt::estimate_ensemble(file.data, file.moduli, cfg, *ens, rng)
              : rcrt::estimate_numbers(file.data, file.moduli, cfg, rng);
      for (std::size_t i = 0; i < run.estimates.size(); ++i) {
        const auto& e = run.estimates[i];
        nlohmann::json line{{"index", i},
                            {"Y_hat", e.Y_hat},
                            {"mu_hat", e.mu_hat},
                            {"Q", rcrt::to_string(e.Q)},
                            {"ec", e.ec_used},
                            {"ec_consistency", e.ec_consistency},
                            {"ec_valid", e.ec_valid},
                            {"degenerate", run.degenerate}};
        std::cout << line.dump() << '\n';
      }
    } else if (*generate) {
      rcrt::PrimePolicy policy;
      policy.count = gen_l.value_or(2 * gen_n);
      rcrt::ModuliSet ms = rcrt::build_moduli(gen_n, gen_gamma, policy);
      const double sigma = gen_snr ? rcrt::NoiseSpec{*gen_snr}.sigma() : 0.0;
      rcrt::set_noise(ms, sigma);
      rcrt::Rng rng(gen_seed);
      const auto truth = rcrt::sample_instance(ms, gen_n, rng);
      const auto obs = rcrt::observe(truth, ms, rng);
      emit(gen_out, rcrt::to_json(ms, obs.data) + "\n");
    } else if (*bound) {
      std::printf("exact_span_prob %.10g\nbound_span_prob %.10g\n",
                  rcrt::exact_span_prob(a_sigma, a_delta, a_n, a_l),
                  rcrt::bound_span_prob(a_sigma, a_delta, a_n, a_l));
    } else if (*chernoff) {
      std::printf("chernoff_success %.10g\n", rcrt::chernoff_success(a_p, a_kappa));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
