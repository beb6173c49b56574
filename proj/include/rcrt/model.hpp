// model.hpp
// Problem instances: moduli m_l = gamma * M_l, uniformly drawn targets and
// unordered noisy residue sets with hidden correspondences.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rcrt/crt.hpp"
#include "rcrt/rng.hpp"

namespace rcrt {

/// K[i] is the observation row holding cluster i's residue.
using Permutation = std::vector<int>;

struct ModuliSet {
  double gamma = 100.0;
  std::vector<std::uint64_t> M;  ///< pairwise coprime, ascending
  Eigen::VectorXd m;             ///< gamma * M
  double D = 0.0;                ///< dynamic range
  int L0 = 0;                    ///< smallest prefix count resolving D
  Eigen::VectorXd sigma;         ///< per-sampler noise std
  Eigen::VectorXd weights;       ///< 1 / (2 sigma^2), or unit when noiseless

  int size() const { return static_cast<int>(M.size()); }

  /// Number of distinct quotients floor(D / gamma), capped at prod(M).
  WideUInt quotient_range() const;

  /// Same gamma, D and noise, restricted to the given sampler indices.
  ModuliSet subset(std::span<const int> indices) const;
};

/// Validates and assembles a moduli set. D defaults to gamma * prod(M).
ModuliSet make_moduli(double gamma, std::vector<std::uint64_t> M,
                      std::optional<double> D = std::nullopt);

/// Replaces D and recomputes L0. Requires 0 < D <= gamma * prod(M).
void set_dynamic_range(ModuliSet& ms, double D);

/// Sets equal noise on every sampler and the matching weights.
void set_noise(ModuliSet& ms, double sigma);

struct PrimePolicy {
  std::uint64_t start = 21;      ///< first candidate; primes are >= start
  std::optional<int> count;      ///< defaults to 2N
  std::optional<int> lmin;       ///< restrict D to gamma * M_1 ... M_lmin
};

std::vector<std::uint64_t> primes_from(std::uint64_t start, int count);

ModuliSet build_moduli(int N, double gamma, const PrimePolicy& policy = {});

struct NoiseSpec {
  double snr_db = 0.0;  ///< +inf means noiseless
  double sigma() const;
};

struct GroundTruth {
  Eigen::VectorXd Y;
  Eigen::VectorXd mu;
  std::vector<std::int64_t> k;

  int size() const { return static_cast<int>(Y.size()); }
};

GroundTruth make_ground_truth(const Eigen::VectorXd& Y, double gamma);

GroundTruth sample_instance(const ModuliSet& ms, int N, Rng& rng);

/// What an estimator is allowed to see.
struct Observations {
  Eigen::MatrixXd R;  ///< N x L, column l holds sampler l's residues
  Eigen::MatrixXd r;  ///< common residues <R>_gamma

  int n() const { return static_cast<int>(R.rows()); }
  int l() const { return static_cast<int>(R.cols()); }

  /// Columns of R and r for the selected samplers.
  Observations columns(std::span<const int> indices) const;
};

Observations make_observations(const Eigen::MatrixXd& R, double gamma);

struct ObservationSet {
  Observations data;
  std::vector<Permutation> true_perm;  ///< evaluation only
  Eigen::MatrixXd delta;               ///< evaluation only, delta(i, l)
};

/// R(true_perm[l][i], l) = <Y_i + delta(i, l)>_{m_l}, delta ~ N(0, sigma_l^2).
ObservationSet observe(const GroundTruth& gt, const ModuliSet& ms, Rng& rng);
ObservationSet observe(const GroundTruth& gt, ModuliSet ms,
                       const NoiseSpec& noise, Rng& rng);

// Observation file: {"gamma": REAL, "M": [INT...], "R": [[REAL x L] x N]}
// with optional "D" and "sigma" keys.
struct ObservationFile {
  ModuliSet moduli;
  Observations data;
};

std::string to_json(const ModuliSet& ms, const Observations& obs);
ObservationFile observations_from_json(const std::string& text);

}  // namespace rcrt
