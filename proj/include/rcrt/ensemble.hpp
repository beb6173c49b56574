// ensemble.hpp
// Estimation pipelines: one shot over all samplers, or an ensemble over
// moduli subsets whose per-group estimates are merged by frequency voting.
#pragma once

#include <vector>

#include "rcrt/algo1.hpp"
#include "rcrt/algo2.hpp"
#include "rcrt/model.hpp"
#include "rcrt/reconstruct.hpp"
#include "rcrt/rng.hpp"

namespace rcrt {

enum class Algorithm { Algo1, Algo2 };

struct PipelineConfig {
  Algorithm algorithm = Algorithm::Algo2;
  ObjectiveMode objective = ObjectiveMode::FullPosterior;
  Algo2Options algo2;
  bool ec = false;
};

struct PipelineRun {
  std::vector<Reconstruction> estimates;
  std::vector<int> iterations;  ///< one entry per Algorithm 2 run
  bool monotone = true;         ///< every Algorithm 2 trace was non-increasing
  bool degenerate = false;      ///< voting found fewer than N distinct buckets
};

/// Classifies with the configured algorithm and reconstructs every cluster.
PipelineRun estimate_numbers(const Observations& obs, const ModuliSet& ms,
                             const PipelineConfig& cfg, Rng& rng);

enum class GroupPolicy { AllPairs, AllSubsets, DisjointGroups, RandomK };

struct EnsembleConfig {
  GroupPolicy policy = GroupPolicy::AllPairs;
  int subset_size = 2;  ///< ignored by AllPairs
  int kappa = 0;        ///< group count for RandomK
};

/// Sampler index subsets whose moduli resolve the dynamic range.
/// Throws std::invalid_argument when no subset of the requested size does.
std::vector<std::vector<int>> group_moduli(const ModuliSet& ms, const EnsembleConfig& cfg,
                                           Rng& rng);

struct VoteResult {
  std::vector<Reconstruction> estimates;
  std::vector<int> support;  ///< bucket sizes, parallel to estimates
  bool degenerate = false;
};

/// Picks the N most frequent estimates across groups.
///
/// A bucket collects estimates within gamma / 2 of a seed estimate, so the two
/// representations Q gamma + mu and (Q - 1) gamma + (mu + gamma) of one number
/// always vote together. Buckets are taken greedily by size, then by summed
/// error-correction consistency, then by smaller value. Each winner is
/// refined to the circular mean of its members.
VoteResult vote_estimates(const std::vector<std::vector<Reconstruction>>& per_group, int N,
                          double gamma, double D);

PipelineRun estimate_ensemble(const Observations& obs, const ModuliSet& ms,
                              const PipelineConfig& cfg, const EnsembleConfig& ens,
                              Rng& rng);

}  // namespace rcrt
