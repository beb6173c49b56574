#include "rcrt/ensemble.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "rcrt/circle.hpp"

namespace rcrt {

namespace {

bool resolves_range(const ModuliSet& ms, const std::vector<int>& subset) {
  double p = ms.gamma;
  for (int idx : subset) p *= static_cast<double>(ms.M[idx]);
  return p >= ms.D * (1.0 - 1e-12);
}

std::vector<std::vector<int>> valid_subsets(const ModuliSet& ms, int S) {
  const int L = ms.size();
  std::vector<std::vector<int>> out;
  std::vector<int> subset(S);
  std::iota(subset.begin(), subset.end(), 0);
  while (true) {
    if (resolves_range(ms, subset)) out.push_back(subset);
    int i = S - 1;
    while (i >= 0 && subset[i] == L - S + i) --i;
    if (i < 0) break;
    ++subset[i];
    for (int j = i + 1; j < S; ++j) subset[j] = subset[j - 1] + 1;
  }
  return out;
}

bool non_increasing(const std::vector<double>& trace) {
  for (std::size_t t = 1; t < trace.size(); ++t)
    if (trace[t] > trace[t - 1]) return false;
  return true;
}

}  // namespace

PipelineRun estimate_numbers(const Observations& obs, const ModuliSet& ms,
                             const PipelineConfig& cfg, Rng& rng) {
  PipelineRun run;
  if (cfg.algorithm == Algorithm::Algo1) {
    const auto result = algo1_cluster(obs.r, ms.weights, ms.gamma, cfg.objective);
    run.estimates =
        reconstruct_clusters(obs, result.assignment.K, Eigen::VectorXd(), ms, cfg.ec);
  } else {
    const auto state = algo2_iterate(obs.r, ms.weights, ms.gamma, cfg.algo2, rng);
    run.iterations.push_back(state.iteration);
    run.monotone = non_increasing(state.trace);
    run.estimates = reconstruct_clusters(obs, state.K_hat, state.mu_hat, ms, cfg.ec);
  }
  return run;
}

std::vector<std::vector<int>> group_moduli(const ModuliSet& ms, const EnsembleConfig& cfg,
                                           Rng& rng) {
  const int L = ms.size();
  const int S = cfg.policy == GroupPolicy::AllPairs ? 2 : cfg.subset_size;
  if (S < 1 || S > L) throw std::invalid_argument("group_moduli: subset size must be in [1, L]");

  std::vector<std::vector<int>> groups;
  switch (cfg.policy) {
    case GroupPolicy::AllPairs:
    case GroupPolicy::AllSubsets:
      groups = valid_subsets(ms, S);
      break;
    case GroupPolicy::DisjointGroups:
      for (int start = 0; start + S <= L; start += S) {
        std::vector<int> g(S);
        std::iota(g.begin(), g.end(), start);
        if (resolves_range(ms, g)) groups.push_back(std::move(g));
      }
      break;
    case GroupPolicy::RandomK: {
      auto pool = valid_subsets(ms, S);
      if (cfg.kappa < 1 || cfg.kappa > static_cast<int>(pool.size()))
        throw std::invalid_argument("group_moduli: kappa must be in [1, #valid subsets]");
      // partial Fisher-Yates: uniform without replacement
      for (int k = 0; k < cfg.kappa; ++k) {
        std::uniform_int_distribution<std::size_t> pick(k, pool.size() - 1);
        std::swap(pool[k], pool[pick(rng)]);
      }
      groups.assign(pool.begin(), pool.begin() + cfg.kappa);
      break;
    }
  }
  if (groups.empty())
    throw std::invalid_argument("group_moduli: no moduli subset of this size resolves D");
  return groups;
}

VoteResult vote_estimates(const std::vector<std::vector<Reconstruction>>& per_group, int N,
                          double gamma, double D) {
  if (per_group.empty()) throw std::invalid_argument("vote_estimates: no groups");
  std::vector<const Reconstruction*> pool;
  for (const auto& group : per_group)
    for (const auto& rec : group) pool.push_back(&rec);
  std::stable_sort(pool.begin(), pool.end(), [](const auto* a, const auto* b) {
    return a->Y_hat < b->Y_hat;
  });

  VoteResult out;
  const double half = gamma / 2;
  while (static_cast<int>(out.estimates.size()) < N && !pool.empty()) {
    // window [Y_j - gamma/2, Y_j + gamma/2] around every remaining seed j
    std::size_t best_seed = 0, best_lo = 0, best_hi = 0;
    long best_consistency = -1;
    std::size_t lo = 0, hi = 0;
    long window_consistency = 0;
    for (std::size_t j = 0; j < pool.size(); ++j) {
      const double y = pool[j]->Y_hat;
      while (hi < pool.size() && pool[hi]->Y_hat <= y + half)
        window_consistency += pool[hi++]->ec_consistency;
      while (pool[lo]->Y_hat < y - half) window_consistency -= pool[lo++]->ec_consistency;
      const std::size_t count = hi - lo;
      const std::size_t best_count = best_hi - best_lo;
      if (best_consistency < 0 || count > best_count ||
          (count == best_count && window_consistency > best_consistency)) {
        best_seed = j;
        best_lo = lo;
        best_hi = hi;
        best_consistency = window_consistency;
      }
    }

    Eigen::VectorXd members(static_cast<Eigen::Index>(best_hi - best_lo));
    for (std::size_t k = best_lo; k < best_hi; ++k)
      members[static_cast<Eigen::Index>(k - best_lo)] = mod_reduce(pool[k]->Y_hat, gamma);
    const double mu =
        circular_weighted_mean(members, Eigen::VectorXd::Ones(members.size()), gamma).mean;
    const double seed_value = pool[best_seed]->Y_hat;

    Reconstruction winner = *pool[best_seed];
    winner.mu_hat = mu;
    winner.Y_hat = mod_reduce(seed_value + circ_offset(mu, seed_value, gamma), D);
    winner.Q = static_cast<WideUInt>(std::floor(winner.Y_hat / gamma));
    out.estimates.push_back(std::move(winner));
    out.support.push_back(static_cast<int>(best_hi - best_lo));
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(best_lo),
               pool.begin() + static_cast<std::ptrdiff_t>(best_hi));
  }

  if (static_cast<int>(out.estimates.size()) < N) {
    out.degenerate = true;
    const std::size_t found = out.estimates.size();
    for (std::size_t k = 0; static_cast<int>(out.estimates.size()) < N; ++k) {
      out.estimates.push_back(out.estimates[k % found]);
      out.support.push_back(0);
    }
  }
  return out;
}

PipelineRun estimate_ensemble(const Observations& obs, const ModuliSet& ms,
                              const PipelineConfig& cfg, const EnsembleConfig& ens,
                              Rng& rng) {
  const auto groups = group_moduli(ms, ens, rng);
  PipelineRun run;
  std::vector<std::vector<Reconstruction>> per_group;
  per_group.reserve(groups.size());
  for (const auto& g : groups) {
    const ModuliSet sub_ms = ms.subset(g);
    // subset() sorts moduli ascending; order the columns the same way
    std::vector<int> cols = g;
    std::stable_sort(cols.begin(), cols.end(),
                     [&](int a, int b) { return ms.M[a] < ms.M[b]; });
    PipelineRun part = estimate_numbers(obs.columns(cols), sub_ms, cfg, rng);
    run.iterations.insert(run.iterations.end(), part.iterations.begin(), part.iterations.end());
    run.monotone = run.monotone && part.monotone;
    per_group.push_back(std::move(part.estimates));
  }
  VoteResult vote = vote_estimates(per_group, obs.n(), ms.gamma, ms.D);
  run.estimates = std::move(vote.estimates);
  run.degenerate = vote.degenerate;
  return run;
}

}  // namespace rcrt
