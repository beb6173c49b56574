// algo2.hpp
// Joint MAP of classification and common residues by alternating
// maximization: cyclic-shift matching per sampler, then a weighted circular
// mean per cluster.
#pragma once

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "rcrt/circle.hpp"
#include "rcrt/model.hpp"

namespace rcrt {

template <typename Scalar>
struct CircularMean {
  Scalar mean = 0;
  Scalar cost = 0;  ///< sum_l w_l d^2(mean, value_l)
};

template <typename VDerived, typename WDerived>
typename VDerived::Scalar weighted_circ_cost(typename VDerived::Scalar x,
                                             const Eigen::MatrixBase<VDerived>& values,
                                             const Eigen::MatrixBase<WDerived>& weights,
                                             typename VDerived::Scalar gamma) {
  typename VDerived::Scalar cost = 0;
  for (Eigen::Index l = 0; l < values.size(); ++l) {
    const auto d = circ_dist(x, values[l], gamma);
    cost += weights[l] * d * d;
  }
  return cost;
}

/// argmin_x sum_l w_l d^2(x, value_l) over the circle.
///
/// With the values sorted, the optimal lift lifts a prefix of them by gamma,
/// so only L candidates (lift the first j values, j = 0..L-1) are checked.
template <typename VDerived, typename WDerived>
CircularMean<typename VDerived::Scalar> circular_weighted_mean(
    const Eigen::MatrixBase<VDerived>& values, const Eigen::MatrixBase<WDerived>& weights,
    typename VDerived::Scalar gamma) {
  using Scalar = typename VDerived::Scalar;
  const Eigen::Index L = values.size();
  if (L < 1) throw std::invalid_argument("circular_weighted_mean: no values");
  if (weights.size() != L)
    throw std::invalid_argument("circular_weighted_mean: weights size mismatch");

  std::vector<Eigen::Index> order(L);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return values[a] < values[b]; });

  const Scalar wsum = weights.sum();
  Scalar lifted = 0;
  for (Eigen::Index l = 0; l < L; ++l) lifted += weights[l] * values[l];

  CircularMean<Scalar> best{0, std::numeric_limits<Scalar>::infinity()};
  for (Eigen::Index j = 0; j < L; ++j) {
    if (j > 0) lifted += weights[order[j - 1]] * gamma;
    const Scalar candidate = mod_reduce(lifted / wsum, gamma);
    const Scalar cost = weighted_circ_cost(candidate, values, weights, gamma);
    if (cost < best.cost) best = {candidate, cost};
  }
  return best;
}

/// sum_i d^2(mu_i, r[K[i]]), summed in cluster order.
template <typename MDerived, typename RDerived>
typename MDerived::Scalar sampler_cost(const Eigen::MatrixBase<MDerived>& mu_hat,
                                       const Eigen::MatrixBase<RDerived>& r_col,
                                       const Permutation& K,
                                       typename MDerived::Scalar gamma) {
  typename MDerived::Scalar cost = 0;
  for (Eigen::Index i = 0; i < mu_hat.size(); ++i) {
    const auto d = circ_dist(mu_hat[i], r_col[K[i]], gamma);
    cost += d * d;
  }
  return cost;
}

/// Optimal one-to-one matching of cluster centres to one sampler's residues.
///
/// Both sets are sorted around the circle and only the N cyclic shifts of the
/// sorted pairing are compared; ties go to the smallest shift. Returns K with
/// K[i] = index into r_col matched to mu_hat[i].
template <typename MDerived, typename RDerived>
Permutation match_sampler(const Eigen::MatrixBase<MDerived>& mu_hat,
                          const Eigen::MatrixBase<RDerived>& r_col,
                          typename MDerived::Scalar gamma) {
  using Scalar = typename MDerived::Scalar;
  const int N = static_cast<int>(mu_hat.size());
  if (r_col.size() != N) throw std::invalid_argument("match_sampler: size mismatch");

  std::vector<int> mu_order(N), r_order(N);
  std::iota(mu_order.begin(), mu_order.end(), 0);
  std::iota(r_order.begin(), r_order.end(), 0);
  std::stable_sort(mu_order.begin(), mu_order.end(),
                   [&](int a, int b) { return mu_hat[a] < mu_hat[b]; });
  std::stable_sort(r_order.begin(), r_order.end(),
                   [&](int a, int b) { return r_col[a] < r_col[b]; });

  int best_shift = 0;
  Scalar best_cost = std::numeric_limits<Scalar>::infinity();
  for (int shift = 0; shift < N; ++shift) {
    Scalar cost = 0;
    for (int i = 0; i < N; ++i) {
      const Scalar d = circ_dist(mu_hat[mu_order[i]], r_col[r_order[(i + shift) % N]], gamma);
      cost += d * d;
    }
    if (cost < best_cost) {
      best_cost = cost;
      best_shift = shift;
    }
  }

  Permutation K(N);
  for (int i = 0; i < N; ++i) K[mu_order[i]] = r_order[(i + best_shift) % N];
  return K;
}

struct Algo2Options {
  int max_iter = 50;
  int restarts = 1;
};

template <typename Scalar>
struct IterState {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> mu_hat;
  std::vector<Permutation> K_hat;
  Scalar objective = 0;  ///< sum_l w_l sum_i d^2(mu_i, r[K_l[i], l])
  int iteration = 0;
  std::vector<Scalar> trace;
  bool converged = false;
  int init_column = 0;
};

/// Objective summed sampler by sampler, in index order.
template <typename Derived, typename MDerived, typename WDerived>
typename Derived::Scalar algo2_objective(const Eigen::MatrixBase<Derived>& r,
                                         const Eigen::MatrixBase<MDerived>& mu_hat,
                                         const std::vector<Permutation>& K,
                                         const Eigen::MatrixBase<WDerived>& weights,
                                         typename Derived::Scalar gamma) {
  typename Derived::Scalar total = 0;
  for (Eigen::Index l = 0; l < r.cols(); ++l)
    total += weights[l] * sampler_cost(mu_hat, r.col(l), K[l], gamma);
  return total;
}

/// One descent run from the common residues of sampler `init_column`.
///
/// A block update is kept only if it does not raise the objective as
/// evaluated in floating point, so the recorded trace never increases.
/// Stops once a Step-One pass leaves every permutation unchanged.
template <typename Derived, typename WDerived>
IterState<typename Derived::Scalar> algo2_from(const Eigen::MatrixBase<Derived>& r,
                                               const Eigen::MatrixBase<WDerived>& weights,
                                               typename Derived::Scalar gamma,
                                               int init_column, int max_iter) {
  using Scalar = typename Derived::Scalar;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const int N = static_cast<int>(r.rows());
  const int L = static_cast<int>(r.cols());
  if (N < 1 || L < 1) throw std::invalid_argument("algo2: empty observations");
  if (max_iter < 1) throw std::invalid_argument("algo2: max_iter must be >= 1");
  if (init_column < 0 || init_column >= L)
    throw std::invalid_argument("algo2: init column out of range");
  if (weights.size() != L) throw std::invalid_argument("algo2: weights size != L");

  IterState<Scalar> state;
  state.init_column = init_column;
  state.mu_hat = r.col(init_column);
  state.K_hat.assign(L, Permutation(N));

  Vector members(L);
  for (int t = 1; t <= max_iter; ++t) {
    state.iteration = t;

    // Step One: permutations given common residues.
    bool changed = false;
    for (int l = 0; l < L; ++l) {
      Permutation candidate = match_sampler(state.mu_hat, r.col(l), gamma);
      if (t == 1) {
        state.K_hat[l] = std::move(candidate);
        changed = true;
        continue;
      }
      if (candidate == state.K_hat[l]) continue;
      const Scalar old_cost = sampler_cost(state.mu_hat, r.col(l), state.K_hat[l], gamma);
      const Scalar new_cost = sampler_cost(state.mu_hat, r.col(l), candidate, gamma);
      if (new_cost < old_cost) {
        state.K_hat[l] = std::move(candidate);
        changed = true;
      }
    }
    if (!changed) {
      state.converged = true;
      state.objective = algo2_objective(r, state.mu_hat, state.K_hat, weights, gamma);
      state.trace.push_back(state.objective);
      break;
    }

    // Step Two: common residues given permutations.
    Scalar current = algo2_objective(r, state.mu_hat, state.K_hat, weights, gamma);
    for (int i = 0; i < N; ++i) {
      for (int l = 0; l < L; ++l) members[l] = r(state.K_hat[l][i], l);
      const Scalar proposal = circular_weighted_mean(members, weights, gamma).mean;
      if (proposal == state.mu_hat[i]) continue;
      const Scalar previous = state.mu_hat[i];
      state.mu_hat[i] = proposal;
      const Scalar updated = algo2_objective(r, state.mu_hat, state.K_hat, weights, gamma);
      if (updated <= current)
        current = updated;
      else
        state.mu_hat[i] = previous;
    }
    state.objective = current;
    state.trace.push_back(current);
  }
  return state;
}

/// Algorithm 2 with `restarts` random initial columns; keeps the lowest
/// final objective (earliest on ties).
template <typename Derived, typename WDerived>
IterState<typename Derived::Scalar> algo2_iterate(const Eigen::MatrixBase<Derived>& r,
                                                  const Eigen::MatrixBase<WDerived>& weights,
                                                  typename Derived::Scalar gamma,
                                                  const Algo2Options& options, Rng& rng) {
  if (options.restarts < 1) throw std::invalid_argument("algo2: restarts must be >= 1");
  std::uniform_int_distribution<int> column(0, static_cast<int>(r.cols()) - 1);
  IterState<typename Derived::Scalar> best;
  for (int k = 0; k < options.restarts; ++k) {
    auto run = algo2_from(r, weights, gamma, column(rng), options.max_iter);
    if (k == 0 || run.objective < best.objective) best = std::move(run);
  }
  return best;
}

}  // namespace rcrt
