// algo1.hpp
// Conditional MAP classification of residues by cutting-point enumeration.
//
// Cutting the small circle at a point tau that lies in no cluster's noise arc
// turns it into a line on which every cluster keeps its internal order. For a
// fixed cut the most probable classification pairs the i-th smallest shifted
// residue of every sampler (rearrangement inequality), so only the N*L
// observed residues need to be tried as cuts.
#pragma once

#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "rcrt/assignment.hpp"

namespace rcrt {

enum class ObjectiveMode {
  FullPosterior,    ///< complete closed-form log posterior, maximized
  Literal,  ///< sum_i (sum_l w_l gamma_(i)l)^2, minimized
};

/// Residues above the cut move down by gamma; the rest stay.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
shift_residues(const Eigen::MatrixBase<Derived>& r, typename Derived::Scalar tau,
               typename Derived::Scalar gamma) {
  using Scalar = typename Derived::Scalar;
  return r.unaryExpr([tau, gamma](Scalar v) { return v > tau ? v - gamma : v; });
}

/// Cluster i takes the i-th smallest shifted residue of every sampler.
/// Equal values keep observation order.
template <typename Derived>
std::vector<Permutation> rank_pairing(const Eigen::MatrixBase<Derived>& r_shift) {
  const int N = static_cast<int>(r_shift.rows());
  const int L = static_cast<int>(r_shift.cols());
  std::vector<Permutation> K(L, Permutation(N));
  for (int l = 0; l < L; ++l) {
    auto& order = K[l];
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return r_shift(a, l) < r_shift(b, l); });
  }
  return K;
}

/// Score of a classification on the cut line.
///
/// FullPosterior returns sum_i [ (sum_l w_l x_il)^2 / sum_l w_l - sum_l w_l x_il^2 ],
/// evaluated in the equivalent centred form -sum_i sum_l w_l (x_il - xbar_i)^2.
template <typename Derived, typename WDerived>
typename Derived::Scalar cut_objective(const Eigen::MatrixBase<Derived>& r_shift,
                                      const std::vector<Permutation>& K,
                                      const Eigen::MatrixBase<WDerived>& weights,
                                      ObjectiveMode mode) {
  using Scalar = typename Derived::Scalar;
  const int N = static_cast<int>(r_shift.rows());
  const int L = static_cast<int>(r_shift.cols());
  const Scalar wsum = weights.sum();
  Scalar score = 0;
  for (int i = 0; i < N; ++i) {
    Scalar weighted = 0;
    for (int l = 0; l < L; ++l) weighted += weights[l] * r_shift(K[l][i], l);
    if (mode == ObjectiveMode::Literal) {
      score += weighted * weighted;
      continue;
    }
    const Scalar mean = weighted / wsum;
    for (int l = 0; l < L; ++l) {
      const Scalar d = r_shift(K[l][i], l) - mean;
      score -= weights[l] * d * d;
    }
  }
  return score;
}

template <typename Scalar>
struct Algo1Result {
  ClusterAssignment<Scalar> assignment;
  Scalar tau = 0;
  Scalar score = 0;
  bool proper_cut = false;  ///< the chosen cut leaves every cluster shorter than gamma / 2
};

/// Tries every observed common residue as the cut and keeps the best
/// rank pairing. Cuts whose clusters all span less than gamma / 2 on the line
/// (proper classifications) are preferred; if none exists the best-scoring
/// cut overall is returned with proper == false. Ties go to the smaller tau.
template <typename Derived, typename WDerived>
Algo1Result<typename Derived::Scalar> algo1_cluster(
    const Eigen::MatrixBase<Derived>& r, const Eigen::MatrixBase<WDerived>& weights,
    typename Derived::Scalar gamma, ObjectiveMode mode = ObjectiveMode::FullPosterior) {
  using Scalar = typename Derived::Scalar;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const int N = static_cast<int>(r.rows());
  const int L = static_cast<int>(r.cols());
  if (N < 1 || L < 1) throw std::invalid_argument("algo1_cluster: empty observations");
  if (weights.size() != L) throw std::invalid_argument("algo1_cluster: weights size != L");

  std::vector<Scalar> cuts;
  cuts.reserve(static_cast<std::size_t>(N) * L);
  for (int l = 0; l < L; ++l)
    for (int i = 0; i < N; ++i) cuts.push_back(r(i, l));
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  auto better = [mode](Scalar a, Scalar b) {
    return mode == ObjectiveMode::FullPosterior ? a > b : a < b;
  };

  Algo1Result<Scalar> best;
  bool have = false;
  for (Scalar tau : cuts) {
    const Matrix shifted = shift_residues(r, tau, gamma);
    auto K = rank_pairing(shifted);
    bool proper_cut = true;
    for (int i = 0; i < N && proper_cut; ++i) {
      Scalar lo = shifted(K[0][i], 0), hi = lo;
      for (int l = 1; l < L; ++l) {
        lo = std::min(lo, shifted(K[l][i], l));
        hi = std::max(hi, shifted(K[l][i], l));
      }
      proper_cut = hi - lo < gamma / 2;
    }
    const Scalar score = cut_objective(shifted, K, weights, mode);
    const bool take = !have || (proper_cut && !best.proper_cut) ||
                      (proper_cut == best.proper_cut && better(score, best.score));
    if (take) {
      best.assignment.K = std::move(K);
      best.tau = tau;
      best.score = score;
      best.proper_cut = proper_cut;
      have = true;
    }
  }

  auto check = properness_check(best.assignment.K, r, gamma);
  best.assignment.proper = check.proper;
  best.assignment.intervals = std::move(check.intervals);
  return best;
}

}  // namespace rcrt
