// assignment.hpp
// Residue classifications and their noise arcs on the circle modulo gamma.
#pragma once

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "rcrt/circle.hpp"
#include "rcrt/model.hpp"

namespace rcrt {

/// Directed arc starting at `start`, running clockwise for `length`.
template <typename Scalar>
struct Arc {
  Scalar start = 0;
  Scalar length = 0;
  bool exists = false;  ///< false when no arc shorter than gamma / 2 holds the cluster
};

template <typename Scalar>
struct ClusterAssignment {
  std::vector<Permutation> K;  ///< K[l][i]: observation row of cluster i in sampler l
  bool proper = false;
  std::vector<Arc<Scalar>> intervals;

  int clusters() const { return K.empty() ? 0 : static_cast<int>(K.front().size()); }
};

inline bool is_bijection(const Permutation& p) {
  std::vector<char> seen(p.size(), 0);
  for (int v : p) {
    if (v < 0 || v >= static_cast<int>(p.size()) || seen[v]) return false;
    seen[v] = 1;
  }
  return true;
}

/// Shortest arc holding every point: the complement of the largest cyclic gap.
template <typename Scalar>
Arc<Scalar> enclosing_arc(std::vector<Scalar> points, Scalar gamma) {
  Arc<Scalar> arc;
  if (points.empty()) return arc;
  for (auto& p : points) p = mod_reduce(p, gamma);
  std::sort(points.begin(), points.end());
  const std::size_t n = points.size();
  // gap after points[k] running clockwise to points[k+1]
  Scalar widest = gamma - (points[n - 1] - points[0]);
  std::size_t after = n - 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const Scalar gap = points[k + 1] - points[k];
    if (gap > widest) {
      widest = gap;
      after = k;
    }
  }
  arc.start = points[(after + 1) % n];
  arc.length = gamma - widest;
  arc.exists = arc.length < gamma / 2;
  return arc;
}

template <typename Scalar>
struct Properness {
  bool proper = false;
  std::vector<Arc<Scalar>> intervals;
};

/// Finds each cluster's arc I_i and decides whether the classification is
/// proper: every arc shorter than gamma / 2 and some point of the circle left
/// uncovered by all arcs.
template <typename Scalar, typename Derived>
Properness<Scalar> properness_check(const std::vector<Permutation>& K,
                                    const Eigen::MatrixBase<Derived>& r,
                                    Scalar gamma) {
  const int N = static_cast<int>(r.rows());
  const int L = static_cast<int>(r.cols());
  if (static_cast<int>(K.size()) != L)
    throw std::invalid_argument("properness_check: need one permutation per sampler");
  for (const auto& p : K)
    if (static_cast<int>(p.size()) != N || !is_bijection(p))
      throw std::invalid_argument("properness_check: assignment is not bijective");

  Properness<Scalar> out;
  out.intervals.resize(N);
  bool all_short = true;
  for (int i = 0; i < N; ++i) {
    std::vector<Scalar> members(L);
    for (int l = 0; l < L; ++l) members[l] = r(K[l][i], l);
    out.intervals[i] = enclosing_arc(std::move(members), gamma);
    all_short = all_short && out.intervals[i].exists;
  }
  if (!all_short) return out;

  // The uncovered set is open, so if it is non-empty it contains the points
  // just past some arc's clockwise end.
  for (int i = 0; i < N; ++i) {
    const Scalar end = mod_reduce(out.intervals[i].start + out.intervals[i].length, gamma);
    bool covered = false;
    for (int j = 0; j < N && !covered; ++j) {
      if (j == i) continue;
      const Scalar offset = mod_reduce(end - out.intervals[j].start, gamma);
      covered = offset < out.intervals[j].length;
    }
    if (!covered) {
      out.proper = true;
      break;
    }
  }
  return out;
}

}  // namespace rcrt
