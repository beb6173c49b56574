// oracle.hpp
// Exhaustive reference solvers used to check the fast algorithms.
#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "rcrt/model.hpp"

namespace rcrt {

/// Log posterior of a classification up to an additive constant, or nullopt
/// when the classification is not proper (zero posterior). Each cluster is
/// unrolled along its own arc, independently of any cutting point.
std::optional<double> classification_log_posterior(const std::vector<Permutation>& K,
                                                   const Eigen::MatrixXd& r,
                                                   const Eigen::VectorXd& weights,
                                                   double gamma);

struct OracleResult {
  std::vector<Permutation> K;
  std::optional<double> log_posterior;  ///< nullopt when no classification is proper
};

/// Maximum-posterior classification over all N!^L tuples (first in
/// lexicographic order on ties). Limited to N <= 3 and L <= 4.
OracleResult oracle_map_cluster(const Eigen::MatrixXd& r, const Eigen::VectorXd& weights,
                                double gamma);

/// Minimum of sum_i d^2(mu_i, r_{pi(i)}) over all N! matchings.
double brute_force_matching_cost(const Eigen::VectorXd& mu_hat, const Eigen::VectorXd& r_col,
                                 double gamma);

/// Lowest sum_l w_l d^2(x, value_l) over an evenly spaced grid of x on [0, gamma).
double grid_circular_cost(const Eigen::VectorXd& values, const Eigen::VectorXd& weights,
                          double gamma, int points);

}  // namespace rcrt
