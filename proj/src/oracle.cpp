#include "rcrt/oracle.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "rcrt/assignment.hpp"
#include "rcrt/circle.hpp"

namespace rcrt {

std::optional<double> classification_log_posterior(const std::vector<Permutation>& K,
                                                   const Eigen::MatrixXd& r,
                                                   const Eigen::VectorXd& weights,
                                                   double gamma) {
  const auto check = properness_check(K, r, gamma);
  if (!check.proper) return std::nullopt;

  const int N = static_cast<int>(r.rows());
  const int L = static_cast<int>(r.cols());
  const double wsum = weights.sum();
  double total = 0.0;
  for (int i = 0; i < N; ++i) {
    const double start = check.intervals[i].start;
    double wx = 0.0, wxx = 0.0;
    for (int l = 0; l < L; ++l) {
      const double x = start + mod_reduce(r(K[l][i], l) - start, gamma);
      wx += weights[l] * x;
      wxx += weights[l] * x * x;
    }
    // log of integral exp(-sum_l w_l (x - x_l)^2) dx, constant dropped
    total += wx * wx / wsum - wxx;
  }
  return total;
}

OracleResult oracle_map_cluster(const Eigen::MatrixXd& r, const Eigen::VectorXd& weights,
                                double gamma) {
  const int N = static_cast<int>(r.rows());
  const int L = static_cast<int>(r.cols());
  if (N < 1 || L < 1 || N > 3 || L > 4)
    throw std::invalid_argument("oracle_map_cluster: limited to 1 <= N <= 3, 1 <= L <= 4");

  std::vector<Permutation> perms;
  Permutation p(N);
  std::iota(p.begin(), p.end(), 0);
  do perms.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));

  OracleResult best;
  std::vector<std::size_t> digit(L, 0);
  std::vector<Permutation> K(L);
  bool first = true;
  while (true) {
    for (int l = 0; l < L; ++l) K[l] = perms[digit[l]];
    const auto score = classification_log_posterior(K, r, weights, gamma);
    const bool take = first || (score && (!best.log_posterior || *score > *best.log_posterior));
    if (take) {
      best.K = K;
      best.log_posterior = score;
      first = false;
    }
    int l = L - 1;
    while (l >= 0 && ++digit[l] == perms.size()) digit[l--] = 0;
    if (l < 0) break;
  }
  return best;
}

double brute_force_matching_cost(const Eigen::VectorXd& mu_hat, const Eigen::VectorXd& r_col,
                                 double gamma) {
  const int N = static_cast<int>(mu_hat.size());
  if (r_col.size() != N) throw std::invalid_argument("brute_force_matching_cost: size mismatch");
  if (N > 9) throw std::invalid_argument("brute_force_matching_cost: N too large");
  Permutation p(N);
  std::iota(p.begin(), p.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double cost = 0.0;
    for (int i = 0; i < N; ++i) {
      const double d = circ_dist(mu_hat[i], r_col[p[i]], gamma);
      cost += d * d;
    }
    best = std::min(best, cost);
  } while (std::next_permutation(p.begin(), p.end()));
  return best;
}

double grid_circular_cost(const Eigen::VectorXd& values, const Eigen::VectorXd& weights,
                          double gamma, int points) {
  if (points < 1) throw std::invalid_argument("grid_circular_cost: need points >= 1");
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < points; ++k) {
    const double x = gamma * k / points;
    double cost = 0.0;
    for (Eigen::Index l = 0; l < values.size(); ++l) {
      const double d = circ_dist(x, values[l], gamma);
      cost += weights[l] * d * d;
    }
    best = std::min(best, cost);
  }
  return best;
}

}  // namespace rcrt
