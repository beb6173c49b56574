#include <doctest.h>

#include <algorithm>
#include <random>

#include "rcrt/algo2.hpp"
#include "rcrt/assignment.hpp"
#include "rcrt/oracle.hpp"

using namespace rcrt;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index k = 0;
  for (double x : v) out[k++] = x;
  return out;
}

struct Instance {
  Eigen::VectorXd mu;
  Eigen::MatrixXd r;
  std::vector<Permutation> truth;
};

Instance random_instance(int N, int L, double sigma, std::mt19937_64& rng, double spacing = 0) {
  std::uniform_real_distribution<double> uni(0.0, 100.0);
  std::normal_distribution<double> noise(0.0, sigma > 0 ? sigma : 1.0);
  Instance inst;
  inst.mu.resize(N);
  for (int i = 0; i < N; ++i) {
    bool ok = false;
    while (!ok) {
      inst.mu[i] = uni(rng);
      ok = true;
      for (int j = 0; j < i; ++j) ok = ok && circ_dist(inst.mu[i], inst.mu[j], 100.0) > spacing;
    }
  }
  inst.r.resize(N, L);
  inst.truth.assign(L, Permutation(N));
  for (int l = 0; l < L; ++l) {
    auto& p = inst.truth[l];
    std::iota(p.begin(), p.end(), 0);
    std::shuffle(p.begin(), p.end(), rng);
    for (int i = 0; i < N; ++i)
      inst.r(p[i], l) = mod_reduce(inst.mu[i] + (sigma > 0 ? noise(rng) : 0.0), 100.0);
  }
  return inst;
}

}  // namespace

TEST_CASE("match_sampler examples") {
  const auto mu = vec({10, 60});
  const auto r = vec({55, 95});
  const auto K = match_sampler(mu, r, 100.0);
  CHECK(K == Permutation{1, 0});
  CHECK(sampler_cost(mu, r, K, 100.0) == doctest::Approx(250.0));
  CHECK(brute_force_matching_cost(mu, r, 100.0) == doctest::Approx(250.0));

  CHECK(match_sampler(vec({3}), vec({70}), 100.0) == Permutation{0});

  const auto same = vec({40, 5, 80});
  const auto Ks = match_sampler(same, same, 100.0);
  CHECK(Ks == Permutation{0, 1, 2});
  CHECK(sampler_cost(same, same, Ks, 100.0) == 0.0);
}

TEST_CASE("cyclic shifts reach the brute-force optimum") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> uni(0.0, 100.0);
  for (int k = 0; k < 1000; ++k) {
    const int N = 1 + static_cast<int>(rng() % 6);
    Eigen::VectorXd mu(N), r(N);
    for (int i = 0; i < N; ++i) mu[i] = uni(rng), r[i] = uni(rng);
    const auto K = match_sampler(mu, r, 100.0);
    CHECK(is_bijection(K));
    CHECK(sampler_cost(mu, r, K, 100.0) ==
          doctest::Approx(brute_force_matching_cost(mu, r, 100.0)).epsilon(1e-12));
  }
}

TEST_CASE("circular_weighted_mean examples") {
  const Eigen::VectorXd w2 = Eigen::VectorXd::Ones(2);
  const auto wrap = circular_weighted_mean(vec({98, 2}), w2, 100.0);
  CHECK(wrap.mean == doctest::Approx(0.0));
  CHECK(wrap.cost == doctest::Approx(8.0));
  CHECK(weighted_circ_cost(50.0, vec({98, 2}), w2, 100.0) == doctest::Approx(4608.0));

  CHECK(circular_weighted_mean(vec({10, 20, 30}), Eigen::VectorXd::Ones(3), 100.0).mean ==
        doctest::Approx(20.0));
  CHECK(circular_weighted_mean(vec({37.5}), Eigen::VectorXd::Ones(1), 100.0).mean == 37.5);

  // weighted means divide by the total weight
  CHECK(circular_weighted_mean(vec({10, 20}), vec({3, 1}), 100.0).mean ==
        doctest::Approx(12.5));
  CHECK_THROWS_AS(circular_weighted_mean(Eigen::VectorXd(0), Eigen::VectorXd(0), 100.0),
                  std::invalid_argument);
}

TEST_CASE("circular mean matches a fine grid search") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> uni(0.0, 100.0), wu(0.1, 3.0);
  for (int k = 0; k < 200; ++k) {
    const int L = 1 + static_cast<int>(rng() % 8);
    Eigen::VectorXd v(L), w(L);
    for (int l = 0; l < L; ++l) v[l] = uni(rng), w[l] = wu(rng);
    const auto got = circular_weighted_mean(v, w, 100.0);
    const double grid = grid_circular_cost(v, w, 100.0, 100000);
    CHECK(got.cost <= grid + 1e-9);
    CHECK(got.mean >= 0.0);
    CHECK(got.mean < 100.0);
  }
}

TEST_CASE("noiseless data converge in two iterations") {
  std::mt19937_64 rng(9);
  for (int k = 0; k < 200; ++k) {
    const int N = 2 + static_cast<int>(rng() % 6);
    const auto inst = random_instance(N, 2 * N, 0.0, rng, 1e-6);
    Rng init(static_cast<std::uint64_t>(k));
    const auto st = algo2_iterate(inst.r, Eigen::VectorXd::Ones(2 * N), 100.0, Algo2Options{}, init);
    CHECK(st.converged);
    CHECK(st.iteration <= 2);
    CHECK(st.objective == doctest::Approx(0.0).epsilon(1e-9));
    // cluster i starts from row i of the initial column
    const auto& seed_perm = inst.truth[st.init_column];
    for (int i = 0; i < N; ++i) {
      const int number = static_cast<int>(
          std::find(seed_perm.begin(), seed_perm.end(), i) - seed_perm.begin());
      CHECK(st.mu_hat[i] == doctest::Approx(inst.mu[number]));
      for (int l = 0; l < 2 * N; ++l) CHECK(st.K_hat[l][i] == inst.truth[l][number]);
    }
  }
}

TEST_CASE("objective trace never increases") {
  std::mt19937_64 rng(44);
  for (int k = 0; k < 500; ++k) {
    const int N = 2 + static_cast<int>(rng() % 5);
    const double sigma = std::pow(10.0, (static_cast<double>(rng() % 41) - 0.0) / 20.0);
    const auto inst = random_instance(N, 2 * N, sigma, rng);
    const Eigen::VectorXd w = Eigen::VectorXd::Constant(2 * N, 1.0 / (2 * sigma * sigma));
    Rng init(static_cast<std::uint64_t>(k));
    const auto st = algo2_iterate(inst.r, w, 100.0, Algo2Options{50, 1}, init);
    for (std::size_t t = 1; t < st.trace.size(); ++t) CHECK(st.trace[t] <= st.trace[t - 1]);
    CHECK(st.iteration <= 50);
    for (const auto& p : st.K_hat) CHECK(is_bijection(p));
    CHECK(st.objective ==
          doctest::Approx(algo2_objective(inst.r, st.mu_hat, st.K_hat, w, 100.0)));
  }
}

TEST_CASE("restarts keep the best objective") {
  std::mt19937_64 rng(3);
  const auto inst = random_instance(4, 8, 4.0, rng);
  const Eigen::VectorXd w = Eigen::VectorXd::Constant(8, 1.0 / 32.0);
  Rng a(1), b(1);
  const auto one = algo2_iterate(inst.r, w, 100.0, Algo2Options{50, 1}, a);
  const auto many = algo2_iterate(inst.r, w, 100.0, Algo2Options{50, 8}, b);
  CHECK(many.objective <= one.objective);
  for (int c = 0; c < 8; ++c)
    CHECK(many.objective <= algo2_from(inst.r, w, 100.0, c, 50).objective + 1e-9);
}

TEST_CASE("algo2 rejects bad options") {
  const Eigen::MatrixXd r = Eigen::MatrixXd::Zero(2, 2);
  const Eigen::VectorXd w = Eigen::VectorXd::Ones(2);
  Rng rng(1);
  CHECK_THROWS_AS(algo2_iterate(r, w, 100.0, Algo2Options{0, 1}, rng), std::invalid_argument);
  CHECK_THROWS_AS(algo2_iterate(r, w, 100.0, Algo2Options{5, 0}, rng), std::invalid_argument);
  CHECK_THROWS_AS(algo2_from(r, w, 100.0, 2, 5), std::invalid_argument);
}
