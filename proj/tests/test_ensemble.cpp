#include <doctest.h>

#include <map>
#include <random>

#include "rcrt/ensemble.hpp"

using namespace rcrt;

namespace {

Reconstruction rec(double Y, double gamma = 100.0, int consistency = 2) {
  Reconstruction r;
  r.Y_hat = Y;
  r.mu_hat = mod_reduce(Y, gamma);
  r.Q = static_cast<WideUInt>(std::floor(Y / gamma));
  r.ec_consistency = consistency;
  return r;
}

ModuliSet pair_range(int N) {
  PrimePolicy p;
  p.lmin = 2;
  return build_moduli(N, 100.0, p);
}

}  // namespace

TEST_CASE("group_moduli counts") {
  Rng rng(1);
  const auto ms = pair_range(2);
  CHECK(group_moduli(ms, EnsembleConfig{}, rng).size() == 6);

  const auto two = build_moduli(1, 100.0);
  EnsembleConfig s2{GroupPolicy::AllSubsets, 2, 0};
  CHECK(group_moduli(two, s2, rng).size() == 1);

  EnsembleConfig random{GroupPolicy::RandomK, 2, 6};
  auto groups = group_moduli(ms, random, rng);
  CHECK(groups.size() == 6);
  std::sort(groups.begin(), groups.end());
  CHECK(std::adjacent_find(groups.begin(), groups.end()) == groups.end());

  EnsembleConfig disjoint{GroupPolicy::DisjointGroups, 2, 0};
  CHECK(group_moduli(ms, disjoint, rng) == std::vector<std::vector<int>>{{0, 1}, {2, 3}});

  EnsembleConfig subsets3{GroupPolicy::AllSubsets, 3, 0};
  CHECK(group_moduli(ms, subsets3, rng).size() == 4);
}

TEST_CASE("group_moduli rejects unusable sizes") {
  Rng rng(1);
  const auto full = build_moduli(2, 100.0);  // D needs all four moduli
  CHECK_THROWS_AS(group_moduli(full, EnsembleConfig{}, rng), std::invalid_argument);
  const auto ms = pair_range(2);
  CHECK_THROWS_AS(group_moduli(ms, EnsembleConfig{GroupPolicy::AllSubsets, 5, 0}, rng),
                  std::invalid_argument);
  CHECK_THROWS_AS(group_moduli(ms, EnsembleConfig{GroupPolicy::RandomK, 2, 7}, rng),
                  std::invalid_argument);
}

TEST_CASE("random groups are uniform over subsets") {
  const auto ms = pair_range(2);
  std::map<std::vector<int>, int> hits;
  Rng rng(9);
  for (int k = 0; k < 6000; ++k)
    ++hits[group_moduli(ms, EnsembleConfig{GroupPolicy::RandomK, 2, 1}, rng).front()];
  CHECK(hits.size() == 6);
  for (const auto& [g, n] : hits) CHECK(std::abs(n - 1000) < 150);
}

TEST_CASE("unanimous votes") {
  const std::vector<std::vector<Reconstruction>> groups(5, {rec(757), rec(31250)});
  const auto v = vote_estimates(groups, 2, 100.0, 1e6);
  CHECK_FALSE(v.degenerate);
  CHECK(v.estimates[0].Y_hat == doctest::Approx(757));
  CHECK(v.estimates[1].Y_hat == doctest::Approx(31250));
  CHECK(v.support == std::vector<int>{5, 5});
}

TEST_CASE("majority quotient wins") {
  const std::vector<std::vector<Reconstruction>> groups{{rec(703)}, {rec(704)}, {rec(1203)}};
  const auto v = vote_estimates(groups, 1, 100.0, 1e6);
  CHECK(v.estimates[0].Y_hat == doctest::Approx(703.5));
  CHECK(v.estimates[0].Q == 7);
  CHECK(v.support[0] == 2);
}

TEST_CASE("the two lifts of one number share a bucket") {
  // Q = 7 with mu = 3 and Q = 6 with mu = 103 describe the same number
  Reconstruction a = rec(703), b = rec(703);
  b.Q = 6;
  b.mu_hat = 3;  // mu_hat - gamma representation, same Y
  const std::vector<std::vector<Reconstruction>> groups{{a}, {b}, {rec(2000)}};
  const auto v = vote_estimates(groups, 1, 100.0, 1e6);
  CHECK(v.support[0] == 2);
  CHECK(v.estimates[0].Y_hat == doctest::Approx(703));

  // noisy members straddling a multiple of gamma still vote together
  const std::vector<std::vector<Reconstruction>> wrap{{rec(699)}, {rec(702)}, {rec(1500)}};
  const auto w = vote_estimates(wrap, 1, 100.0, 1e6);
  CHECK(w.support[0] == 2);
  CHECK(w.estimates[0].Y_hat == doctest::Approx(700.5));
}

TEST_CASE("ties prefer consistency, then smaller values") {
  const std::vector<std::vector<Reconstruction>> groups{{rec(500, 100, 2)}, {rec(900, 100, 4)}};
  CHECK(vote_estimates(groups, 1, 100.0, 1e6).estimates[0].Y_hat == doctest::Approx(900));
  const std::vector<std::vector<Reconstruction>> even{{rec(500)}, {rec(900)}};
  CHECK(vote_estimates(even, 1, 100.0, 1e6).estimates[0].Y_hat == doctest::Approx(500));
}

TEST_CASE("too few buckets are padded and flagged") {
  const std::vector<std::vector<Reconstruction>> groups(3, {rec(757), rec(760)});
  const auto v = vote_estimates(groups, 2, 100.0, 1e6);
  CHECK(v.degenerate);
  REQUIRE(v.estimates.size() == 2);
  CHECK(v.estimates[1].Y_hat == v.estimates[0].Y_hat);
  CHECK_THROWS_AS(vote_estimates({}, 1, 100.0, 1e6), std::invalid_argument);
}

TEST_CASE("noiseless ensemble recovers every number") {
  auto ms = pair_range(3);
  Rng rng(6);
  for (int k = 0; k < 50; ++k) {
    const auto gt = sample_instance(ms, 3, rng);
    const auto obs = observe(gt, ms, rng);
    for (auto algo : {Algorithm::Algo1, Algorithm::Algo2}) {
      PipelineConfig cfg;
      cfg.algorithm = algo;
      const auto run = estimate_ensemble(obs.data, ms, cfg, EnsembleConfig{}, rng);
      std::vector<double> got, want(gt.Y.data(), gt.Y.data() + 3);
      for (const auto& e : run.estimates) got.push_back(e.Y_hat);
      std::sort(got.begin(), got.end());
      std::sort(want.begin(), want.end());
      for (int i = 0; i < 3; ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-9));
      if (algo == Algorithm::Algo2) CHECK(run.iterations.size() == 15);
    }
  }
}
