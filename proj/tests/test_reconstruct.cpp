#include <doctest.h>

#include <random>

#include "rcrt/circle.hpp"
#include "rcrt/reconstruct.hpp"

using namespace rcrt;

namespace {

std::vector<double> noisy_row(double Y, const ModuliSet& ms, const std::vector<double>& delta) {
  std::vector<double> row(ms.size());
  for (int l = 0; l < ms.size(); ++l) row[l] = mod_reduce(Y + delta[l], ms.m[l]);
  return row;
}

}  // namespace

TEST_CASE("quotient digits") {
  const auto ms = make_moduli(100.0, {3, 5});
  const std::vector<double> row{157.0, 257.0};
  const auto d = quotient_digits(row, 57.0, ms);
  CHECK(d.q.digits == std::vector<std::uint64_t>{1, 2});
  CHECK(d.lifted_mu == 57.0);

  // across the wrap: mu_hat = 95 is lifted to -5
  const auto one = make_moduli(100.0, {3});
  const std::vector<double> r5{5.0};
  const auto w = quotient_digits(r5, 95.0, one);
  CHECK(w.lifted_mu == -5.0);
  CHECK(w.q.digits == std::vector<std::uint64_t>{0});

  // noiseless rows give floor(R / gamma)
  const auto big = make_moduli(100.0, {23, 29, 31});
  const std::vector<double> exact{1234.5, 2834.5, 34.5};
  const auto e = quotient_digits(exact, 34.5, big);
  CHECK(e.q.digits == std::vector<std::uint64_t>{12, 28, 0});

  CHECK_THROWS_AS(quotient_digits(r5, 10.0, ms), std::invalid_argument);
}

TEST_CASE("reconstruct_number") {
  const auto ms = make_moduli(100.0, {3, 5});
  const std::vector<double> row{157.0, 257.0};
  const auto rec = reconstruct_number(quotient_digits(row, 57.0, ms), 57.0, ms, false);
  CHECK(rec.Q == 7);
  CHECK(rec.Y_hat == doctest::Approx(757.0));

  const std::vector<double> zeros{0.0, 0.0};
  CHECK(reconstruct_number(quotient_digits(zeros, 0.0, ms), 0.0, ms, false).Y_hat == 0.0);

  // one corrupted digit of Q = 8 is corrected
  const auto ec_ms = make_moduli(100.0, {3, 5, 7, 11}, 100.0 * 15);
  QuotientDigits q;
  q.q = ResidueVector{{2, 3, 1, 9}, {3, 5, 7, 11}};
  q.lifted_mu = 20.0;
  const auto fixed = reconstruct_number(q, 20.0, ec_ms, true);
  CHECK(fixed.Q == 8);
  CHECK(fixed.ec_used);
  CHECK(fixed.ec_consistency == 3);
  CHECK(fixed.ec_valid);
  CHECK(fixed.Y_hat == doctest::Approx(820.0));
}

TEST_CASE("single_rcrt round trip") {
  const auto ms = make_moduli(100.0, {3, 5});
  const std::vector<double> row{157.0, 257.0};
  CHECK(single_rcrt(row, ms).Y_hat == doctest::Approx(757.0));

  const auto wide = build_moduli(3, 100.0);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> uni(0.0, wide.D);
  for (int k = 0; k < 1000; ++k) {
    const double Y = uni(rng);
    const auto rec = single_rcrt(noisy_row(Y, wide, std::vector<double>(6, 0.0)), wide);
    CHECK(std::abs(rec.Y_hat - Y) < 1e-6);
  }
}

TEST_CASE("error is bounded by the largest noise when the spread is small") {
  auto ms = build_moduli(2, 100.0);
  set_noise(ms, 8.0);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> uni(0.0, ms.D);
  std::normal_distribution<double> noise(0.0, 8.0);
  int tested = 0;
  for (int k = 0; k < 10000; ++k) {
    const double Y = uni(rng);
    std::vector<double> delta(ms.size());
    for (auto& d : delta) d = noise(rng);
    const auto [lo, hi] = std::minmax_element(delta.begin(), delta.end());
    if (*hi - *lo >= 50.0) continue;
    ++tested;
    const auto rec = single_rcrt(noisy_row(Y, ms, delta), ms);
    double worst = 0;
    for (double d : delta) worst = std::max(worst, std::abs(d));
    CHECK(circ_dist(rec.Y_hat, Y, ms.D) <= worst + 1e-9);
  }
  CHECK(tested > 9000);
}

TEST_CASE("error correction tolerates displaced residues") {
  // L = 6, L0 = 2: two residues may be arbitrarily wrong
  auto ms = make_moduli(100.0, primes_from(21, 6), 100.0 * 23 * 29);
  set_noise(ms, 3.0);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> uni(0.0, ms.D), junk(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 3.0);
  for (int k = 0; k < 2000; ++k) {
    const double Y = uni(rng);
    std::vector<double> delta(6);
    for (auto& d : delta) d = noise(rng);
    auto row = noisy_row(Y, ms, delta);
    std::vector<int> idx{0, 1, 2, 3, 4, 5};
    std::shuffle(idx.begin(), idx.end(), rng);
    const int bad = static_cast<int>(rng() % 3);
    for (int e = 0; e < bad; ++e) row[idx[e]] = junk(rng) * ms.m[idx[e]];
    // spread of the honest residues stays well below gamma / 2
    const auto rec = single_rcrt(row, ms, true);
    CHECK(circ_dist(rec.Y_hat, Y, ms.D) <= 75.0);
  }
}

TEST_CASE("cluster_row and reconstruct_clusters") {
  const auto ms = make_moduli(100.0, {3, 5});
  // Y = 757 and Y = 1320, rows shuffled in the first sampler
  Eigen::MatrixXd R(2, 2);
  R << 120.0, 257.0, 157.0, 320.0;
  const auto obs = make_observations(R, 100.0);
  const std::vector<Permutation> K{{1, 0}, {0, 1}};
  CHECK(cluster_row(obs, K, 0) == std::vector<double>{157.0, 257.0});
  const auto recs = reconstruct_clusters(obs, K, Eigen::VectorXd(), ms, false);
  REQUIRE(recs.size() == 2);
  CHECK(recs[0].Y_hat == doctest::Approx(757.0));
  CHECK(recs[1].Y_hat == doctest::Approx(1320.0));
  Eigen::VectorXd mu(2);
  mu << 57.0, 20.0;
  const auto with_mu = reconstruct_clusters(obs, K, mu, ms, false);
  CHECK(with_mu[1].Y_hat == doctest::Approx(1320.0));
  CHECK_THROWS_AS(reconstruct_clusters(obs, {{0, 1}}, mu, ms, false), std::invalid_argument);
}

TEST_CASE("error correction near the ends of the dynamic range") {
  auto ms = make_moduli(100.0, {23, 29, 31, 37}, 100.0 * 23 * 29);
  set_noise(ms, 1.78);
  // Y = 66698.93 pushed past D = 66700 by noise, second residue corrupted
  const std::vector<double> top{2.9483, 2009.2690, 1598.1033, 100.4371};
  const auto hi = single_rcrt(top, ms, true);
  CHECK(circ_dist(hi.Y_hat, 66698.9301, ms.D) < 5.0);
  CHECK(hi.ec_consistency == 3);

  // Y = 1 pulled below zero: every residue sits just under its modulus
  std::vector<double> bottom;
  for (double m : ms.m) bottom.push_back(m - 2.0);
  bottom[2] = 1234.5;
  const auto lo = single_rcrt(bottom, ms, true);
  CHECK(lo.Y_hat == doctest::Approx(ms.D - 2.0));
  CHECK(lo.ec_valid);
}
