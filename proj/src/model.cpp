#include "rcrt/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "rcrt/circle.hpp"

namespace rcrt {

namespace {

double scaled_product(double gamma, const std::vector<std::uint64_t>& M,
                      std::size_t count) {
  double p = gamma;
  for (std::size_t l = 0; l < count; ++l) p *= static_cast<double>(M[l]);
  return p;
}

bool covers(double product, double D) { return product >= D * (1.0 - 1e-12); }

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

}  // namespace

WideUInt ModuliSet::quotient_range() const {
  const double full = scaled_product(gamma, M, M.size());
  if (covers(D, full)) return moduli_product(M);
  return static_cast<WideUInt>(std::floor(D / gamma + 1e-9));
}

ModuliSet ModuliSet::subset(std::span<const int> indices) const {
  std::vector<std::uint64_t> sub;
  for (int idx : indices) sub.push_back(M.at(idx));
  std::vector<int> order(indices.begin(), indices.end());
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return M[a] < M[b]; });
  ModuliSet out = make_moduli(gamma, sub, std::nullopt);
  // make_moduli sorts ascending; carry noise along in the same order
  out.sigma.resize(out.size());
  out.weights.resize(out.size());
  for (int l = 0; l < out.size(); ++l) {
    out.sigma[l] = sigma[order[l]];
    out.weights[l] = weights[order[l]];
  }
  set_dynamic_range(out, D);
  return out;
}

ModuliSet make_moduli(double gamma, std::vector<std::uint64_t> M,
                      std::optional<double> D) {
  if (!(gamma > 0) || !std::isfinite(gamma))
    throw std::invalid_argument("moduli: gamma must be positive");
  if (M.empty()) throw std::invalid_argument("moduli: empty moduli list");
  for (auto v : M)
    if (v == 0) throw std::invalid_argument("moduli: zero modulus");
  if (!pairwise_coprime(M))
    throw std::invalid_argument("moduli: M_l must be pairwise coprime");
  std::sort(M.begin(), M.end());

  ModuliSet ms;
  ms.gamma = gamma;
  ms.M = std::move(M);
  ms.m.resize(ms.size());
  for (int l = 0; l < ms.size(); ++l)
    ms.m[l] = gamma * static_cast<double>(ms.M[l]);
  ms.sigma = Eigen::VectorXd::Zero(ms.size());
  ms.weights = Eigen::VectorXd::Ones(ms.size());
  set_dynamic_range(ms, D.value_or(scaled_product(gamma, ms.M, ms.M.size())));
  return ms;
}

void set_dynamic_range(ModuliSet& ms, double D) {
  const double full = scaled_product(ms.gamma, ms.M, ms.M.size());
  if (!(D > 0) || !covers(full, D))
    throw std::invalid_argument("moduli: need 0 < D <= gamma * prod(M)");
  ms.D = D;
  ms.L0 = ms.size();
  for (int l0 = 1; l0 <= ms.size(); ++l0) {
    if (covers(scaled_product(ms.gamma, ms.M, l0), D)) {
      ms.L0 = l0;
      break;
    }
  }
}

void set_noise(ModuliSet& ms, double sigma) {
  if (!(sigma >= 0) || !std::isfinite(sigma))
    throw std::invalid_argument("set_noise: sigma must be finite and >= 0");
  ms.sigma = Eigen::VectorXd::Constant(ms.size(), sigma);
  ms.weights = sigma > 0
                   ? Eigen::VectorXd::Constant(ms.size(), 1.0 / (2.0 * sigma * sigma))
                   : Eigen::VectorXd::Ones(ms.size());
}

std::vector<std::uint64_t> primes_from(std::uint64_t start, int count) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t n = start; static_cast<int>(out.size()) < count; ++n)
    if (is_prime(n)) out.push_back(n);
  return out;
}

ModuliSet build_moduli(int N, double gamma, const PrimePolicy& policy) {
  if (N < 1) throw std::invalid_argument("build_moduli: N must be >= 1");
  const int L = policy.count.value_or(2 * N);
  if (L < 1) throw std::invalid_argument("build_moduli: L must be >= 1");
  ModuliSet ms = make_moduli(gamma, primes_from(policy.start, L));
  if (policy.lmin) {
    if (*policy.lmin < 1 || *policy.lmin > L)
      throw std::invalid_argument("build_moduli: lmin must be in [1, L]");
    set_dynamic_range(ms, scaled_product(gamma, ms.M, *policy.lmin));
  }
  return ms;
}

double NoiseSpec::sigma() const {
  if (std::isinf(snr_db) && snr_db > 0) return 0.0;
  if (!std::isfinite(snr_db))
    throw std::invalid_argument("NoiseSpec: SNR must be finite or +inf");
  return std::sqrt(std::pow(10.0, -snr_db / 10.0));
}

GroundTruth make_ground_truth(const Eigen::VectorXd& Y, double gamma) {
  GroundTruth gt;
  gt.Y = Y;
  gt.mu.resize(Y.size());
  gt.k.resize(Y.size());
  for (Eigen::Index i = 0; i < Y.size(); ++i) {
    gt.k[i] = static_cast<std::int64_t>(std::floor(Y[i] / gamma));
    gt.mu[i] = Y[i] - static_cast<double>(gt.k[i]) * gamma;
    if (gt.mu[i] >= gamma) {  // floor rounding at exact multiples
      gt.mu[i] -= gamma;
      ++gt.k[i];
    }
  }
  return gt;
}

GroundTruth sample_instance(const ModuliSet& ms, int N, Rng& rng) {
  if (N < 1) throw std::invalid_argument("sample_instance: N must be >= 1");
  std::uniform_real_distribution<double> uniform(0.0, ms.D);
  Eigen::VectorXd Y(N);
  for (int i = 0; i < N; ++i) Y[i] = uniform(rng);
  return make_ground_truth(Y, ms.gamma);
}

Observations Observations::columns(std::span<const int> indices) const {
  Observations out;
  out.R.resize(R.rows(), static_cast<Eigen::Index>(indices.size()));
  out.r.resize(r.rows(), static_cast<Eigen::Index>(indices.size()));
  for (std::size_t c = 0; c < indices.size(); ++c) {
    out.R.col(c) = R.col(indices[c]);
    out.r.col(c) = r.col(indices[c]);
  }
  return out;
}

Observations make_observations(const Eigen::MatrixXd& R, double gamma) {
  Observations obs;
  obs.R = R;
  obs.r = R.unaryExpr([gamma](double x) { return mod_reduce(x, gamma); });
  return obs;
}

ObservationSet observe(const GroundTruth& gt, const ModuliSet& ms, Rng& rng) {
  const int N = gt.size();
  const int L = ms.size();
  std::normal_distribution<double> normal(0.0, 1.0);

  ObservationSet out;
  out.delta.resize(N, L);
  for (int l = 0; l < L; ++l)
    for (int i = 0; i < N; ++i) out.delta(i, l) = ms.sigma[l] * normal(rng);

  Eigen::MatrixXd R(N, L);
  out.true_perm.resize(L);
  for (int l = 0; l < L; ++l) {
    Permutation& perm = out.true_perm[l];
    perm.resize(N);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    for (int i = 0; i < N; ++i)
      R(perm[i], l) = mod_reduce(gt.Y[i] + out.delta(i, l), ms.m[l]);
  }
  out.data = make_observations(R, ms.gamma);
  return out;
}

ObservationSet observe(const GroundTruth& gt, ModuliSet ms,
                       const NoiseSpec& noise, Rng& rng) {
  set_noise(ms, noise.sigma());
  return observe(gt, ms, rng);
}

std::string to_json(const ModuliSet& ms, const Observations& obs) {
  nlohmann::json j;
  j["gamma"] = ms.gamma;
  j["M"] = ms.M;
  j["D"] = ms.D;
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < obs.n(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int l = 0; l < obs.l(); ++l) row.push_back(obs.R(i, l));
    rows.push_back(std::move(row));
  }
  j["R"] = std::move(rows);
  if (ms.sigma.size() > 0 && ms.sigma.maxCoeff() > 0)
    j["sigma"] = std::vector<double>(ms.sigma.data(),
                                     ms.sigma.data() + ms.sigma.size());
  return j.dump(2);
}

ObservationFile observations_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("observation file: ") + e.what());
  }
  for (const char* key : {"gamma", "M", "R"})
    if (!j.contains(key))
      throw std::invalid_argument(std::string("observation file: missing '") +
                                  key + "'");

  const double gamma = j.at("gamma").get<double>();
  const auto M_in = j.at("M").get<std::vector<std::uint64_t>>();
  const auto rows = j.at("R").get<std::vector<std::vector<double>>>();
  if (rows.empty())
    throw std::invalid_argument("observation file: R has no rows");

  // R columns follow the file's M order; moduli sets are kept ascending.
  std::vector<int> order(M_in.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return M_in[a] < M_in[b]; });

  std::optional<double> D;
  if (j.contains("D")) D = j.at("D").get<double>();
  ObservationFile out;
  out.moduli = make_moduli(gamma, M_in, D);
  if (j.contains("sigma")) {
    const auto s = j.at("sigma").get<std::vector<double>>();
    if (s.size() != M_in.size())
      throw std::invalid_argument("observation file: sigma length != M length");
    if (std::adjacent_find(s.begin(), s.end(), std::not_equal_to<>()) == s.end()) {
      set_noise(out.moduli, s.front());
    } else {
      for (int l = 0; l < out.moduli.size(); ++l) {
        const double sl = s[order[l]];
        out.moduli.sigma[l] = sl;
        out.moduli.weights[l] = sl > 0 ? 1.0 / (2.0 * sl * sl) : 1.0;
      }
    }
  }

  const int N = static_cast<int>(rows.size());
  const int L = static_cast<int>(M_in.size());
  Eigen::MatrixXd R(N, L);
  for (int i = 0; i < N; ++i) {
    if (static_cast<int>(rows[i].size()) != L)
      throw std::invalid_argument("observation file: row length != M length");
    for (int l = 0; l < L; ++l) {
      const double v = rows[i][order[l]];
      if (!(v >= 0) || !(v < out.moduli.m[l]))
        throw std::invalid_argument("observation file: residue outside [0, m_l)");
      R(i, l) = v;
    }
  }
  out.data = make_observations(R, gamma);
  return out;
}

}  // namespace rcrt
