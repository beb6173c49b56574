#include "rcrt/reconstruct.hpp"

#include <cmath>
#include <stdexcept>

#include "rcrt/algo2.hpp"
#include "rcrt/circle.hpp"

namespace rcrt {

QuotientDigits quotient_digits(std::span<const double> R_row, double mu_hat,
                               const ModuliSet& ms) {
  const int L = ms.size();
  if (static_cast<int>(R_row.size()) != L)
    throw std::invalid_argument("quotient_digits: row length != number of moduli");
  const double gamma = ms.gamma;

  int across = 0;
  for (double R : R_row)
    if (mod_reduce(R, gamma) < mu_hat - gamma / 2) ++across;

  QuotientDigits out;
  out.lifted_mu = 2 * across > L ? mu_hat - gamma : mu_hat;
  out.q.moduli = ms.M;
  out.q.digits.resize(L);
  for (int l = 0; l < L; ++l) {
    const double steps = std::round((R_row[l] - out.lifted_mu) / gamma);
    const double M = static_cast<double>(ms.M[l]);
    out.q.digits[l] = static_cast<std::uint64_t>(mod_reduce(steps, M));
  }
  return out;
}

Reconstruction reconstruct_number(const QuotientDigits& digits, double mu_hat,
                                  const ModuliSet& ms, bool ec) {
  const WideUInt range = ms.quotient_range();
  Reconstruction out;
  out.mu_hat = mu_hat;
  out.q = digits.q;
  out.ec_used = ec;

  WideUInt Q = 0;
  if (ec) {
    // Noise can carry a number just below 0 or just past D, putting its
    // quotient at -1 or at `range`. Decode Q + 1 over two extra values and
    // wrap the result like Y wraps modulo D.
    ResidueVector shifted = digits.q;
    for (std::size_t l = 0; l < shifted.size(); ++l)
      shifted.digits[l] = (shifted.digits[l] + 1) % shifted.moduli[l];
    const WideUInt product = moduli_product(shifted.moduli);
    const WideUInt widened = range + 2 <= product ? range + 2 : product;
    const EcDecodeResult decoded = ec_decode(shifted, ms.L0, widened);
    Q = (decoded.Q + range - 1) % range;
    out.ec_consistency = decoded.consistency;
    out.ec_valid = decoded.valid;
  } else {
    Q = crt_solve(digits.q) % range;
    out.ec_consistency = static_cast<int>(digits.q.size());
  }
  out.Q = Q;
  out.Y_hat = mod_reduce(static_cast<double>(Q) * ms.gamma + digits.lifted_mu, ms.D);
  return out;
}

Reconstruction ec_reconstruct(std::span<const double> R_row, double mu_hat,
                              const ModuliSet& ms) {
  const int L = ms.size();
  auto decode = [&](double mu) {
    return reconstruct_number(quotient_digits(R_row, mu, ms), mu, ms, true);
  };
  Reconstruction best = decode(mu_hat);
  if (best.ec_consistency == L) return best;

  // Corrupted residues pull the mean. Referencing an honest residue instead
  // keeps every honest digit consistent, so try each residue in turn.
  for (int j = 0; j < L; ++j) {
    Reconstruction candidate = decode(mod_reduce(R_row[j], ms.gamma));
    if (candidate.ec_consistency > best.ec_consistency) best = std::move(candidate);
  }

  // Re-centre on the residues the decoded quotient agrees with. A wrapped
  // quotient agrees through its edge representative, -1 or `range`.
  const WideUInt range = ms.quotient_range();
  auto agreeing = [&](auto digit_of) {
    std::vector<Eigen::Index> out;
    for (int l = 0; l < L; ++l)
      if (digit_of(l) == best.q.digits[l]) out.push_back(l);
    return out;
  };
  std::vector<Eigen::Index> agree =
      agreeing([&](int l) { return static_cast<std::uint64_t>(best.Q % ms.M[l]); });
  if (best.Q == range - 1) {
    auto below = agreeing([&](int l) { return ms.M[l] - 1; });
    if (below.size() > agree.size()) agree = std::move(below);
  }
  if (best.Q == 0) {
    auto above = agreeing([&](int l) { return static_cast<std::uint64_t>(range % ms.M[l]); });
    if (above.size() > agree.size()) agree = std::move(above);
  }
  if (agree.empty() || static_cast<int>(agree.size()) == L) return best;
  Eigen::VectorXd common(static_cast<Eigen::Index>(agree.size()));
  Eigen::VectorXd w(common.size());
  for (Eigen::Index k = 0; k < common.size(); ++k) {
    common[k] = mod_reduce(R_row[agree[k]], ms.gamma);
    w[k] = ms.weights[agree[k]];
  }
  Reconstruction refined = decode(circular_weighted_mean(common, w, ms.gamma).mean);
  return refined.ec_consistency >= best.ec_consistency ? refined : best;
}

Reconstruction single_rcrt(std::span<const double> R_row, const ModuliSet& ms, bool ec) {
  Eigen::VectorXd common(static_cast<Eigen::Index>(R_row.size()));
  for (std::size_t l = 0; l < R_row.size(); ++l) common[l] = mod_reduce(R_row[l], ms.gamma);
  const double mu_hat = circular_weighted_mean(common, ms.weights, ms.gamma).mean;
  if (ec) return ec_reconstruct(R_row, mu_hat, ms);
  return reconstruct_number(quotient_digits(R_row, mu_hat, ms), mu_hat, ms, false);
}

std::vector<double> cluster_row(const Observations& obs,
                                const std::vector<Permutation>& K, int i) {
  std::vector<double> row(obs.l());
  for (int l = 0; l < obs.l(); ++l) row[l] = obs.R(K[l][i], l);
  return row;
}

std::vector<Reconstruction> reconstruct_clusters(const Observations& obs,
                                                 const std::vector<Permutation>& K,
                                                 const Eigen::VectorXd& mu_hat,
                                                 const ModuliSet& ms, bool ec) {
  if (static_cast<int>(K.size()) != obs.l() || obs.l() != ms.size())
    throw std::invalid_argument("reconstruct_clusters: sampler count mismatch");
  std::vector<Reconstruction> out;
  out.reserve(obs.n());
  for (int i = 0; i < obs.n(); ++i) {
    const auto row = cluster_row(obs, K, i);
    if (mu_hat.size() == 0)
      out.push_back(single_rcrt(row, ms, ec));
    else if (ec)
      out.push_back(ec_reconstruct(row, mu_hat[i], ms));
    else
      out.push_back(reconstruct_number(quotient_digits(row, mu_hat[i], ms), mu_hat[i], ms, false));
  }
  return out;
}

}  // namespace rcrt
