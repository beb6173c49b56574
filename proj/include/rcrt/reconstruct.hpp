// reconstruct.hpp
// From one clustered residue row and a common-residue estimate to the final
// number: quotient digits, CRT (optionally error-corrected), Y = Q gamma + mu.
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rcrt/crt.hpp"
#include "rcrt/model.hpp"

namespace rcrt {

struct QuotientDigits {
  ResidueVector q;
  /// mu_hat or mu_hat - gamma; the quotient digits are relative to this value.
  double lifted_mu = 0.0;
};

/// q_l = < round((R_l - mu~) / gamma) >_{M_l} with one lift mu~ of mu_hat for
/// the whole row. mu~ = mu_hat - gamma when most of the row's common residues
/// sit across the wrap below mu_hat (r_l < mu_hat - gamma / 2), else mu_hat.
QuotientDigits quotient_digits(std::span<const double> R_row, double mu_hat,
                               const ModuliSet& ms);

struct Reconstruction {
  double mu_hat = 0.0;
  ResidueVector q;
  WideUInt Q = 0;
  double Y_hat = 0.0;
  bool ec_used = false;
  int ec_consistency = 0;
  bool ec_valid = true;  ///< false when error correction flagged the decode unreliable
};

/// Y_hat = < Q gamma + mu~ >_D. Without error correction Q is the CRT of all
/// digits reduced modulo floor(D / gamma); with it Q comes from ec_decode.
Reconstruction reconstruct_number(const QuotientDigits& digits, double mu_hat,
                                  const ModuliSet& ms, bool ec);

/// Error-corrected reconstruction starting from mu_hat. When some digits
/// disagree, every residue is also tried as the reference point and the most
/// consistent decode wins; mu_hat is then re-estimated from the residues that
/// agree with the decoded quotient.
Reconstruction ec_reconstruct(std::span<const double> R_row, double mu_hat,
                              const ModuliSet& ms);

/// Single-number robust CRT: circular weighted mean of the row's common
/// residues, then quotient digits and reconstruction.
Reconstruction single_rcrt(std::span<const double> R_row, const ModuliSet& ms,
                           bool ec = false);

/// Reconstructs every cluster of a classification. mu_hat may be empty, in
/// which case each cluster's common residue is re-estimated from its row.
std::vector<Reconstruction> reconstruct_clusters(const Observations& obs,
                                                 const std::vector<Permutation>& K,
                                                 const Eigen::VectorXd& mu_hat,
                                                 const ModuliSet& ms, bool ec);

/// The residues of cluster i, one per sampler.
std::vector<double> cluster_row(const Observations& obs,
                                const std::vector<Permutation>& K, int i);

}  // namespace rcrt
