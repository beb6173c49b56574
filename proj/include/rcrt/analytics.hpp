// analytics.hpp
// Closed-form success probabilities for the noise-span condition and the
// majority-vote Chernoff bound.
#pragma once

namespace rcrt {

double normal_cdf(double z);

/// (Phi(delta/sigma) - Phi(-delta/sigma))^(N (L - 1)).
double bound_span_prob(double sigma, double delta, int N, int L);

/// Probability that for each of N numbers the L i.i.d. N(0, sigma^2) errors
/// span less than 2 delta:
///   ( integral L phi(z) (Phi(z + 2 delta / sigma) - Phi(z))^(L-1) dz )^N,
/// where L phi(z) (1 - Phi(z))^(L-1) is the density of the minimum and the
/// bracket is the chance the other L-1 errors land in [min, min + 2 delta).
double exact_span_prob(double sigma, double delta, int N, int L);

/// 1 - exp(-kappa (p - 1/2)^2 / (2 p)); requires p > 1/2.
double chernoff_success(double p, int kappa);

}  // namespace rcrt
