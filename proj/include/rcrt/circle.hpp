// circle.hpp
// Modular reduction and distances on the circle R / (gamma Z).
#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rcrt {

/// <x>_m, the representative of x in [0, m).
template <typename Scalar>
Scalar mod_reduce(Scalar x, Scalar m) {
  if (!std::isfinite(x) || !std::isfinite(m) || !(m > Scalar(0)))
    throw std::invalid_argument("mod_reduce: need finite x and m > 0");
  Scalar r = x - m * std::floor(x / m);
  // floor() can land one ulp short of the period for tiny negative x
  if (r >= m) r -= m;
  if (r < Scalar(0)) r = Scalar(0);
  return r;
}

/// Signed offset a - b wrapped into [-gamma/2, gamma/2).
template <typename Scalar>
Scalar circ_offset(Scalar a, Scalar b, Scalar gamma) {
  Scalar d = mod_reduce(a - b, gamma);
  return d >= gamma / 2 ? d - gamma : d;
}

/// d_gamma(a, b) = min_j |a - b + j gamma|, always in [0, gamma/2].
template <typename Scalar>
Scalar circ_dist(Scalar a, Scalar b, Scalar gamma) {
  if (!(gamma > Scalar(0)))
    throw std::invalid_argument("circ_dist: gamma must be positive");
  Scalar d = mod_reduce(a - b, gamma);
  return std::min(d, gamma - d);
}

/// A point on the small circle modulo gamma.
template <typename Scalar>
class CircularValue {
 public:
  CircularValue(Scalar value, Scalar gamma)
      : value_(mod_reduce(value, gamma)), gamma_(gamma) {}

  Scalar value() const { return value_; }
  Scalar gamma() const { return gamma_; }

  Scalar distance(const CircularValue& other) const {
    return circ_dist(value_, other.value_, gamma_);
  }

 private:
  Scalar value_;
  Scalar gamma_;
};

}  // namespace rcrt
