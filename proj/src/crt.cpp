#include "rcrt/crt.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace rcrt {

std::string to_string(WideUInt value) {
  if (value == 0) return "0";
  std::string out;
  while (value > 0) {
    out.push_back(static_cast<char>('0' + static_cast<int>(value % 10)));
    value /= 10;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

void ResidueVector::validate() const {
  if (digits.size() != moduli.size())
    throw std::invalid_argument("ResidueVector: digits/moduli length mismatch");
  for (std::size_t l = 0; l < moduli.size(); ++l) {
    if (moduli[l] == 0)
      throw std::invalid_argument("ResidueVector: zero modulus");
    if (digits[l] >= moduli[l])
      throw std::invalid_argument("ResidueVector: digit out of range");
  }
}

std::uint64_t gcd(std::uint64_t a, std::uint64_t b) { return std::gcd(a, b); }

bool pairwise_coprime(const std::vector<std::uint64_t>& moduli) {
  for (std::size_t a = 0; a < moduli.size(); ++a)
    for (std::size_t b = a + 1; b < moduli.size(); ++b)
      if (gcd(moduli[a], moduli[b]) != 1) return false;
  return true;
}

WideUInt moduli_product(const std::vector<std::uint64_t>& moduli) {
  constexpr WideUInt limit = WideUInt(1) << 126;
  WideUInt p = 1;
  for (auto m : moduli) {
    if (m != 0 && p > limit / m)
      throw std::invalid_argument("moduli product exceeds 126 bits");
    p *= m;
  }
  return p;
}

namespace {

// Inverse of a modulo m via extended Euclid; a and m coprime.
std::uint64_t inverse_mod(std::uint64_t a, std::uint64_t m) {
  __int128 t = 0, new_t = 1;
  __int128 r = m, new_r = a % m;
  while (new_r != 0) {
    __int128 q = r / new_r;
    __int128 tmp = t - q * new_t;
    t = new_t;
    new_t = tmp;
    tmp = r - q * new_r;
    r = new_r;
    new_r = tmp;
  }
  if (t < 0) t += m;
  return static_cast<std::uint64_t>(t);
}

// Incremental (Garner-style) CRT over the selected positions.
WideUInt solve_positions(const ResidueVector& rv,
                         const std::vector<std::size_t>& positions) {
  WideUInt x = 0;
  WideUInt p = 1;
  for (auto idx : positions) {
    const std::uint64_t m = rv.moduli[idx];
    const std::uint64_t d = rv.digits[idx];
    const std::uint64_t x_mod = static_cast<std::uint64_t>(x % m);
    const std::uint64_t p_mod = static_cast<std::uint64_t>(p % m);
    const std::uint64_t diff = (d + m - x_mod) % m;
    const WideUInt t =
        (WideUInt(diff) * inverse_mod(p_mod, m)) % m;
    x += p * t;
    p *= m;
  }
  return x;
}

}  // namespace

WideUInt crt_solve(const ResidueVector& rv) {
  rv.validate();
  if (!pairwise_coprime(rv.moduli))
    throw std::invalid_argument("crt_solve: moduli are not pairwise coprime");
  moduli_product(rv.moduli);  // overflow guard
  std::vector<std::size_t> all(rv.size());
  std::iota(all.begin(), all.end(), 0);
  return solve_positions(rv, all);
}

EcDecodeResult ec_decode(const ResidueVector& rv, int L0,
                         std::optional<WideUInt> range) {
  rv.validate();
  const int L = static_cast<int>(rv.size());
  if (L0 < 1 || L0 > L)
    throw std::invalid_argument("ec_decode: need 1 <= L0 <= L");
  if (!pairwise_coprime(rv.moduli))
    throw std::invalid_argument("ec_decode: moduli are not pairwise coprime");

  std::vector<std::uint64_t> sorted = rv.moduli;
  std::sort(sorted.begin(), sorted.end());
  const WideUInt min_subset_product =
      moduli_product({sorted.begin(), sorted.begin() + L0});
  const WideUInt limit = range.value_or(min_subset_product);
  if (limit == 0 || limit > moduli_product(rv.moduli))
    throw std::invalid_argument("ec_decode: range must be in [1, prod(moduli)]");

  auto consistency = [&](WideUInt Q) {
    int hits = 0;
    for (int l = 0; l < L; ++l)
      if (static_cast<std::uint64_t>(Q % rv.moduli[l]) == rv.digits[l]) ++hits;
    return hits;
  };

  EcDecodeResult best;
  bool have = false;
  std::vector<std::size_t> subset(L0);
  std::iota(subset.begin(), subset.end(), 0);
  while (true) {
    const WideUInt Q = solve_positions(rv, subset);
    if (Q < limit) {
      const int c = consistency(Q);
      if (!have || c > best.consistency || (c == best.consistency && Q < best.Q)) {
        best.Q = Q;
        best.consistency = c;
        have = true;
      }
    }
    // next combination in lexicographic order
    int i = L0 - 1;
    while (i >= 0 && subset[i] == static_cast<std::size_t>(L - L0 + i)) --i;
    if (i < 0) break;
    ++subset[i];
    for (int j = i + 1; j < L0; ++j) subset[j] = subset[j - 1] + 1;
  }

  best.valid = have && best.consistency >= L - (L - L0) / 2;
  return best;
}

}  // namespace rcrt
