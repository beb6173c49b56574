// crt.hpp
// Integer CRT over pairwise-coprime moduli and a residue error-correcting
// decoder that tolerates a bounded number of corrupted digits.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rcrt {

/// Products of up to ~20 two-digit primes need more than 64 bits.
using WideUInt = unsigned __int128;

std::string to_string(WideUInt value);

struct ResidueVector {
  std::vector<std::uint64_t> digits;
  std::vector<std::uint64_t> moduli;

  std::size_t size() const { return moduli.size(); }

  /// Throws std::invalid_argument on length mismatch or digit >= modulus.
  void validate() const;
};

std::uint64_t gcd(std::uint64_t a, std::uint64_t b);
bool pairwise_coprime(const std::vector<std::uint64_t>& moduli);

/// Product of the moduli; throws if it does not fit in 126 bits.
WideUInt moduli_product(const std::vector<std::uint64_t>& moduli);

/// The unique Q < prod(moduli) with Q mod moduli[l] == digits[l].
WideUInt crt_solve(const ResidueVector& rv);

struct EcDecodeResult {
  WideUInt Q = 0;
  int consistency = 0;  ///< #{l : Q mod moduli[l] == digits[l]}
  bool valid = false;   ///< consistency >= L - floor((L - L0) / 2)
};

/// Decodes a residue vector with up to floor((L - L0) / 2) corrupted digits.
///
/// Every size-L0 subset of digits is solved by CRT; candidates below `range`
/// are scored by how many of the L digits they reproduce and the best one is
/// returned (ties go to the smaller Q). `range` defaults to the product of the
/// L0 smallest moduli. A larger range (up to the product of all moduli) is
/// accepted; values beyond that product are then only reachable through
/// subsets of larger moduli and the capacity guarantee no longer applies.
EcDecodeResult ec_decode(const ResidueVector& rv, int L0,
                         std::optional<WideUInt> range = std::nullopt);

}  // namespace rcrt
