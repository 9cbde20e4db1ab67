#pragma once

#include <cstdint>
#include <vector>

#include "moment_forge/numeric.hpp"

namespace mforge::chars {

bool is_prime(std::int64_t n);
// Least prime factor of n >= 2.
std::int64_t smallest_factor(std::int64_t n);
std::int64_t mod_pow(std::int64_t base, std::int64_t exp, std::int64_t mod);
std::int64_t mod_inverse(std::int64_t a, std::int64_t q);
inline std::int64_t mod_reduce(std::int64_t a, std::int64_t q) {
  std::int64_t r = a % q;
  return r < 0 ? r + q : r;
}

// Throws UsageError naming a witness factor when q is not an odd prime.
std::int64_t primitive_root(std::int64_t q);

class PrimeModulus {
 public:
  explicit PrimeModulus(std::int64_t q);
  std::int64_t q() const { return q_; }
  std::int64_t g() const { return g_; }
  std::int64_t phi() const { return q_ - 1; }

 private:
  std::int64_t q_;
  std::int64_t g_;
};

enum class Parity { even, odd, all };
enum class Sign : int { plus = 1, minus = -1 };

inline constexpr Sign kSigns[2] = {Sign::plus, Sign::minus};
inline std::int64_t sign_value(Sign s) { return static_cast<std::int64_t>(s); }

// chi_j(a) = e(j * dlog(a) / (q-1)), j = 0..q-2.
class CharacterTable {
 public:
  explicit CharacterTable(std::int64_t q);

  const PrimeModulus& modulus() const { return mod_; }
  std::int64_t q() const { return mod_.q(); }
  std::int64_t phi() const { return mod_.phi(); }
  std::int64_t root_of_unity_order() const { return mod_.phi(); }

  // Index k with g^k = a (mod q). Throws UsageError for non-units.
  std::int64_t dlog(std::int64_t a) const;
  // chi_j(a); 0 when q | a.
  Complex value(int j, std::int64_t a) const;
  // e(k / (q-1))
  const Complex& root(std::int64_t k) const { return roots_[static_cast<std::size_t>(mod_reduce(k, phi()))]; }

  bool is_principal(int j) const { return j == 0; }
  bool is_even(int j) const { return j % 2 == 0; }
  bool is_primitive(int j) const { return j != 0; }
  int conjugate(int j) const { return static_cast<int>((phi() - j) % phi()); }
  int character_count() const { return static_cast<int>(phi()); }

 private:
  void check_index(int j) const;

  PrimeModulus mod_;
  std::vector<std::int32_t> dlog_;  // indexed by residue; -1 at 0
  std::vector<Complex> roots_;
};

std::vector<int> enumerate_characters(const CharacterTable& table, Parity parity, bool primitive_only);

// Sum over units a of chi_j(a) e(a/q).
Complex gauss_sum(const CharacterTable& table, int j);

struct GaussProduct {
  Complex lhs;  // tau(conj chi) tau(chi)
  double rhs;   // q
};
// Rejects odd or principal characters.
GaussProduct gauss_product_identity(const CharacterTable& table, int j);

// S(a,b;q) = sum over units x of e((a x + b xbar)/q).
double kloosterman(std::int64_t a, std::int64_t b, std::int64_t q);

struct IdentityValue {
  Complex direct;
  Complex closed;
  double gap() const { return std::abs(direct - closed); }
};

// Direct routes sum over characters; closed routes evaluate the reduced
// formulas. Each rejects (mn, q) > 1.
IdentityValue orthogonality_sum(const CharacterTable& table, std::int64_t m, std::int64_t n);
IdentityValue gauss_twisted_sum(const CharacterTable& table, std::int64_t m, std::int64_t n, Sign sign);
IdentityValue inverse_twisted_sum(const CharacterTable& table, std::int64_t m, std::int64_t n, Sign sign);
IdentityValue gauss_square_identity(const CharacterTable& table, std::int64_t m, std::int64_t n);

// The closed kernels alone, with no character summation.
namespace closed {
double orthogonality(std::int64_t q, std::int64_t m, std::int64_t n);
Complex gauss_twisted(std::int64_t q, std::int64_t m, std::int64_t n, Sign sign);
Complex inverse_twisted(std::int64_t q, std::int64_t m, std::int64_t n, Sign sign);
double gauss_square(std::int64_t q, std::int64_t m, std::int64_t n);

// Table of S(1, k; q) for k = 0..q-1, so gauss_square can be read off in O(1).
class KloostermanTable {
 public:
  explicit KloostermanTable(std::int64_t q);
  double s1(std::int64_t k) const { return values_[static_cast<std::size_t>(mod_reduce(k, q_))]; }
  double gauss_square(std::int64_t m, std::int64_t n) const;

 private:
  std::int64_t q_;
  std::vector<double> values_;
};
}  // namespace closed

void require_coprime(std::int64_t q, std::int64_t m, std::int64_t n);

// Gaps |direct - closed| of all four identities recomputed with `digits10`
// significant decimal digits.
struct HighPrecisionGaps {
  double orthogonality = 0;
  double gauss_twisted[2] = {0, 0};    // +, -
  double inverse_twisted[2] = {0, 0};  // +, -
  double gauss_square = 0;
  unsigned digits10 = 0;
  double max_gap() const;
};
HighPrecisionGaps high_precision_gaps(std::int64_t q, std::int64_t m, std::int64_t n, unsigned digits10);

}  // namespace mforge::chars
