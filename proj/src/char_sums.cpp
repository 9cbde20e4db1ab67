#include "moment_forge/char_sums.hpp"

#include <algorithm>
#include <array>
#include <string>
#include <tuple>

#include "moment_forge/error.hpp"

namespace mforge::chars {

namespace {

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

std::uint64_t pow_mod_u(std::uint64_t b, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1 % m;
  b %= m;
  while (e) {
    if (e & 1) r = mul_mod(r, b, m);
    b = mul_mod(b, b, m);
    e >>= 1;
  }
  return r;
}

}  // namespace

bool is_prime(std::int64_t n) {
  if (n < 2) return false;
  for (std::int64_t p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    if (n % p == 0) return n == p;
  }
  const auto un = static_cast<std::uint64_t>(n);
  std::uint64_t d = un - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  // These witnesses are deterministic for all 64-bit n.
  for (std::uint64_t a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    std::uint64_t x = pow_mod_u(a, d, un);
    if (x == 1 || x == un - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mul_mod(x, x, un);
      if (x == un - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

std::int64_t smallest_factor(std::int64_t n) {
  if (n % 2 == 0) return 2;
  for (std::int64_t p = 3; p * p <= n; p += 2) {
    if (n % p == 0) return p;
  }
  return n;
}

std::int64_t mod_pow(std::int64_t base, std::int64_t exp, std::int64_t mod) {
  return static_cast<std::int64_t>(
      pow_mod_u(static_cast<std::uint64_t>(mod_reduce(base, mod)), static_cast<std::uint64_t>(exp),
                static_cast<std::uint64_t>(mod)));
}

std::int64_t mod_inverse(std::int64_t a, std::int64_t q) {
  std::int64_t r0 = q, r1 = mod_reduce(a, q);
  std::int64_t t0 = 0, t1 = 1;
  while (r1 != 0) {
    const std::int64_t k = r0 / r1;
    std::tie(r0, r1) = std::make_pair(r1, r0 - k * r1);
    std::tie(t0, t1) = std::make_pair(t1, t0 - k * t1);
  }
  if (r0 != 1) {
    throw UsageError(std::to_string(a) + " is not invertible modulo " + std::to_string(q));
  }
  return mod_reduce(t0, q);
}

std::int64_t primitive_root(std::int64_t q) {
  if (q < 3) throw UsageError("modulus must be a prime >= 3, got " + std::to_string(q));
  if (!is_prime(q)) {
    throw UsageError("modulus " + std::to_string(q) + " is not prime: divisible by " +
                     std::to_string(smallest_factor(q)));
  }
  const std::int64_t phi = q - 1;
  std::vector<std::int64_t> prime_divisors;
  std::int64_t rest = phi;
  for (std::int64_t p = 2; p * p <= rest; ++p) {
    if (rest % p == 0) {
      prime_divisors.push_back(p);
      while (rest % p == 0) rest /= p;
    }
  }
  if (rest > 1) prime_divisors.push_back(rest);
  for (std::int64_t g = 2; g < q; ++g) {
    bool generator = true;
    for (std::int64_t p : prime_divisors) {
      if (mod_pow(g, phi / p, q) == 1) {
        generator = false;
        break;
      }
    }
    if (generator) return g;
  }
  throw NumericError("no primitive root found for " + std::to_string(q));
}

PrimeModulus::PrimeModulus(std::int64_t q) : q_(q), g_(primitive_root(q)) {}

CharacterTable::CharacterTable(std::int64_t q) : mod_(q) {
  if (q > (std::int64_t{1} << 30)) throw UsageError("modulus too large for a character table");
  dlog_.assign(static_cast<std::size_t>(q), -1);
  std::int64_t a = 1;
  for (std::int64_t k = 0; k < phi(); ++k) {
    dlog_[static_cast<std::size_t>(a)] = static_cast<std::int32_t>(k);
    a = a * mod_.g() % q;
  }
  roots_.resize(static_cast<std::size_t>(phi()));
  for (std::int64_t k = 0; k < phi(); ++k) roots_[static_cast<std::size_t>(k)] = e_frac(k, phi());
}

std::int64_t CharacterTable::dlog(std::int64_t a) const {
  const std::int64_t r = mod_reduce(a, q());
  if (r == 0) throw UsageError(std::to_string(a) + " is not a unit modulo " + std::to_string(q()));
  return dlog_[static_cast<std::size_t>(r)];
}

void CharacterTable::check_index(int j) const {
  if (j < 0 || j >= phi()) {
    throw UsageError("character index " + std::to_string(j) + " outside 0.." + std::to_string(phi() - 1));
  }
}

Complex CharacterTable::value(int j, std::int64_t a) const {
  check_index(j);
  const std::int64_t r = mod_reduce(a, q());
  if (r == 0) return {0.0, 0.0};
  return root(static_cast<std::int64_t>(j) * dlog_[static_cast<std::size_t>(r)]);
}

std::vector<int> enumerate_characters(const CharacterTable& table, Parity parity, bool primitive_only) {
  std::vector<int> out;
  for (int j = 0; j < table.character_count(); ++j) {
    if (primitive_only && !table.is_primitive(j)) continue;
    if (parity == Parity::even && !table.is_even(j)) continue;
    if (parity == Parity::odd && table.is_even(j)) continue;
    out.push_back(j);
  }
  return out;
}

Complex gauss_sum(const CharacterTable& table, int j) {
  std::vector<Complex> terms;
  terms.reserve(static_cast<std::size_t>(table.phi()));
  for (std::int64_t a = 1; a < table.q(); ++a) terms.push_back(table.value(j, a) * e_frac(a, table.q()));
  return pairwise_sum(terms);
}

GaussProduct gauss_product_identity(const CharacterTable& table, int j) {
  if (table.is_principal(j) || !table.is_even(j)) {
    throw UsageError("tau(conj chi) tau(chi) = q is stated for even primitive characters; index " +
                     std::to_string(j) + " is " + (table.is_principal(j) ? "principal" : "odd"));
  }
  return {gauss_sum(table, table.conjugate(j)) * gauss_sum(table, j), static_cast<double>(table.q())};
}

double kloosterman(std::int64_t a, std::int64_t b, std::int64_t q) {
  if (!is_prime(q)) throw UsageError("Kloosterman modulus " + std::to_string(q) + " is not prime");
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(q - 1));
  for (std::int64_t x = 1; x < q; ++x) {
    const std::int64_t arg = mod_reduce(mod_reduce(a, q) * x + mod_reduce(b, q) * mod_inverse(x, q), q);
    terms.push_back(e_frac(arg, q).real());
  }
  return pairwise_sum(terms);
}

void require_coprime(std::int64_t q, std::int64_t m, std::int64_t n) {
  if (mod_reduce(m, q) == 0 || mod_reduce(n, q) == 0) {
    throw UsageError("identity requires (mn, q) = 1; got m=" + std::to_string(m) + ", n=" + std::to_string(n) +
                     ", q=" + std::to_string(q));
  }
}

namespace {

std::vector<Complex> all_gauss_sums(const CharacterTable& table) {
  std::vector<Complex> taus(static_cast<std::size_t>(table.phi()));
  for (int j = 0; j < table.character_count(); ++j) taus[static_cast<std::size_t>(j)] = gauss_sum(table, j);
  return taus;
}

}  // namespace

IdentityValue orthogonality_sum(const CharacterTable& table, std::int64_t m, std::int64_t n) {
  require_coprime(table.q(), m, n);
  std::vector<Complex> terms;
  for (int j : enumerate_characters(table, Parity::even, true)) {
    terms.push_back(table.value(j, n) * std::conj(table.value(j, m)));
  }
  return {pairwise_sum(terms), closed::orthogonality(table.q(), m, n)};
}

IdentityValue gauss_twisted_sum(const CharacterTable& table, std::int64_t m, std::int64_t n, Sign sign) {
  require_coprime(table.q(), m, n);
  const auto taus = all_gauss_sums(table);
  const std::int64_t q = table.q();
  const std::int64_t arg = mod_reduce(sign_value(sign) * mod_reduce(m, q) * mod_reduce(n, q), q);
  std::vector<Complex> terms;
  for (int j : enumerate_characters(table, Parity::all, true)) {
    terms.push_back(table.value(j, arg) * taus[static_cast<std::size_t>(table.conjugate(j))]);
  }
  return {pairwise_sum(terms), closed::gauss_twisted(q, m, n, sign)};
}

IdentityValue inverse_twisted_sum(const CharacterTable& table, std::int64_t m, std::int64_t n, Sign sign) {
  require_coprime(table.q(), m, n);
  const auto taus = all_gauss_sums(table);
  const std::int64_t q = table.q();
  const std::int64_t arg = mod_reduce(sign_value(sign) * mod_reduce(m, q) * mod_inverse(n, q), q);
  std::vector<Complex> terms;
  for (int j : enumerate_characters(table, Parity::all, true)) {
    terms.push_back(table.value(j, arg) * taus[static_cast<std::size_t>(j)]);
  }
  return {pairwise_sum(terms), closed::inverse_twisted(q, m, n, sign)};
}

IdentityValue gauss_square_identity(const CharacterTable& table, std::int64_t m, std::int64_t n) {
  require_coprime(table.q(), m, n);
  const std::int64_t q = table.q();
  const std::int64_t mn = mod_reduce(m, q) * mod_reduce(n, q) % q;
  std::vector<Complex> terms;
  for (int j : enumerate_characters(table, Parity::even, true)) {
    const Complex tau = gauss_sum(table, j);
    terms.push_back(std::conj(table.value(j, mn)) * tau * tau);
  }
  return {pairwise_sum(terms), closed::gauss_square(q, m, n)};
}

namespace closed {

double orthogonality(std::int64_t q, std::int64_t m, std::int64_t n) {
  require_coprime(q, m, n);
  const double phi = static_cast<double>(q - 1);
  double acc = 0.0;
  for (Sign s : kSigns) {
    const bool hit = mod_reduce(m - sign_value(s) * n, q) == 0;
    acc += (hit ? phi : 0.0) - 1.0;
  }
  return 0.5 * acc;
}

Complex gauss_twisted(std::int64_t q, std::int64_t m, std::int64_t n, Sign sign) {
  require_coprime(q, m, n);
  const std::int64_t arg = sign_value(sign) * mod_reduce(m, q) * mod_reduce(n, q);
  return static_cast<double>(q - 1) * e_frac(arg, q) + 1.0;
}

Complex inverse_twisted(std::int64_t q, std::int64_t m, std::int64_t n, Sign sign) {
  require_coprime(q, m, n);
  const std::int64_t arg = sign_value(sign) * mod_reduce(n, q) * mod_inverse(m, q);
  return static_cast<double>(q - 1) * e_frac(arg, q) + 1.0;
}

double gauss_square(std::int64_t q, std::int64_t m, std::int64_t n) {
  require_coprime(q, m, n);
  const std::int64_t mn = mod_reduce(m, q) * mod_reduce(n, q) % q;
  return 0.5 * static_cast<double>(q - 1) * (kloosterman(1, mn, q) + kloosterman(1, -mn, q)) - 1.0;
}

KloostermanTable::KloostermanTable(std::int64_t q) : q_(q), values_(static_cast<std::size_t>(q)) {
  for (std::int64_t k = 0; k < q; ++k) values_[static_cast<std::size_t>(k)] = kloosterman(1, k, q);
}

double KloostermanTable::gauss_square(std::int64_t m, std::int64_t n) const {
  require_coprime(q_, m, n);
  const std::int64_t mn = mod_reduce(m, q_) * mod_reduce(n, q_) % q_;
  return 0.5 * static_cast<double>(q_ - 1) * (s1(mn) + s1(-mn)) - 1.0;
}

}  // namespace closed

double HighPrecisionGaps::max_gap() const {
  double g = std::max(orthogonality, gauss_square);
  for (int i = 0; i < 2; ++i) g = std::max({g, gauss_twisted[i], inverse_twisted[i]});
  return g;
}

}  // namespace mforge::chars
