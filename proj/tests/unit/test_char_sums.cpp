#include <doctest.h>

#include <cmath>
#include <random>

#include "moment_forge/char_sums.hpp"
#include "moment_forge/error.hpp"

using namespace mforge;
using namespace mforge::chars;

namespace {

// Brute-force character values: search the exponent instead of reading a table.
Complex naive_chi(std::int64_t q, std::int64_t g, int j, std::int64_t a) {
  a = mod_reduce(a, q);
  if (a == 0) return 0.0;
  std::int64_t x = 1;
  for (std::int64_t k = 0; k < q - 1; ++k) {
    if (x == a) return std::polar(1.0, kTwoPi * static_cast<double>(j) * static_cast<double>(k) / static_cast<double>(q - 1));
    x = x * g % q;
  }
  return std::nan("");
}

const std::int64_t kSmallPrimes[] = {3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97, 101};

}  // namespace

TEST_SUITE("char_sums") {
  TEST_CASE("primitive roots are the least generators") {
    CHECK(primitive_root(3) == 2);
    CHECK(primitive_root(5) == 2);
    CHECK(primitive_root(7) == 3);
    CHECK(primitive_root(11) == 2);
    CHECK(primitive_root(101) == 2);
    for (std::int64_t q : kSmallPrimes) {
      const std::int64_t g = primitive_root(q);
      std::vector<bool> seen(static_cast<std::size_t>(q), false);
      std::int64_t x = 1;
      for (std::int64_t k = 0; k < q - 1; ++k) {
        CHECK_FALSE(seen[static_cast<std::size_t>(x)]);
        seen[static_cast<std::size_t>(x)] = true;
        x = x * g % q;
      }
    }
  }

  TEST_CASE("non-prime moduli are rejected with a witness") {
    try {
      primitive_root(91);
      FAIL("expected rejection");
    } catch (const UsageError& e) {
      CHECK(std::string(e.what()).find("divisible by 7") != std::string::npos);
    }
    CHECK_THROWS_AS(CharacterTable(9), UsageError);
    CHECK_THROWS_AS(CharacterTable(2), UsageError);
    CHECK(is_prime(1000000007));
    CHECK_FALSE(is_prime(3215031751LL));  // strong pseudoprime to bases 2, 3, 5, 7
  }

  TEST_CASE("character counts and parity") {
    CHECK(enumerate_characters(CharacterTable(5), Parity::even, true).size() == 1);
    CHECK(enumerate_characters(CharacterTable(7), Parity::even, true).size() == 2);
    CHECK(enumerate_characters(CharacterTable(3), Parity::even, true).empty());
    for (std::int64_t q : kSmallPrimes) {
      const CharacterTable t(q);
      if (q > 3) CHECK(enumerate_characters(t, Parity::even, true).size() == static_cast<std::size_t>((q - 3) / 2));
      for (int j = 0; j < t.character_count(); ++j) {
        const double sign = t.value(j, q - 1).real();
        CHECK(std::abs(sign - (t.is_even(j) ? 1.0 : -1.0)) < 1e-12);
      }
    }
  }

  TEST_CASE("table values match brute force and are multiplicative") {
    std::mt19937_64 rng(20240531);
    for (std::int64_t q : {7LL, 23LL, 101LL}) {
      const CharacterTable t(q);
      std::uniform_int_distribution<std::int64_t> unit(1, q - 1);
      for (int j = 0; j < t.character_count(); ++j) {
        for (std::int64_t a = 1; a < q; ++a) {
          CHECK(std::abs(t.value(j, a) - naive_chi(q, t.modulus().g(), j, a)) < 1e-12);
        }
        for (int k = 0; k < 100; ++k) {
          const std::int64_t a = unit(rng), b = unit(rng);
          CHECK(std::abs(t.value(j, a * b) - t.value(j, a) * t.value(j, b)) < 1e-12);
        }
        CHECK(t.value(j, q) == Complex(0.0, 0.0));
      }
    }
  }

  TEST_CASE("Gauss sums") {
    const CharacterTable t5(5);
    CHECK(std::abs(gauss_sum(t5, 2) - Complex(2.2360679774997896964, 0.0)) < 1e-13);
    CHECK(std::abs(gauss_sum(t5, 0) - Complex(-1.0, 0.0)) < 1e-13);
    const CharacterTable t11(11);
    CHECK(std::abs(gauss_sum(t11, 1) - Complex(-0.95530187798436984353, 3.1760664857523899372)) < 1e-13);
    for (std::int64_t q : kSmallPrimes) {
      const CharacterTable t(q);
      for (int j = 1; j < t.character_count(); ++j) CHECK(std::abs(std::abs(gauss_sum(t, j)) - std::sqrt(double(q))) < 1e-10);
    }
  }

  TEST_CASE("tau(conj chi) tau(chi) = q for even primitive chi") {
    const auto g5 = gauss_product_identity(CharacterTable(5), 2);
    CHECK(g5.rhs == 5.0);
    CHECK(std::abs(g5.lhs - 5.0) < 1e-10);
    const CharacterTable t13(13);
    for (int j : enumerate_characters(t13, Parity::even, true)) {
      CHECK(std::abs(gauss_product_identity(t13, j).lhs - 13.0) < 1e-10);
    }
    CHECK_THROWS_AS(gauss_product_identity(CharacterTable(7), 1), UsageError);
    CHECK_THROWS_AS(gauss_product_identity(CharacterTable(7), 0), UsageError);
  }

  TEST_CASE("Kloosterman sums") {
    CHECK(std::abs(kloosterman(1, 1, 3) + 1.0) < 1e-14);
    CHECK(std::abs(kloosterman(1, 4, 7) + 2.6920214716300958696) < 1e-13);
    CHECK(std::abs(kloosterman(3, 5, 11) + 5.7169527154417002495) < 1e-13);
    for (std::int64_t q : kSmallPrimes) {
      CHECK(std::abs(kloosterman(1, 0, q) + 1.0) < 1e-12);
      for (std::int64_t a = 1; a < q; a += 3) {
        for (std::int64_t b = 1; b < q; b += 2) {
          const double s = kloosterman(a, b, q);
          CHECK(std::abs(s) <= 2.0 * std::sqrt(double(q)) + 1e-12);
          CHECK(std::abs(s - kloosterman(b, a, q)) < 1e-12);
        }
      }
    }
  }

  TEST_CASE("orthogonality closed form") {
    const CharacterTable t7(7);
    CHECK(orthogonality_sum(t7, 2, 2).closed == Complex(2.0, 0.0));
    CHECK(orthogonality_sum(t7, 2, 5).closed == Complex(2.0, 0.0));
    CHECK(orthogonality_sum(t7, 2, 3).closed == Complex(-1.0, 0.0));
    CHECK(std::abs(orthogonality_sum(t7, 2, 2).direct - 2.0) < 1e-12);
    CHECK(std::abs(orthogonality_sum(t7, 2, 3).direct + 1.0) < 1e-12);
    CHECK_THROWS_AS(orthogonality_sum(t7, 7, 2), UsageError);
  }

  TEST_CASE("twisted Gauss closed forms") {
    const Complex four_e_fifth(2.2360679774997896964, 3.8042260651806142885);
    const CharacterTable t5(5), t7(7);
    CHECK(std::abs(gauss_twisted_sum(t5, 1, 1, Sign::plus).closed - four_e_fifth) < 1e-13);
    CHECK(std::abs(gauss_twisted_sum(t5, 1, 1, Sign::plus).direct - four_e_fifth) < 1e-12);
    CHECK(std::abs(gauss_twisted_sum(t5, 2, 3, Sign::plus).direct - four_e_fifth) < 1e-12);
    CHECK(std::abs(gauss_twisted_sum(t7, 1, 1, Sign::minus).closed - (6.0 * e_frac(-1, 7) + 1.0)) < 1e-13);
    CHECK(std::abs(inverse_twisted_sum(t5, 2, 1, Sign::plus).direct - (4.0 * e_frac(3, 5) + 1.0)) < 1e-12);
    CHECK(std::abs(inverse_twisted_sum(t5, 1, 1, Sign::plus).direct - four_e_fifth) < 1e-12);
    const Complex six_e_four_sevenths(-4.4058132074145147574, -2.6033024347053487229);
    CHECK(std::abs(inverse_twisted_sum(t7, 3, 2, Sign::minus).direct - six_e_four_sevenths) < 1e-12);
    CHECK(std::abs(inverse_twisted_sum(t7, 3, 2, Sign::minus).closed - six_e_four_sevenths) < 1e-13);
    CHECK_THROWS_AS(inverse_twisted_sum(t7, 14, 2, Sign::plus), UsageError);
    CHECK_THROWS_AS(gauss_twisted_sum(t7, 1, 0, Sign::plus), UsageError);
  }

  TEST_CASE("Gauss square identity") {
    const auto i5 = gauss_square_identity(CharacterTable(5), 1, 1);
    CHECK(std::abs(i5.closed - 5.0) < 1e-12);  // (1/2)*4*3 - 1
    CHECK(i5.gap() < 1e-9);
    const auto i11 = gauss_square_identity(CharacterTable(11), 2, 3);
    CHECK(std::abs(i11.direct + 27.075011349594824904) < 1e-11);
    CHECK(i11.gap() < 1e-9);
    const auto i7 = gauss_square_identity(CharacterTable(7), 1, 6);
    CHECK(std::abs(i7.direct - 8.4765008110911430891) < 1e-11);
    CHECK(i7.gap() < 1e-9);
    CHECK_THROWS_AS(gauss_square_identity(CharacterTable(7), 0, 6), UsageError);
  }

  TEST_CASE("Kloosterman table agrees with direct closed form") {
    const closed::KloostermanTable kt(31);
    for (std::int64_t m = 1; m < 31; m += 4) {
      for (std::int64_t n = 1; n < 31; n += 3) CHECK(std::abs(kt.gauss_square(m, n) - closed::gauss_square(31, m, n)) < 1e-12);
    }
  }

  TEST_CASE("high-precision identity gaps") {
    const auto hp = high_precision_gaps(103, 5, 17, 40);
    CHECK(hp.digits10 == 40);
    CHECK(hp.max_gap() < 1e-30);
    CHECK_THROWS_AS(high_precision_gaps(103, 0, 17, 40), UsageError);
  }
}
