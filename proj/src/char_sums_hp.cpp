#include <boost/multiprecision/mpfr.hpp>
#include <string>
#include <vector>

#include "moment_forge/char_sums.hpp"
#include "moment_forge/error.hpp"

namespace mforge::chars {

namespace {

using Real = boost::multiprecision::mpfr_float;

struct Cx {
  Real re, im;
};

Cx operator+(const Cx& a, const Cx& b) { return {a.re + b.re, a.im + b.im}; }
Cx operator-(const Cx& a, const Cx& b) { return {a.re - b.re, a.im - b.im}; }
Cx operator*(const Cx& a, const Cx& b) { return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re}; }
Cx conj(const Cx& a) { return {a.re, -a.im}; }
double abs_gap(const Cx& a, const Cx& b) {
  const Cx d = a - b;
  return static_cast<double>(sqrt(d.re * d.re + d.im * d.im));
}

// e(k / order) for k = 0..order-1
std::vector<Cx> unit_roots(std::int64_t order) {
  std::vector<Cx> out(static_cast<std::size_t>(order));
  const Real tp = 2 * boost::math::constants::pi<Real>();
  for (std::int64_t k = 0; k < order; ++k) {
    const Real arg = tp * k / order;
    out[static_cast<std::size_t>(k)] = {cos(arg), sin(arg)};
  }
  return out;
}

class ScopedPrecision {
 public:
  explicit ScopedPrecision(unsigned digits) : saved_(Real::default_precision()) {
    Real::default_precision(digits);
  }
  ~ScopedPrecision() { Real::default_precision(saved_); }

 private:
  unsigned saved_;
};

}  // namespace

HighPrecisionGaps high_precision_gaps(std::int64_t q, std::int64_t m, std::int64_t n, unsigned digits10) {
  if (digits10 < 16 || digits10 > 1000) throw UsageError("high-precision digits must lie in 16..1000");
  require_coprime(q, m, n);
  ScopedPrecision precision(digits10);
  const CharacterTable table(q);  // integer data only: dlog and parity
  const std::int64_t phi = q - 1;
  const auto chi_roots = unit_roots(phi);
  const auto add_roots = unit_roots(q);
  auto chi = [&](int j, std::int64_t a) -> Cx {
    return chi_roots[static_cast<std::size_t>(mod_reduce(j * table.dlog(a), phi))];
  };
  auto add = [&](std::int64_t a) -> const Cx& { return add_roots[static_cast<std::size_t>(mod_reduce(a, q))]; };

  std::vector<Cx> tau(static_cast<std::size_t>(phi), Cx{Real(0), Real(0)});
  for (int j = 0; j < phi; ++j) {
    for (std::int64_t a = 1; a < q; ++a) tau[static_cast<std::size_t>(j)] = tau[static_cast<std::size_t>(j)] + chi(j, a) * add(a);
  }
  auto kloost = [&](std::int64_t b) {
    Real acc = 0;
    for (std::int64_t x = 1; x < q; ++x) acc += add(x + b * mod_inverse(x, q)).re;
    return acc;
  };

  const std::int64_t mr = mod_reduce(m, q), nr = mod_reduce(n, q);
  const Real phi_r = phi;
  HighPrecisionGaps out;
  out.digits10 = digits10;

  Cx orth{Real(0), Real(0)};
  Cx square{Real(0), Real(0)};
  for (int j = 2; j < phi; j += 2) {
    orth = orth + chi(j, nr) * conj(chi(j, mr));
    square = square + conj(chi(j, mr * nr)) * tau[static_cast<std::size_t>(j)] * tau[static_cast<std::size_t>(j)];
  }
  Real orth_closed = 0;
  for (Sign s : kSigns) orth_closed += (mod_reduce(mr - sign_value(s) * nr, q) == 0 ? phi_r : Real(0)) - 1;
  orth_closed /= 2;
  out.orthogonality = abs_gap(orth, {orth_closed, Real(0)});

  const Real square_closed = phi_r * (kloost(mr * nr) + kloost(-mr * nr)) / 2 - 1;
  out.gauss_square = abs_gap(square, {square_closed, Real(0)});

  for (int si = 0; si < 2; ++si) {
    const std::int64_t sv = sign_value(kSigns[si]);
    Cx twisted{Real(0), Real(0)}, inverse{Real(0), Real(0)};
    for (int j = 1; j < phi; ++j) {
      twisted = twisted + chi(j, sv * mr * nr) * tau[static_cast<std::size_t>(table.conjugate(j))];
      inverse = inverse + chi(j, sv * mr * mod_inverse(nr, q)) * tau[static_cast<std::size_t>(j)];
    }
    const Cx one{Real(1), Real(0)};
    const Cx& et = add(sv * mr * nr);
    const Cx& ei = add(sv * nr * mod_inverse(mr, q));
    out.gauss_twisted[si] = abs_gap(twisted, Cx{phi_r * et.re, phi_r * et.im} + one);
    out.inverse_twisted[si] = abs_gap(inverse, Cx{phi_r * ei.re, phi_r * ei.im} + one);
  }
  return out;
}

}  // namespace mforge::chars
