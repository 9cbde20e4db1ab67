#pragma once

// Arbitrary-precision log-Gamma for test comparison: upward recurrence to
// |z| >= 40, then Stirling's series with 30 Bernoulli terms, reflection for
// Re z < 1/2. Shares no code with the library's Lanczos implementation.

#include <boost/math/special_functions/bernoulli.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_complex.hpp>
#include <complex>

namespace oracle {

using Real = boost::multiprecision::cpp_bin_float_50;
using Cx = boost::multiprecision::cpp_complex_50;

inline Cx log_gamma_mp(Cx z) {
  const Real pi = boost::math::constants::pi<Real>();
  if (z.real() < 0.5) {
    return log(Cx(pi)) - log(sin(Cx(pi) * z)) - log_gamma_mp(Cx(1) - z);
  }
  Cx shift(0);
  while (abs(z) < 40) {
    shift += log(z);
    z += 1;
  }
  Cx acc = (z - Cx(0.5)) * log(z) - z + Cx(log(2 * pi) / 2);
  Cx zpow = z;
  const Cx z2 = z * z;
  for (int j = 1; j <= 30; ++j) {
    const Real b = boost::math::bernoulli_b2n<Real>(j);
    acc += Cx(b / (2 * j * (2 * j - 1))) / zpow;
    zpow *= z2;
  }
  return acc - shift;
}

inline std::complex<double> gamma_mp(std::complex<double> s) {
  const Cx v = exp(log_gamma_mp(Cx(s.real(), s.imag())));
  return {static_cast<double>(v.real()), static_cast<double>(v.imag())};
}

}  // namespace oracle
