#include <cmath>
#include <sstream>

#include <boost/math/special_functions/bernoulli.hpp>
#include <boost/math/special_functions/factorials.hpp>

#include "moment_forge/error.hpp"
#include "moment_forge/l_functions.hpp"

namespace mforge::lfun {

Complex hurwitz_zeta(Complex s, double a, double* error) {
  if (!(a > 0.0 && a <= 1.0)) throw UsageError("Hurwitz zeta shift must lie in (0, 1]");
  const double sigma = s.real();
  const bool at_pole = (s == Complex(1.0, 0.0));
  const std::size_t N = 16 + static_cast<std::size_t>(std::ceil(std::abs(s)));
  Complex acc = 0.0;
  for (std::size_t k = 0; k < N; ++k) acc += std::exp(-s * std::log(static_cast<double>(k) + a));
  const double x = static_cast<double>(N) + a;
  const double log_x = std::log(x);
  acc += at_pole ? Complex(-log_x) : std::exp((1.0 - s) * log_x) / (s - 1.0);
  acc += 0.5 * std::exp(-s * log_x);

  // T_j = B_{2j}/(2j)! s(s+1)...(s+2j-2) x^{-s-2j+1}; Backlund: the remainder after
  // T_J is at most |T_{J+1}| |s + 2J + 1| / (sigma + 2J + 1).
  constexpr int kMaxTerms = 60;
  Complex poch = s;  // s(s+1)...(s+2j-2)
  Complex power = std::exp(-(s + 1.0) * log_x);
  double bound = 0.0;
  for (int j = 1; j <= kMaxTerms; ++j) {
    const double coeff = boost::math::bernoulli_b2n<double>(j) / boost::math::factorial<double>(static_cast<unsigned>(2 * j));
    const Complex term = coeff * poch * power;
    const double next_coeff =
        boost::math::bernoulli_b2n<double>(j + 1) / boost::math::factorial<double>(static_cast<unsigned>(2 * j + 2));
    const Complex next_poch = poch * (s + static_cast<double>(2 * j - 1)) * (s + static_cast<double>(2 * j));
    const Complex next = next_coeff * next_poch * power / (x * x);
    acc += term;
    bound = std::abs(next) * std::abs(s + static_cast<double>(2 * j + 1)) / (sigma + 2.0 * j + 1.0);
    if (bound < 1e-18 * std::abs(acc)) break;
    poch = next_poch;
    power /= x * x;
  }
  if (error) *error = bound;
  return acc;
}

Complex l_chi_hurwitz(Complex s, const chars::CharacterTable& table, int j, double rel_tol) {
  if (table.is_principal(j)) throw UsageError("Hurwitz route excludes the principal character");
  const std::int64_t q = table.q();
  const double qd = static_cast<double>(q);
  std::vector<Complex> terms;
  double err = 0.0;
  for (std::int64_t a = 1; a < q; ++a) {
    double e = 0.0;
    terms.push_back(table.value(j, a) * hurwitz_zeta(s, static_cast<double>(a) / qd, &e));
    err += e;
  }
  const Complex scale = std::exp(-s * std::log(qd));
  const Complex value = scale * pairwise_sum(terms);
  const double bound = std::abs(scale) * err;
  if (bound > rel_tol * std::abs(value)) {
    std::ostringstream msg;
    msg << "Euler-Maclaurin remainder bound " << bound << " exceeds " << rel_tol << " * |L| at s = " << s;
    throw NumericError(msg.str());
  }
  return value;
}

}  // namespace mforge::lfun
