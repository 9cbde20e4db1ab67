#include <array>
#include <cmath>
#include <sstream>

#include "moment_forge/error.hpp"
#include "moment_forge/special_functions.hpp"

namespace mforge::special {

namespace {

// Godfrey's coefficients for g = 607/128.
constexpr double kLanczosG = 607.0 / 128.0;
constexpr std::array<double, 15> kLanczos = {
    0.99999999999999709182,     57.156235665862923517,      -59.597960355475491248,
    14.136097974741747174,      -0.49191381609762019978,    .33994649984811888699e-4,
    .46523628927048575665e-4,   -.98374475304879564677e-4,  .15808870322491248884e-3,
    -.21026444172410488319e-3,  .21743961811521264320e-3,   -.16431810653676389022e-3,
    .84418223983852743293e-4,   -.26190838401581408670e-4,  .36899182659531622704e-5};

const double kHalfLogTwoPi = 0.5 * std::log(kTwoPi);

Complex lanczos_log_gamma(Complex z) {
  Complex series = kLanczos[0];
  for (std::size_t k = 1; k < kLanczos.size(); ++k) series += kLanczos[k] / (z + static_cast<double>(k - 1));
  const Complex t = z + (kLanczosG - 0.5);
  return kHalfLogTwoPi + (z - 0.5) * std::log(t) - t + std::log(series);
}

// log sin(pi z), avoiding overflow of cosh/sinh for large |Im z|.
Complex log_sin_pi(Complex z) {
  const double x = z.real() - 2.0 * std::round(z.real() / 2.0);
  const Complex w(x, z.imag());
  const Complex i(0.0, 1.0);
  if (w.imag() > 1.0) return -i * kPi * w + std::log(1.0 - std::exp(kTwoPi * i * w)) + std::log(Complex(0.0, 0.5));
  if (w.imag() < -1.0) return i * kPi * w + std::log(1.0 - std::exp(-kTwoPi * i * w)) - std::log(Complex(0.0, 2.0));
  return std::log(std::sin(kPi * w));
}

void reject_pole(Complex s) {
  const double r = std::round(s.real());
  if (r <= 0.0 && s.imag() == 0.0 && s.real() == r) {
    std::ostringstream msg;
    msg << "Gamma has a pole at s = " << r;
    throw PoleError(msg.str());
  }
  if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) throw NumericError("Gamma evaluated at a non-finite argument");
}

}  // namespace

Complex log_gamma(Complex s) {
  reject_pole(s);
  if (s.real() >= 0.5) return lanczos_log_gamma(s);
  return std::log(kPi) - log_sin_pi(s) - lanczos_log_gamma(1.0 - s);
}

Complex complex_gamma(Complex s) {
  reject_pole(s);
  if (s.imag() == 0.0 && s.real() > 0.0 && s.real() < 171.0) return std::tgamma(s.real());
  if (s.real() >= 0.5) return std::exp(lanczos_log_gamma(s));
  const double x = s.real() - 2.0 * std::round(s.real() / 2.0);
  return kPi / (std::sin(kPi * Complex(x, s.imag())) * std::exp(lanczos_log_gamma(1.0 - s)));
}

Complex log_gamma_dirichlet(Complex s) { return -0.5 * s * std::log(kPi) + log_gamma(0.5 * s); }

Complex gamma_dirichlet(Complex s) { return std::exp(log_gamma_dirichlet(s)); }

Complex log_gamma_maass(Complex s, double spectral) {
  const Complex it(0.0, spectral);
  return -s * std::log(kPi) + log_gamma(0.5 * (s + it)) + log_gamma(0.5 * (s - it));
}

Complex gamma_maass(Complex s, double spectral) { return std::exp(log_gamma_maass(s, spectral)); }

Complex gamma_ratio_dirichlet(Complex s0) { return std::exp(log_gamma_dirichlet(1.0 - s0) - log_gamma_dirichlet(s0)); }

Complex gamma_ratio_maass(Complex s0, double spectral) {
  return std::exp(log_gamma_maass(1.0 - s0, spectral) - log_gamma_maass(s0, spectral));
}

Complex voronoi_G(int sign, Complex s, double spectral) {
  if (sign != 1 && sign != -1) throw UsageError("Voronoi kernel sign must be +1 or -1");
  const Complex it(0.0, spectral);
  const Complex first = std::exp(log_gamma(0.5 * (1.0 + s + it)) + log_gamma(0.5 * (1.0 + s - it)) -
                                 log_gamma(0.5 * (-s + it)) - log_gamma(0.5 * (-s - it)));
  const Complex second = std::exp(log_gamma(0.5 * (2.0 + s + it)) + log_gamma(0.5 * (2.0 + s - it)) -
                                  log_gamma(0.5 * (1.0 - s + it)) - log_gamma(0.5 * (1.0 - s - it)));
  return (first + static_cast<double>(sign) * second) / kTwoPi;
}

EvaluationPoint::EvaluationPoint(double sigma0, double t0, bool extended)
    : sigma0_(sigma0), t0_(t0), extended_(extended) {
  if (!std::isfinite(sigma0) || !std::isfinite(t0)) throw UsageError("evaluation point must be finite");
  if (!extended && (sigma0 < 0.5 || sigma0 >= 1.0)) {
    std::ostringstream msg;
    msg << "sigma0 = " << sigma0 << " outside [1/2, 1); pass the extended-range flag for oracle checks";
    throw UsageError(msg.str());
  }
  if (extended && sigma0 <= 0.0) throw UsageError("extended-range sigma0 must still be positive");
}

}  // namespace mforge::special
