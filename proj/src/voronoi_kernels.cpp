#include <algorithm>
#include <cmath>
#include <sstream>

#include "moment_forge/error.hpp"
#include "moment_forge/special_functions.hpp"

namespace mforge::special {

namespace {

constexpr double kMaxLogY = 16.0;

double kernel_envelope(Complex s, double spectral) {
  const Complex it(0.0, spectral);
  const double a = std::exp((log_gamma(0.5 * (1.0 + s + it)) + log_gamma(0.5 * (1.0 + s - it)) -
                             log_gamma(0.5 * (-s + it)) - log_gamma(0.5 * (-s - it)))
                                .real());
  const double b = std::exp((log_gamma(0.5 * (2.0 + s + it)) + log_gamma(0.5 * (2.0 + s - it)) -
                             log_gamma(0.5 * (1.0 - s + it)) - log_gamma(0.5 * (1.0 - s - it)))
                                .real());
  return (a + b) / kTwoPi;
}

}  // namespace

BumpFunction::BumpFunction(int nodes) {
  if (nodes < 64) throw UsageError("bump transform needs at least 64 nodes");
  const double h = std::log(2.0) / nodes;
  for (int k = 1; k < nodes; ++k) {
    const double v = k * h;
    v_.push_back(v);
    weights_.push_back(value(std::exp(v)) * h);
  }
}

double BumpFunction::value(double x) {
  const double u = 2.0 * x - 3.0;
  if (std::abs(u) >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - u * u));
}

// The transform decays like exp(-c sqrt|t|); long double accumulation keeps
// its rounding floor well below the values needed far out on the line.
Complex BumpFunction::mellin(Complex w) const {
  using LComplex = std::complex<long double>;
  const LComplex wl(w.real(), w.imag());
  LComplex acc = 0.0L;
  for (std::size_t k = 0; k < v_.size(); ++k) acc += static_cast<long double>(weights_[k]) * std::exp(wl * static_cast<long double>(v_[k]));
  return {static_cast<double>(acc.real()), static_cast<double>(acc.imag())};
}

MellinFunction BumpFunction::mellin_function() const {
  return [copy = *this](Complex w) { return copy.mellin(w); };
}

std::vector<Complex> BumpFunction::mellin_on_line(double re, double t0, double h, std::size_t count) const {
  std::vector<long double> acc_re(count, 0.0L), acc_im(count, 0.0L);
  constexpr std::size_t kReseed = 512;
  for (std::size_t k = 0; k < v_.size(); ++k) {
    const long double v = v_[k];
    const long double amp = static_cast<long double>(weights_[k]) * std::exp(static_cast<long double>(re) * v);
    const long double c = std::cos(static_cast<long double>(h) * v), s = std::sin(static_cast<long double>(h) * v);
    long double x = 0.0L, y = 0.0L;
    for (std::size_t j = 0; j < count; ++j) {
      if (j % kReseed == 0) {
        const long double phase = (static_cast<long double>(t0) + static_cast<long double>(j) * h) * v;
        x = amp * std::cos(phase);
        y = amp * std::sin(phase);
      }
      acc_re[j] += x;
      acc_im[j] += y;
      const long double nx = x * c - y * s;
      y = x * s + y * c;
      x = nx;
    }
  }
  std::vector<Complex> out(count);
  for (std::size_t j = 0; j < count; ++j) out[j] = {static_cast<double>(acc_re[j]), static_cast<double>(acc_im[j])};
  return out;
}

PsiKernel::PsiKernel(int sign, double spectral, const MellinFunction& mellin_psi, const PsiParams& params)
    : sign_(sign), params_(params) {
  build(spectral, mellin_psi, {});
}

PsiKernel::PsiKernel(int sign, double spectral, const BumpFunction& bump, const PsiParams& params)
    : sign_(sign), params_(params) {
  const double re = -params.sigma;
  build(spectral, bump.mellin_function(),
        [&bump, re](double t0, double h, std::size_t count) { return bump.mellin_on_line(re, t0, h, count); });
}

void PsiKernel::build(double spectral, const MellinFunction& pointwise, const LineTransform& on_line) {
  if (sign_ != 1 && sign_ != -1) throw UsageError("Voronoi kernel sign must be +1 or -1");
  const double sigma = params_.sigma;
  if (!(sigma > -1.0)) throw UsageError("Psi line must satisfy sigma > -1 (poles of G at Re s = -1)");
  if (!(params_.tail_tol > 0.0) || params_.nodes_per_unit < 4) throw UsageError("invalid Psi quadrature parameters");

  auto envelope = [&](double t) {
    const Complex s(sigma, t);
    return kernel_envelope(s, spectral) * std::abs(pointwise(-s));
  };
  double peak = 0.0;
  double cutoff = 0.0;
  int quiet = 0;
  for (double t = 0.0;; t += 5.0) {
    const double e = std::max(envelope(t), envelope(-t));
    peak = std::max(peak, e);
    quiet = (e < params_.tail_tol * peak) ? quiet + 1 : 0;
    if (quiet >= 3 && t > spectral + 10.0) {
      cutoff = t;
      break;
    }
    if (t > params_.max_cutoff) {
      std::ostringstream msg;
      msg << "Psi integrand still above " << params_.tail_tol << " of its peak at |t| = " << params_.max_cutoff;
      throw NumericError(msg.str());
    }
  }
  t_cutoff_ = cutoff;

  // Poles of G sit at Re s = -1; the trapezoid step must resolve that strip.
  const double strip = sigma + 1.0;
  const double h_needed = kTwoPi * strip / (std::log(1.0 / params_.tail_tol) + strip * kMaxLogY + 5.0);
  step_ = std::min(1.0 / params_.nodes_per_unit, h_needed);
  const auto count = static_cast<std::size_t>(std::ceil(2.0 * cutoff / step_)) + 1;
  step_ = 2.0 * cutoff / static_cast<double>(count - 1);

  std::vector<Complex> transform;
  if (on_line) {
    // psit(-s) at s = sigma + i t_j is psit(-sigma - i t_j).
    transform = on_line(cutoff, -step_, count);
  } else {
    transform.resize(count);
    for (std::size_t j = 0; j < count; ++j) {
      transform[j] = pointwise(Complex(-sigma, -(-cutoff + static_cast<double>(j) * step_)));
    }
  }
  std::vector<Complex> weights(count);
  for (std::size_t j = 0; j < count; ++j) {
    const Complex s(sigma, -cutoff + static_cast<double>(j) * step_);
    weights[j] = voronoi_G(sign_, s, spectral) * transform[j] * (step_ / kTwoPi);
  }
  weights.front() *= 0.5;
  weights.back() *= 0.5;
  sum_ = LineSum(weights, -cutoff, step_);
}

Complex PsiKernel::operator()(double y) const {
  if (!(y > 0.0) || !std::isfinite(y)) throw NumericError("Psi needs y > 0");
  const double log_y = std::log(kPi * kPi * y);
  if (std::abs(log_y) > kMaxLogY) {
    std::ostringstream msg;
    msg << "Psi quadrature is sized for |log(pi^2 y)| <= " << kMaxLogY << ", got y = " << y;
    throw NumericError(msg.str());
  }
  const Complex acc = sum_(log_y);
  return acc * std::exp(-params_.sigma * log_y);
}

Complex voronoi_Psi(int sign, double y, double spectral, const MellinFunction& mellin_psi, const PsiParams& params) {
  return PsiKernel(sign, spectral, mellin_psi, params)(y);
}

}  // namespace mforge::special
