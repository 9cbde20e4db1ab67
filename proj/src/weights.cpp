#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "moment_forge/error.hpp"
#include "moment_forge/special_functions.hpp"

namespace mforge::special {

namespace {

constexpr double kEnvelopeCmin = 0.5;
constexpr double kEnvelopeCmax = 16.0;
constexpr double kEnvelopeCstep = 0.25;
// Largest |log(scale x)| the trapezoid step is sized for.
constexpr double kMaxLogArgument = 16.0;
// Left lines are used only when the pole u = -s is at least this far from u = 0.
constexpr double kMinLeftShift = 0.2;
// Absolute rounding error beyond which an evaluation is refused.
constexpr double kMaxRounding = 1e-10;

}  // namespace

void WeightParams::validate() const {
  if (node_count < 64) throw UsageError("weight quadrature needs node_count >= 64");
  if (!(contour_re > 0.0)) throw UsageError("weight contour must lie right of u = 0");
  if (!(tail_tol > 0.0 && tail_tol < 1e-2)) throw UsageError("weight tail tolerance must lie in (0, 1e-2)");
  if (t_cutoff < 0.0) throw UsageError("t_cutoff must be non-negative");
}

double WeightParams::base_cutoff() const {
  if (t_cutoff > 0.0) return t_cutoff;
  return std::sqrt(contour_re * contour_re + std::log(1.0 / tail_tol));
}

WeightFunction::WeightFunction(Complex s, double spectral, bool maass, const WeightParams& params)
    : s_(s), spectral_(spectral), maass_(maass), params_(params), scale_(maass ? kPi : std::sqrt(kPi)) {
  params_.validate();
  if (maass_) {
    const Complex it(0.0, spectral_);
    log_gamma_base_ = log_gamma(0.5 * (s_ + it)) + log_gamma(0.5 * (s_ - it));
  } else {
    log_gamma_base_ = log_gamma(0.5 * s_);
  }
  right_ = build_line(params_.contour_re, params_.base_cutoff(), params_.node_count);
  const double sig = s_.real();
  if (sig >= kMinLeftShift) {
    const double re = -0.5 * std::min(sig, 2.0);
    left_ = build_line(re, std::sqrt(re * re + std::log(1.0 / params_.tail_tol)), 0);
    has_left_ = true;
  }
  for (double c = kEnvelopeCmin; c <= kEnvelopeCmax + 1e-12; c += kEnvelopeCstep) {
    envelope_table_.emplace_back(c, envelope_constant(c));
  }
}

WeightFunction WeightFunction::dirichlet(Complex s, const WeightParams& params) {
  return WeightFunction(s, 0.0, false, params);
}

WeightFunction WeightFunction::maass(Complex s, double spectral, const WeightParams& params) {
  return WeightFunction(s, spectral, true, params);
}

Complex WeightFunction::log_kernel(Complex u) const {
  Complex lg;
  if (maass_) {
    const Complex it(0.0, spectral_);
    lg = log_gamma(0.5 * (s_ + u + it)) + log_gamma(0.5 * (s_ + u - it));
  } else {
    lg = log_gamma(0.5 * (s_ + u));
  }
  return lg - log_gamma_base_ + u * u - std::log(u);
}

WeightFunction::Line WeightFunction::build_line(double re, double min_cutoff, int nodes) const {
  Line line;
  line.re = re;
  // Poles of the integrand: u = 0 and u = -s - 2k (shifted by -+iT for W).
  line.strip = std::min(std::abs(re), std::abs(re + s_.real()));
  auto magnitude = [&](double t) { return std::exp(log_kernel(Complex(re, t)).real()) / kTwoPi; };
  double cutoff = min_cutoff;
  while (std::max(magnitude(cutoff), magnitude(-cutoff)) >= params_.tail_tol) {
    if (params_.t_cutoff > 0.0 && re == params_.contour_re) {
      std::ostringstream msg;
      msg << "kernel magnitude at t_cutoff = " << params_.t_cutoff << " is above the tail tolerance " << params_.tail_tol;
      throw NumericError(msg.str());
    }
    cutoff += 0.25;
    if (cutoff > 4.0 * min_cutoff + 20.0) {
      std::ostringstream msg;
      msg << "weight kernel does not fall below " << params_.tail_tol << " on Re u = " << re;
      throw NumericError(msg.str());
    }
  }
  line.t_cutoff = cutoff;
  // Trapezoid error ~ exp(-2 pi d / h + d |log X|); size h for |log X| <= kMaxLogArgument.
  const double ln_tol = std::log(1.0 / params_.tail_tol);
  const double h_needed = kTwoPi * line.strip / (ln_tol + line.strip * kMaxLogArgument + 5.0);
  int count = nodes;
  if (count <= 0 || 2.0 * cutoff / count > h_needed) {
    count = std::max(count, static_cast<int>(std::ceil(2.0 * cutoff / h_needed)));
  }
  line.step = 2.0 * cutoff / count;
  std::vector<Complex> weights(static_cast<std::size_t>(count) + 1);
  for (int j = 0; j <= count; ++j) {
    const double t = -cutoff + j * line.step;
    const Complex w = std::exp(log_kernel(Complex(re, t))) * (line.step / kTwoPi);
    weights[static_cast<std::size_t>(j)] = w;
    line.kernel_peak = std::max(line.kernel_peak, std::abs(w) / line.step * kTwoPi);
  }
  // Endpoints carry half weight.
  weights.front() *= 0.5;
  weights.back() *= 0.5;
  line.sum = LineSum(weights, -cutoff, line.step);
  return line;
}

void WeightFunction::check_resolution(const Line& line, double log_x) const {
  const double err = line.kernel_peak * std::exp(-line.re * log_x) *
                     std::exp(-kTwoPi * line.strip / line.step + line.strip * std::abs(log_x));
  if (!(err <= params_.tail_tol)) {
    std::ostringstream msg;
    msg << "weight quadrature error estimate " << err << " exceeds tail tolerance at log(scale*x) = " << log_x;
    throw NumericError(msg.str());
  }
  const double rounding = 8.0 * std::numeric_limits<double>::epsilon() * line.sum.abs_sum() * std::exp(-line.re * log_x);
  if (rounding > kMaxRounding) {
    std::ostringstream msg;
    msg << "weight quadrature rounding estimate " << rounding << " exceeds tolerance at log(scale*x) = " << log_x;
    throw NumericError(msg.str());
  }
}

Complex WeightFunction::sum_line(const Line& line, double log_x) const {
  return line.sum(log_x) * std::exp(-line.re * log_x);
}

Complex WeightFunction::operator()(double x) const {
  if (!(x > 0.0) || !std::isfinite(x)) {
    std::ostringstream msg;
    msg << "weight function needs x > 0, got " << x;
    throw NumericError(msg.str());
  }
  const double log_x = std::log(scale_ * x);
  if (has_left_ && log_x < 0.0) {
    check_resolution(left_, log_x);
    return 1.0 + sum_line(left_, log_x);
  }
  check_resolution(right_, log_x);
  return sum_line(right_, log_x);
}

void WeightFunction::evaluate(std::span<const double> xs, std::span<Complex> out) const {
  if (xs.size() != out.size()) throw UsageError("weight evaluation spans differ in length");
  for (std::size_t i = 0; i < xs.size(); ++i) out[i] = (*this)(xs[i]);
}

double WeightFunction::envelope_constant(double c) const {
  if (!(c > 0.0)) throw UsageError("envelope abscissa must be positive");
  // Integrate |kernel| on Re u = c with a step fine enough for a smooth positive integrand.
  auto magnitude = [&](double t) { return std::exp(log_kernel(Complex(c, t)).real()); };
  const double h = 0.02;
  double acc = magnitude(0.0);
  double peak = acc;
  for (int side : {1, -1}) {
    for (int j = 1;; ++j) {
      const double m = magnitude(side * j * h);
      acc += m;
      peak = std::max(peak, m);
      if (m < 1e-18 * peak && j * h > c) break;
      if (j > 200000) throw NumericError("envelope integral failed to converge");
    }
  }
  // The trapezoid sum of a smooth positive function is accurate to far better
  // than this margin; the factor keeps the bound conservative.
  return 1.01 * acc * h / kTwoPi;
}

double WeightFunction::envelope(double x) const {
  const double log_x = std::log(scale_ * x);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& [c, constant] : envelope_table_) best = std::min(best, std::exp(-c * log_x) * constant);
  return best;
}

Complex weight_V(const EvaluationPoint& point, double x, const WeightParams& params) {
  return WeightFunction::dirichlet(point.s0(), params)(x);
}

Complex weight_W(const EvaluationPoint& point, double x, double spectral, const WeightParams& params) {
  return WeightFunction::maass(point.s0(), spectral, params)(x);
}

}  // namespace mforge::special
