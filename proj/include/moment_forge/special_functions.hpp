#pragma once

#include <functional>
#include <span>
#include <vector>

#include "moment_forge/numeric.hpp"

namespace mforge::special {

// Lanczos approximation with reflection for Re(s) < 1/2. Throws PoleError at
// non-positive integers. log_gamma is continuous off the negative real axis;
// callers only exponentiate differences, so the branch is immaterial.
Complex log_gamma(Complex s);
Complex complex_gamma(Complex s);

// gamma(s) = pi^{-s/2} Gamma(s/2)
Complex log_gamma_dirichlet(Complex s);
Complex gamma_dirichlet(Complex s);
// gamma~(s) = pi^{-s} Gamma((s+iT)/2) Gamma((s-iT)/2)
Complex log_gamma_maass(Complex s, double spectral);
Complex gamma_maass(Complex s, double spectral);

// gamma(1-s0)/gamma(s0) and gamma~(1-s0)/gamma~(s0)
Complex gamma_ratio_dirichlet(Complex s0);
Complex gamma_ratio_maass(Complex s0, double spectral);

class EvaluationPoint {
 public:
  // Rejects sigma0 outside [1/2, 1) unless `extended` is set.
  EvaluationPoint(double sigma0, double t0, bool extended = false);
  double sigma0() const { return sigma0_; }
  double t0() const { return t0_; }
  double tau() const { return std::abs(t0_) + 3.0; }
  bool extended() const { return extended_; }
  Complex s0() const { return {sigma0_, t0_}; }

 private:
  double sigma0_;
  double t0_;
  bool extended_;
};

struct WeightParams {
  double contour_re = 2.0;
  int node_count = 256;
  double tail_tol = 1e-14;
  // 0 selects sqrt(contour_re^2 + ln(1/tail_tol)), widened until the kernel
  // magnitude at both endpoints is below tail_tol.
  double t_cutoff = 0.0;

  void validate() const;
  double base_cutoff() const;
};

// V_s(x) = (1/2 pi i) int_(c) (sqrt(pi) x)^{-u} Gamma((s+u)/2)/Gamma(s/2) e^{u^2} du/u
// W_s(x) = (1/2 pi i) int_(c) (pi x)^{-u} Gamma((s+u+iT)/2)Gamma((s+u-iT)/2)
//                                         / (Gamma((s+iT)/2)Gamma((s-iT)/2)) e^{u^2} du/u
// The kernel is tabulated once; each evaluation is a trapezoid sum on the
// line Re u = contour_re, or for small x on a line left of u = 0 plus the
// residue 1.
class WeightFunction {
 public:
  static WeightFunction dirichlet(Complex s, const WeightParams& params = {});
  static WeightFunction maass(Complex s, double spectral, const WeightParams& params = {});

  // Throws NumericError for x <= 0 or when the trapezoid error estimate for
  // this x exceeds tail_tol.
  Complex operator()(double x) const;
  void evaluate(std::span<const double> xs, std::span<Complex> out) const;

  // (1/2 pi) int |kernel(c + it)| dt, so |value(x)| <= (scale x)^{-c} * envelope_constant(c)
  double envelope_constant(double c) const;
  // min over a grid of c in [1/2, 16] of (scale x)^{-c} envelope_constant(c)
  double envelope(double x) const;
  // (c, envelope_constant(c)) on the grid used by envelope().
  const std::vector<std::pair<double, double>>& envelope_table() const { return envelope_table_; }
  double scale() const { return scale_; }
  Complex s() const { return s_; }
  double t_cutoff() const { return right_.t_cutoff; }
  bool is_maass() const { return maass_; }

 private:
  struct Line {
    double re = 0;
    double t_cutoff = 0;
    double step = 0;
    double strip = 0;       // distance to the nearest pole of the integrand
    double kernel_peak = 0; // max |kernel| over the nodes
    LineSum sum;            // weights kernel(re + i t_j) * step / (2 pi)
  };

  WeightFunction(Complex s, double spectral, bool maass, const WeightParams& params);
  Complex log_kernel(Complex u) const;
  Line build_line(double re, double min_cutoff, int nodes) const;
  Complex sum_line(const Line& line, double log_x) const;
  void check_resolution(const Line& line, double log_x) const;

  Complex s_;
  double spectral_;
  bool maass_;
  WeightParams params_;
  double scale_;
  Complex log_gamma_base_;
  Line right_;
  Line left_;
  bool has_left_ = false;
  std::vector<std::pair<double, double>> envelope_table_;  // (c, constant)
};

Complex weight_V(const EvaluationPoint& point, double x, const WeightParams& params = {});
Complex weight_W(const EvaluationPoint& point, double x, double spectral, const WeightParams& params = {});

// G^{+-}(s) = (1/2pi) [ Gamma((1+s+iT)/2)Gamma((1+s-iT)/2) / (Gamma((-s+iT)/2)Gamma((-s-iT)/2))
//                     +- Gamma((2+s+iT)/2)Gamma((2+s-iT)/2) / (Gamma((1-s+iT)/2)Gamma((1-s-iT)/2)) ]
Complex voronoi_G(int sign, Complex s, double spectral);

using MellinFunction = std::function<Complex(Complex)>;

// psi(x) = exp(-1/(1-u^2)), u = 2x - 3, supported on [1, 2].
class BumpFunction {
 public:
  explicit BumpFunction(int nodes = 2048);
  static double value(double x);
  // int_1^2 psi(x) x^{w-1} dx, trapezoid in log x (the integrand is a smooth
  // bump, so the rule converges faster than any power).
  Complex mellin(Complex w) const;
  MellinFunction mellin_function() const;
  // mellin(re + i (t0 + j h)) for j = 0..count-1, by rotation recurrence.
  std::vector<Complex> mellin_on_line(double re, double t0, double h, std::size_t count) const;

 private:
  std::vector<double> v_;
  std::vector<double> weights_;
};

struct PsiParams {
  double sigma = -0.5;     // any line with sigma > -1
  double tail_tol = 1e-10; // relative to the kernel peak
  double max_cutoff = 6000.0;
  int nodes_per_unit = 8;  // trapezoid resolution before pole-distance refinement
};

// Psi^{+-}(y) = (1/2 pi i) int_(sigma) (pi^2 y)^{-s} G^{+-}(s) psit(-s) ds with
// psit the Mellin transform of the test function.
class PsiKernel {
 public:
  PsiKernel(int sign, double spectral, const MellinFunction& mellin_psi, const PsiParams& params = {});
  // Same kernel; the bump's transform is tabulated along the line in one pass.
  PsiKernel(int sign, double spectral, const BumpFunction& bump, const PsiParams& params = {});
  Complex operator()(double y) const;
  double t_cutoff() const { return t_cutoff_; }
  std::size_t node_count() const { return sum_.size(); }
  int sign() const { return sign_; }

 private:
  using LineTransform = std::function<std::vector<Complex>(double t0, double h, std::size_t count)>;
  void build(double spectral, const MellinFunction& pointwise, const LineTransform& on_line);

  int sign_;
  PsiParams params_;
  double t_cutoff_ = 0;
  double step_ = 0;
  LineSum sum_;
};

Complex voronoi_Psi(int sign, double y, double spectral, const MellinFunction& mellin_psi, const PsiParams& params = {});

}  // namespace mforge::special
