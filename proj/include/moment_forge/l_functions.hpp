#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <vector>

#include "moment_forge/char_sums.hpp"
#include "moment_forge/maass.hpp"
#include "moment_forge/special_functions.hpp"

namespace mforge::lfun {

using special::EvaluationPoint;

struct AfeParams {
  double tail_tol = 1e-12;         // certified bound on the two truncated tails of L(s0, chi)
  // Same for L(s0, f x chi). W decays like exp(-(log x)^2/4), so at fixture
  // depth 1e5 a certified 1e-3 is what the default prime grid (q <= 37) allows.
  double twisted_tail_tol = 1e-3;
  double cutoff_multiplier = 1.0;  // scales the certified cutoffs (stability checks)
  special::WeightParams weight;
  std::size_t max_terms = 20'000'000;
  unsigned threads = 1;  // for building the weighted sequences; results do not depend on it
};

struct AFEResult {
  Complex value;
  std::size_t first_sum_terms = 0;
  std::size_t second_sum_terms = 0;
  double truncation_bound = 0;
};

// Smallest M with
//   amplitude * sum_{n > M} |a_n| |n^{-s}| |w(k n)| <= target,
// certified through |w(x)| <= C(c) (scale x)^{-c} for each c on the weight's
// envelope grid. With `density` = 0 the |a_n| are at most 1 and the tail is
// bounded by an integral; otherwise sum_{n <= x} |a_n| <= density * x is
// assumed and partial summation is used.
struct TailCertificate {
  std::size_t cutoff = 0;
  double bound = 0;
};
double tail_bound(const special::WeightFunction& w, double k, double sigma, double amplitude, double density,
                  std::size_t M);
TailCertificate certify_cutoff(const special::WeightFunction& w, double k, double sigma, double amplitude,
                               double density, double target, double multiplier, std::size_t max_terms);

// L(s0, chi) for all even primitive chi mod a prime q, from
//   sum chi(n) n^{-s0} V_{s0}(n / sqrt q)
//   + tau(chi) q^{-s0} gamma(1 - s0)/gamma(s0) sum conj chi(n) n^{s0 - 1} V_{1 - s0}(n / sqrt q).
// The weighted coefficient sequences do not depend on chi and are built once.
class DirichletAfe {
 public:
  DirichletAfe(const EvaluationPoint& s0, std::int64_t q, const AfeParams& params = {});
  // n^{-s0} V_{s0}(n / sqrt q), index n - 1
  const std::vector<Complex>& first() const { return first_; }
  // n^{s0 - 1} V_{1 - s0}(n / sqrt q)
  const std::vector<Complex>& dual() const { return dual_; }
  // q^{-s0} gamma(1 - s0)/gamma(s0)
  Complex prefactor() const { return prefactor_; }
  double truncation_bound() const { return first_bound_ + dual_bound_; }
  std::int64_t q() const { return q_; }
  AFEResult evaluate(const chars::CharacterTable& table, int j) const;

 private:
  std::int64_t q_;
  Complex prefactor_;
  std::vector<Complex> first_, dual_;
  double first_bound_ = 0, dual_bound_ = 0;
};

// L(s0, f x chi) from
//   sum lambda(n) chi(n) n^{-s0} W_{s0}(n/q)
//   + tau(chi)^2 q^{-2 s0} gamma~(1 - s0)/gamma~(s0) sum lambda(n) conj chi(n) n^{s0 - 1} W_{1 - s0}(n/q).
// Throws DepthError naming the required depth when the fixture is too short.
// q = 1 gives L(s0, f) itself (root number 1 for an even level-one form).
class TwistedAfe {
 public:
  TwistedAfe(const EvaluationPoint& s0, const maass::MaassForm& form, std::int64_t q, const AfeParams& params = {});
  const std::vector<Complex>& first() const { return first_; }
  const std::vector<Complex>& dual() const { return dual_; }
  // q^{-2 s0} gamma~(1 - s0)/gamma~(s0)
  Complex prefactor() const { return prefactor_; }
  double truncation_bound() const { return first_bound_ + dual_bound_; }
  double density() const { return density_; }
  std::int64_t q() const { return q_; }
  AFEResult evaluate(const chars::CharacterTable& table, int j) const;
  // q = 1 only.
  AFEResult evaluate_untwisted() const;

 private:
  std::int64_t q_;
  Complex prefactor_;
  std::vector<Complex> first_, dual_;
  double first_bound_ = 0, dual_bound_ = 0;
  double density_ = 0;
};

// Max over 1 <= x <= depth of sum_{n <= x} |lambda(n)| / x; the tail
// certificates assume it persists beyond the fixture.
double coefficient_density(const maass::MaassForm& form);

// Rejects chi that is not even and primitive.
void require_even_primitive(const chars::CharacterTable& table, int j);

AFEResult l_chi_afe(const EvaluationPoint& s0, const chars::CharacterTable& table, int j, const AfeParams& params = {});
AFEResult l_twisted_afe(const EvaluationPoint& s0, const maass::MaassForm& form, const chars::CharacterTable& table,
                        int j, const AfeParams& params = {});

// zeta(s, a) for 0 < a <= 1 by Euler-Maclaurin; *error receives the remainder
// bound. At s = 1 returns the finite part (the 1/(s-1) pole term is dropped).
Complex hurwitz_zeta(Complex s, double a, double* error = nullptr);
// q^{-s} sum_a chi(a) zeta(s, a/q). Any non-principal chi. Throws NumericError
// if the remainder bound exceeds rel_tol * |L|.
Complex l_chi_hurwitz(Complex s, const chars::CharacterTable& table, int j, double rel_tol = 1e-10);

struct LadderResult {
  Complex value;
  double error_estimate = 0;
  std::vector<double> scales;        // X values, ascending
  std::vector<Complex> rungs;        // smoothed sums at each X
  std::vector<Complex> extrapolated; // Neville extrapolation using rungs 0..k
  std::vector<double> differences;   // |extrapolated[k] - extrapolated[k-1]|
};

struct LadderParams {
  double top_scale = 0;  // 0 selects depth / 25
  int rungs = 5;         // X = top / 2^k, k = rungs-1 .. 0; X = top/32 is outside the asymptotic regime
};

// sum a_n n^{-s} e^{-n/X} over the fixture, extrapolated in 1/X -> 0.
// chi_j = -1 drops the twist. Requires Re s >= 0.9 for twisted sums (where
// the ladder converges at fixture depth); throws UsageError for X > depth/10
// and NumericError if the ladder differences fail to decrease.
LadderResult l_twisted_smoothed(Complex s, const maass::MaassForm& form, const chars::CharacterTable* table, int j,
                                const LadderParams& params = {});
Complex smoothed_sum(Complex s, const maass::MaassForm& form, const chars::CharacterTable* table, int j, double X);

struct LfValue {
  double value = 0;
  double error_estimate = 0;
  std::string method;  // "direct" or "ladder"
  std::size_t terms = 0;
};
// L(s, f) for real s in [1, 2): the direct series with a partial-summation tail
// bound for s > 1, the smoothed ladder at s = 1 (or when the direct bound
// misses max_error). Throws DepthError if neither reaches max_error.
LfValue l_f(double s, const maass::MaassForm& form, double max_error = 1e-6);

// Max over depth/10 <= x <= depth of |sum_{n <= x} lambda(n)| / x^{0.6}; the
// direct L(s, f) tail bound assumes it persists beyond the fixture.
double partial_sum_constant(const maass::MaassForm& form);

struct VoronoiParams {
  double tol = 1e-4;          // acceptance target for |lhs - rhs|
  double stop_ratio = 1e-3;   // stop once a whole block of dual terms is below stop_ratio * tol
  std::size_t block = 100;
  special::PsiParams psi;
  int bump_nodes = 2048;
};

struct VoronoiResult {
  std::int64_t c = 0, d = 0, dbar = 0;
  double N = 0;
  Complex lhs, rhs;
  double gap = 0;
  std::size_t dual_terms = 0;
};

// lhs = sum lambda(n) e(n dbar / c) psi(n / N)
// rhs = c sum_{+-} sum lambda(n)/n e(+- n d / c) Psi^{+-}(n N / c^2)
// with psi the bump on [1, 2]. Kernels are built once; Psi values are cached
// per (c, N) and shared across residues d.
class VoronoiValidator {
 public:
  explicit VoronoiValidator(const maass::MaassForm& form, const VoronoiParams& params = {});
  VoronoiResult check(std::int64_t c, std::int64_t d, double N);

 private:
  struct DualSeries {
    std::size_t terms = 0;
    std::vector<Complex> psi_plus, psi_minus;  // index n - 1
  };
  const DualSeries& dual(std::int64_t c, double N);

  const maass::MaassForm& form_;
  VoronoiParams params_;
  special::BumpFunction bump_;
  std::unique_ptr<special::PsiKernel> plus_, minus_;
  std::map<std::pair<std::int64_t, double>, DualSeries> cache_;
};

VoronoiResult verify_voronoi(const maass::MaassForm& form, std::int64_t c, std::int64_t d, double N,
                             const VoronoiParams& params = {});

}  // namespace mforge::lfun
