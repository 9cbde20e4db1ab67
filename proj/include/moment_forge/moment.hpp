#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <boost/rational.hpp>

#include "moment_forge/l_functions.hpp"

namespace mforge::moment {

using Rational = boost::rational<long long>;
using special::EvaluationPoint;

// theta = 7/64
Rational kim_sarnak_theta();

struct MomentParams {
  lfun::AfeParams afe;
  double identity_floor = 1e-6;  // identity tolerance is max(floor, 20 * truncation bound)
  double lf_max_error = 1e-6;
};

// Both AFEs for one (q, s0), built once and shared by the two routes.
class MomentContext {
 public:
  MomentContext(std::int64_t q, const EvaluationPoint& s0, const maass::MaassForm& form, const MomentParams& params = {});

  std::int64_t q() const { return table_.q(); }
  const EvaluationPoint& point() const { return point_; }
  const chars::CharacterTable& table() const { return table_; }
  const lfun::DirichletAfe& dirichlet() const { return dirichlet_; }
  const lfun::TwistedAfe& twisted() const { return twisted_; }
  const maass::MaassForm& form() const { return form_; }
  const MomentParams& params() const { return params_; }
  // Even primitive characters, ascending index.
  const std::vector<int>& characters() const { return characters_; }

 private:
  EvaluationPoint point_;
  const maass::MaassForm& form_;
  MomentParams params_;
  chars::CharacterTable table_;
  lfun::DirichletAfe dirichlet_;
  lfun::TwistedAfe twisted_;
  std::vector<int> characters_;
};

struct CharacterTerm {
  int j = 0;
  Complex twisted;    // L(s0, f x chi)
  Complex dirichlet;  // L(s0, chi)
  Complex product;    // twisted * conj(dirichlet)
  double bound = 0;   // truncation bound of the product
};

struct DirectMoment {
  Complex value;
  double truncation_bound = 0;
  std::vector<CharacterTerm> terms;
};
// Sum over even primitive chi of L(s0, f x chi) conj L(s0, chi).
DirectMoment lhs_direct(const MomentContext& ctx);
Complex lhs_moment(std::int64_t q, const EvaluationPoint& s0, const maass::MaassForm& form, const MomentParams& params = {});

struct STerms {
  Complex s1, s2, s3, s4;
  // S1 = phi(q)/2 S11 - S12, S11 = S11* + S11**
  Complex s11, s11_star, s11_star_star, s12;
  Complex total() const { return s1 + s2 + s3 + s4; }
};
// The AFE products expanded into double sums over (m, n), with the character
// sums replaced by their closed forms. The weights are aggregated by residue
// class mod q first, so each S_i costs O(cutoff + q^2).
STerms s_terms_closed_form(const MomentContext& ctx);

// (q/2) L(2 sigma0, f)
double main_term(std::int64_t q, double sigma0, const maass::MaassForm& form, double max_error = 1e-6);

struct MomentReport {
  std::int64_t q = 0;
  double sigma0 = 0, t0 = 0;
  Complex lhs_direct;
  STerms s;
  double l_value = 0;  // L(2 sigma0, f)
  double l_error = 0;
  std::string l_method;
  double main_term = 0;
  Complex residual;  // lhs_direct - main_term
  double identity_gap = 0;
  double identity_tolerance = 0;
  double truncation_bound = 0;
  std::size_t v_terms = 0, v_dual_terms = 0, w_terms = 0, w_dual_terms = 0;
  std::vector<CharacterTerm> characters;
  bool identity_ok() const { return identity_gap <= identity_tolerance; }
};
MomentReport run_moment(std::int64_t q, const EvaluationPoint& s0, const maass::MaassForm& form,
                        const MomentParams& params = {});

// q-exponents of R1..R4 with epsilon = 0.
struct Envelope {
  Rational r1, r2, r3, r4;
  Rational max() const;
};
Envelope envelope_exponents(Rational sigma0, Rational theta);

struct ExponentFit {
  std::vector<std::int64_t> q_list;
  std::vector<double> residuals;  // |lhs - main|
  std::vector<double> phases;     // arg(lhs - main), reported only
  double slope = 0;
  double intercept = 0;
  double slope_stderr = 0;
  double predicted_exponent = 0;  // max q-exponent of R1..R4
  Envelope envelope;
  std::vector<MomentReport> reports;
};
// Least squares of log|residual| against log q.
ExponentFit fit_residuals(std::vector<MomentReport> reports, Rational theta = kim_sarnak_theta());
ExponentFit exponent_fit(const std::vector<std::int64_t>& q_list, const EvaluationPoint& s0, const maass::MaassForm& form,
                         const MomentParams& params = {});

std::vector<std::int64_t> default_prime_grid();

// The four branches of M(sigma0) and their max.
struct MBranches {
  Rational b[4];
  Rational max() const;
};
MBranches m_exponent_branches(Rational sigma0, Rational theta);
Rational m_exponent(Rational sigma0, Rational theta);
double m_exponent(double sigma0, double theta);
// Decimal text such as "0.5" or "7/64" read exactly.
Rational parse_rational(const std::string& text);
// Exact value of the shortest decimal that round-trips x (0.6 -> 3/5).
Rational to_rational(double x);

struct BetaParams {
  Rational beta1, beta2;
  // |lhs - rhs| of the two balancing equations, evaluated in double
  double balance_gap[2] = {0, 0};
  bool balanced_exactly = false;  // both equations hold in rational arithmetic
};
BetaParams beta_params(Rational sigma0, Rational theta);

// g(sigma0) - (87/52 - 87/52 sigma0 + 37/26 theta) = a sigma0^2 + b sigma0 + c, with
// g(sigma0) = 3/2 - (1 + beta1) sigma0: the comparison of R4 with the older
// error term. a = -(1 - 2 theta)/(2 (1 + theta)).
struct R4Comparison {
  Rational a, b, c;
  Rational vertex;     // -b / (2a)
  Rational max_value;  // c - b^2 / (4a), the max over all sigma0
  bool negative() const { return max_value < 0; }
};
R4Comparison r4_comparison(Rational theta);

struct NonvanishingReport {
  std::int64_t q = 0;
  double sigma0 = 0, t0 = 0;
  std::vector<CharacterTerm> terms;
  int minimizer = -1;       // character index with the smallest |product|
  double min_modulus = 0;
  bool some_nonvanishing = false;  // some |product| > 10 * its truncation bound
  double m_value = 0;              // M(sigma0) at theta = 7/64
  double threshold = 0;            // tau^{M(sigma0)}
  bool regime_reachable = false;   // q >= threshold
};
NonvanishingReport nonvanishing_scan(std::int64_t q, const EvaluationPoint& s0, const maass::MaassForm& form,
                                     const MomentParams& params = {});

}  // namespace mforge::moment
