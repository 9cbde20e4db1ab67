#include <algorithm>
#include <charconv>
#include <limits>
#include <cmath>
#include <sstream>

#include <boost/math/statistics/linear_regression.hpp>

#include "moment_forge/error.hpp"
#include "moment_forge/moment.hpp"

namespace mforge::moment {

Rational kim_sarnak_theta() { return Rational(7, 64); }

namespace {

void require_moment_modulus(std::int64_t q) {
  if (q < 5 || !chars::is_prime(q)) {
    std::ostringstream msg;
    msg << "moment modulus must be a prime >= 5, got " << q;
    if (q >= 4 && !chars::is_prime(q)) msg << " (divisible by " << chars::smallest_factor(q) << ")";
    throw UsageError(msg.str());
  }
}

// sum_{n = r mod q} seq[n-1], r = 0..q-1, optionally conjugated.
std::vector<Complex> residue_sums(const std::vector<Complex>& seq, std::int64_t q, bool conjugate) {
  std::vector<std::vector<Complex>> buckets(static_cast<std::size_t>(q));
  for (std::size_t i = 0; i < seq.size(); ++i) {
    buckets[(i + 1) % static_cast<std::size_t>(q)].push_back(conjugate ? std::conj(seq[i]) : seq[i]);
  }
  std::vector<Complex> out(static_cast<std::size_t>(q));
  for (std::size_t r = 0; r < out.size(); ++r) out[r] = pairwise_sum(buckets[r]);
  return out;
}

// sum_{r, r' units} x_r y_r' K(r, r')
template <class Kernel>
Complex bilinear(const std::vector<Complex>& x, const std::vector<Complex>& y, std::int64_t q, Kernel kernel) {
  std::vector<Complex> rows;
  rows.reserve(static_cast<std::size_t>(q - 1));
  for (std::int64_t r = 1; r < q; ++r) {
    std::vector<Complex> row;
    row.reserve(static_cast<std::size_t>(q - 1));
    for (std::int64_t s = 1; s < q; ++s) row.push_back(y[static_cast<std::size_t>(s)] * kernel(r, s));
    rows.push_back(x[static_cast<std::size_t>(r)] * pairwise_sum(row));
  }
  return pairwise_sum(rows);
}

}  // namespace

MomentContext::MomentContext(std::int64_t q, const EvaluationPoint& s0, const maass::MaassForm& form,
                             const MomentParams& params)
    : point_(s0),
      form_(form),
      params_(params),
      table_((require_moment_modulus(q), q)),
      dirichlet_(s0, q, params.afe),
      twisted_(s0, form, q, params.afe),
      characters_(chars::enumerate_characters(table_, chars::Parity::even, true)) {}

DirectMoment lhs_direct(const MomentContext& ctx) {
  const auto& chis = ctx.characters();
  DirectMoment out;
  out.terms.resize(chis.size());
  parallel_for(chis.size(), ctx.params().afe.threads, [&](std::size_t i) {
    const int j = chis[i];
    CharacterTerm& t = out.terms[i];
    t.j = j;
    lfun::AFEResult w, v;
    try {
      w = ctx.twisted().evaluate(ctx.table(), j);
      v = ctx.dirichlet().evaluate(ctx.table(), j);
    } catch (const Error& e) {
      std::ostringstream msg;
      msg << "character " << j << " mod " << ctx.q() << ": " << e.what();
      if (e.kind() == ErrorKind::usage) throw UsageError(msg.str());
      throw NumericError(msg.str());
    }
    t.twisted = w.value;
    t.dirichlet = v.value;
    t.product = w.value * std::conj(v.value);
    t.bound = w.truncation_bound * (std::abs(v.value) + v.truncation_bound) + v.truncation_bound * std::abs(w.value);
  });
  std::vector<Complex> products;
  std::vector<double> bounds;
  for (const auto& t : out.terms) {
    products.push_back(t.product);
    bounds.push_back(t.bound);
  }
  out.value = pairwise_sum(products);
  out.truncation_bound = pairwise_sum(bounds);
  return out;
}

Complex lhs_moment(std::int64_t q, const EvaluationPoint& s0, const maass::MaassForm& form, const MomentParams& params) {
  return lhs_direct(MomentContext(q, s0, form, params)).value;
}

STerms s_terms_closed_form(const MomentContext& ctx) {
  const std::int64_t q = ctx.q();
  const double qd = static_cast<double>(q);
  // conj L(s0, chi) = sum a_m conj chi(m) + tau(conj chi) conj(P_V) sum b_m chi(m)
  // L(s0, f x chi)   = sum c_n chi(n)      + tau(chi)^2 P_W     sum d_n conj chi(n)
  const auto& V = ctx.dirichlet();
  const auto& W = ctx.twisted();
  const Complex pv = std::conj(V.prefactor());
  const Complex pw = W.prefactor();
  const auto A = residue_sums(V.first(), q, true);
  const auto B = residue_sums(V.dual(), q, true);
  const auto C = residue_sums(W.first(), q, false);
  const auto D = residue_sums(W.dual(), q, false);

  STerms s;
  // sum over even primitive chi of conj chi(m) chi(n)
  s.s1 = bilinear(A, C, q, [&](std::int64_t m, std::int64_t n) { return Complex(chars::closed::orthogonality(q, m, n)); });
  // chi(m) chi(n) tau(conj chi)
  s.s2 = pv * bilinear(B, C, q, [&](std::int64_t m, std::int64_t n) {
           return 0.5 * (chars::closed::gauss_twisted(q, m, n, chars::Sign::plus) +
                         chars::closed::gauss_twisted(q, m, n, chars::Sign::minus));
         });
  // chi(m) conj chi(n) tau(conj chi) tau(chi)^2 = q chi(m) conj chi(n) tau(chi)
  s.s3 = pv * pw * bilinear(B, D, q, [&](std::int64_t m, std::int64_t n) {
           return 0.5 * qd * (chars::closed::inverse_twisted(q, m, n, chars::Sign::plus) +
                              chars::closed::inverse_twisted(q, m, n, chars::Sign::minus));
         });
  // conj chi(m) conj chi(n) tau(chi)^2
  const chars::closed::KloostermanTable kl(q);
  s.s4 = pw * bilinear(A, D, q, [&](std::int64_t m, std::int64_t n) { return Complex(kl.gauss_square(m, n)); });

  // Diagnostics of the first term.
  std::vector<Complex> s11;
  Complex a_units = 0.0, c_units = 0.0;
  for (std::int64_t r = 1; r < q; ++r) {
    const auto ru = static_cast<std::size_t>(r);
    s11.push_back(A[ru] * (C[ru] + C[static_cast<std::size_t>(q - r)]));
  }
  s.s11 = pairwise_sum(s11);
  {
    std::vector<Complex> units_a, units_c;
    for (std::int64_t r = 1; r < q; ++r) {
      units_a.push_back(A[static_cast<std::size_t>(r)]);
      units_c.push_back(C[static_cast<std::size_t>(r)]);
    }
    a_units = pairwise_sum(units_a);
    c_units = pairwise_sum(units_c);
  }
  s.s12 = a_units * c_units;
  std::vector<Complex> diag;
  const std::size_t overlap = std::min(V.first().size(), W.first().size());
  for (std::size_t i = 0; i < overlap; ++i) {
    if ((i + 1) % static_cast<std::size_t>(q) == 0) continue;
    diag.push_back(std::conj(V.first()[i]) * W.first()[i]);
  }
  s.s11_star_star = pairwise_sum(diag);
  s.s11_star = s.s11 - s.s11_star_star;
  return s;
}

double main_term(std::int64_t q, double sigma0, const maass::MaassForm& form, double max_error) {
  return 0.5 * static_cast<double>(q) * lfun::l_f(2.0 * sigma0, form, max_error).value;
}

MomentReport run_moment(std::int64_t q, const EvaluationPoint& s0, const maass::MaassForm& form, const MomentParams& params) {
  const MomentContext ctx(q, s0, form, params);
  MomentReport r;
  r.q = q;
  r.sigma0 = s0.sigma0();
  r.t0 = s0.t0();
  DirectMoment direct = lhs_direct(ctx);
  r.lhs_direct = direct.value;
  r.truncation_bound = direct.truncation_bound;
  r.characters = std::move(direct.terms);
  r.s = s_terms_closed_form(ctx);
  const lfun::LfValue l = lfun::l_f(2.0 * s0.sigma0(), form, params.lf_max_error);
  r.l_value = l.value;
  r.l_error = l.error_estimate;
  r.l_method = l.method;
  r.main_term = 0.5 * static_cast<double>(q) * l.value;
  r.residual = r.lhs_direct - r.main_term;
  r.identity_gap = std::abs(r.lhs_direct - r.s.total());
  r.identity_tolerance = std::max(params.identity_floor, 20.0 * r.truncation_bound);
  r.v_terms = ctx.dirichlet().first().size();
  r.v_dual_terms = ctx.dirichlet().dual().size();
  r.w_terms = ctx.twisted().first().size();
  r.w_dual_terms = ctx.twisted().dual().size();
  return r;
}

Rational Envelope::max() const { return std::max({r1, r2, r3, r4}); }

Envelope envelope_exponents(Rational sigma0, Rational theta) {
  Envelope e;
  const Rational one(1);
  const Rational beta1 = beta_params(sigma0, theta).beta1;
  e.r1 = Rational(1, 4);
  e.r2 = Rational(3, 2) * (one - sigma0) + theta;
  e.r3 = Rational(1, 2) + Rational(1, 2) * (one - sigma0);
  e.r4 = Rational(3, 2) - (one + beta1) * sigma0;
  return e;
}

ExponentFit fit_residuals(std::vector<MomentReport> reports, Rational theta) {
  if (reports.size() < 4) {
    throw UsageError("exponent fit needs at least 4 primes, got " + std::to_string(reports.size()));
  }
  ExponentFit fit;
  std::vector<double> x, y;
  for (const auto& r : reports) {
    fit.q_list.push_back(r.q);
    const double mag = std::abs(r.residual);
    if (!(mag > 0.0) || !std::isfinite(mag)) throw NumericError("residual at q = " + std::to_string(r.q) + " is not positive and finite");
    fit.residuals.push_back(mag);
    fit.phases.push_back(std::arg(r.residual));
    x.push_back(std::log(static_cast<double>(r.q)));
    y.push_back(std::log(mag));
  }
  const double mean = pairwise_sum(x) / static_cast<double>(x.size());
  double sxx = 0.0;
  for (double v : x) sxx += (v - mean) * (v - mean);
  if (!(sxx > 0.0)) throw NumericError("exponent fit is degenerate: all q equal");
  const auto [c0, c1] = boost::math::statistics::simple_ordinary_least_squares(x, y);
  fit.intercept = c0;
  fit.slope = c1;
  double sse = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (c0 + c1 * x[i]);
    sse += e * e;
  }
  fit.slope_stderr = std::sqrt(sse / static_cast<double>(x.size() - 2) / sxx);
  const Rational sigma0 = to_rational(reports.front().sigma0);
  fit.envelope = envelope_exponents(sigma0, theta);
  fit.predicted_exponent = boost::rational_cast<double>(fit.envelope.max());
  fit.reports = std::move(reports);
  return fit;
}

ExponentFit exponent_fit(const std::vector<std::int64_t>& q_list, const EvaluationPoint& s0, const maass::MaassForm& form,
                         const MomentParams& params) {
  if (q_list.size() < 4) throw UsageError("exponent fit needs at least 4 primes, got " + std::to_string(q_list.size()));
  for (std::int64_t q : q_list) require_moment_modulus(q);
  std::vector<MomentReport> reports;
  for (std::int64_t q : q_list) reports.push_back(run_moment(q, s0, form, params));
  return fit_residuals(std::move(reports));
}

std::vector<std::int64_t> default_prime_grid() { return {5, 7, 11, 13, 17, 19, 23, 29, 31, 37}; }

Rational MBranches::max() const { return std::max({b[0], b[1], b[2], b[3]}); }

MBranches m_exponent_branches(Rational sigma0, Rational theta) {
  if (sigma0 < Rational(1, 2) || sigma0 >= Rational(1)) throw UsageError("M(sigma0) needs 1/2 <= sigma0 < 1");
  if (theta < 0 || theta > Rational(7, 64)) throw UsageError("M(sigma0) needs 0 <= theta <= 7/64");
  const Rational one(1);
  const Rational inner = sigma0 * (Rational(2) + 2 * theta + sigma0 - 2 * sigma0 * theta);
  const Rational den[4] = {one, 3 * sigma0 - one - 2 * theta, sigma0, -one - theta + inner};
  const Rational num[4] = {2 * (one - sigma0), 3 - 3 * sigma0 + 2 * theta, one - sigma0, 5 + 5 * theta - inner};
  MBranches m;
  for (int i = 0; i < 4; ++i) {
    if (den[i] <= 0) throw NumericError("M(sigma0): non-positive denominator in branch " + std::to_string(i + 1));
    m.b[i] = num[i] / den[i];
  }
  return m;
}

Rational m_exponent(Rational sigma0, Rational theta) { return m_exponent_branches(sigma0, theta).max(); }

double m_exponent(double sigma0, double theta) {
  if (!(sigma0 >= 0.5 && sigma0 < 1.0)) throw UsageError("M(sigma0) needs 1/2 <= sigma0 < 1");
  if (!(theta >= 0.0 && theta <= 7.0 / 64.0)) throw UsageError("M(sigma0) needs 0 <= theta <= 7/64");
  const double inner = sigma0 * (2.0 + 2.0 * theta + sigma0 - 2.0 * sigma0 * theta);
  const double den[4] = {1.0, 3.0 * sigma0 - 1.0 - 2.0 * theta, sigma0, -1.0 - theta + inner};
  const double num[4] = {2.0 * (1.0 - sigma0), 3.0 - 3.0 * sigma0 + 2.0 * theta, 1.0 - sigma0, 5.0 + 5.0 * theta - inner};
  double best = -1.0;
  for (int i = 0; i < 4; ++i) {
    if (!(den[i] > 0.0)) throw NumericError("M(sigma0): non-positive denominator in branch " + std::to_string(i + 1));
    best = std::max(best, num[i] / den[i]);
  }
  return best;
}

Rational parse_rational(const std::string& text) {
  auto bad = [&] { return UsageError("not a rational number: '" + text + "'"); };
  if (text.empty()) throw bad();
  if (const auto slash = text.find('/'); slash != std::string::npos) {
    try {
      std::size_t used = 0;
      const long long p = std::stoll(text.substr(0, slash), &used);
      if (used != slash) throw bad();
      const std::string rest = text.substr(slash + 1);
      const long long d = std::stoll(rest, &used);
      if (used != rest.size() || d == 0) throw bad();
      return Rational(p, d);
    } catch (const std::logic_error&) {
      throw bad();
    }
  }
  std::size_t i = 0;
  bool negative = false;
  if (text[i] == '-' || text[i] == '+') negative = text[i++] == '-';
  long long num = 0, den = 1;
  bool digits = false, dot = false;
  for (; i < text.size(); ++i) {
    const char ch = text[i];
    if (ch == '.' && !dot) {
      dot = true;
      continue;
    }
    if (ch < '0' || ch > '9') throw bad();
    if (num > 100'000'000'000'000LL) throw UsageError("too many digits in '" + text + "'");
    digits = true;
    num = num * 10 + (ch - '0');
    if (dot) den *= 10;
  }
  if (!digits) throw bad();
  return Rational(negative ? -num : num, den);
}

Rational to_rational(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::fixed);
  if (res.ec != std::errc()) throw UsageError("cannot represent " + std::to_string(x) + " exactly");
  return parse_rational(std::string(buf, res.ptr));
}

BetaParams beta_params(Rational sigma0, Rational theta) {
  const Rational one(1);
  BetaParams p;
  p.beta1 = sigma0 * (one - 2 * theta) / (2 * (one + theta));
  p.beta2 = (one + 4 * theta) / (2 * (one + theta));
  const Rational rhs = (one - p.beta1) * sigma0 + Rational(1, 2);
  const Rational lhs1 = Rational(1, 2) + (one - sigma0) * p.beta1 + p.beta2 * sigma0;
  const Rational lhs2 = one + (one - sigma0) * p.beta1 - (one - sigma0) * p.beta2 + (2 - p.beta2) * theta;
  p.balanced_exactly = lhs1 == rhs && lhs2 == rhs;
  const double s = boost::rational_cast<double>(sigma0), t = boost::rational_cast<double>(theta);
  const double b1 = s * (1.0 - 2.0 * t) / (2.0 * (1.0 + t)), b2 = (1.0 + 4.0 * t) / (2.0 * (1.0 + t));
  const double r = (1.0 - b1) * s + 0.5;
  p.balance_gap[0] = std::abs(0.5 + (1.0 - s) * b1 + b2 * s - r);
  p.balance_gap[1] = std::abs(1.0 + (1.0 - s) * b1 - (1.0 - s) * b2 + (2.0 - b2) * t - r);
  return p;
}

R4Comparison r4_comparison(Rational theta) {
  const Rational one(1);
  R4Comparison r;
  // g(s) = 3/2 - s - (1 - 2 theta)/(2 (1 + theta)) s^2
  r.a = -(one - 2 * theta) / (2 * (one + theta));
  r.b = -one + Rational(87, 52);
  r.c = Rational(3, 2) - Rational(87, 52) - Rational(37, 26) * theta;
  r.vertex = -r.b / (2 * r.a);
  r.max_value = r.c - r.b * r.b / (4 * r.a);
  return r;
}

NonvanishingReport nonvanishing_scan(std::int64_t q, const EvaluationPoint& s0, const maass::MaassForm& form,
                                     const MomentParams& params) {
  const MomentContext ctx(q, s0, form, params);
  NonvanishingReport r;
  r.q = q;
  r.sigma0 = s0.sigma0();
  r.t0 = s0.t0();
  r.terms = lhs_direct(ctx).terms;
  r.min_modulus = std::numeric_limits<double>::infinity();
  for (const auto& t : r.terms) {
    const double mod = std::abs(t.product);
    if (mod < r.min_modulus) {
      r.min_modulus = mod;
      r.minimizer = t.j;
    }
    if (mod > 10.0 * t.bound) r.some_nonvanishing = true;
  }
  r.m_value = m_exponent(s0.sigma0(), 7.0 / 64.0);
  r.threshold = std::pow(s0.tau(), r.m_value);
  r.regime_reachable = static_cast<double>(q) >= r.threshold;
  return r;
}

}  // namespace mforge::moment
