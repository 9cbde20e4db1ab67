#include <doctest.h>

#include <cmath>
#include <cstring>

#include "moment_forge/error.hpp"
#include "moment_forge/moment.hpp"

using namespace mforge;
using namespace mforge::moment;

namespace {

const maass::MaassForm& bundled() {
  static const maass::MaassForm form = maass::load_form(maass::bundled_fixture_path());
  return form;
}

bool same_bits(Complex a, Complex b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST_SUITE("moment") {
  TEST_CASE("direct route: one character at q = 5, order invariance at q = 7") {
    const MomentContext c5(5, EvaluationPoint(0.5, 0.0), bundled());
    const DirectMoment d5 = lhs_direct(c5);
    REQUIRE(d5.terms.size() == 1);
    const Complex w = c5.twisted().evaluate(c5.table(), 2).value;
    const Complex v = c5.dirichlet().evaluate(c5.table(), 2).value;
    CHECK(same_bits(d5.value, w * std::conj(v)));

    const MomentContext c7(7, EvaluationPoint(0.5, 0.0), bundled());
    const DirectMoment d7 = lhs_direct(c7);
    REQUIRE(d7.terms.size() == 2);
    CHECK(std::abs(d7.value - (d7.terms[1].product + d7.terms[0].product)) < 1e-12);
  }

  TEST_CASE("route equivalence") {
    for (auto [q, sigma] : {std::pair<std::int64_t, double>{5, 0.5}, {7, 0.75}, {11, 0.6}}) {
      const MomentReport r = run_moment(q, EvaluationPoint(sigma, 0.0), bundled());
      CHECK(r.identity_gap <= 1e-6);
      CHECK(r.identity_ok());
      // S1 = phi/2 S11 - S12 and S11 = S11* + S11**
      CHECK(std::abs(r.s.s1 - (0.5 * static_cast<double>(q - 1) * r.s.s11 - r.s.s12)) < 1e-12 * std::max(1.0, std::abs(r.s.s1)));
      CHECK(std::abs(r.s.s11 - r.s.s11_star - r.s.s11_star_star) < 1e-14);
    }
    const MomentReport t = run_moment(7, EvaluationPoint(0.6, 1.0), bundled());
    CHECK(t.identity_gap <= 1e-6);
  }

  TEST_CASE("S11** approaches L(2 sigma0, f) as q grows") {
    const double l = lfun::l_f(1.2, bundled()).value;
    double last = 1e9;
    for (std::int64_t q : {5, 11, 17, 29}) {
      const MomentContext ctx(q, EvaluationPoint(0.6, 0.0), bundled());
      const double d = std::abs(s_terms_closed_form(ctx).s11_star_star - l);
      CHECK(d < last);
      last = d;
    }
  }

  TEST_CASE("main term") {
    const auto& f = bundled();
    CHECK(main_term(5, 0.9, f) == doctest::Approx(2.5 * lfun::l_f(1.8, f).value).epsilon(1e-15));
    CHECK(main_term(11, 0.5, f) == doctest::Approx(5.5 * lfun::l_f(1.0, f).value).epsilon(1e-15));
    CHECK(main_term(14, 0.5, f) / main_term(7, 0.5, f) == 2.0);
  }

  TEST_CASE("exponent fit plumbing") {
    CHECK_THROWS_AS(exponent_fit({11}, EvaluationPoint(0.5, 0.0), bundled()), UsageError);
    CHECK_THROWS_AS(exponent_fit({5, 7, 9, 11}, EvaluationPoint(0.5, 0.0), bundled()), UsageError);
    const Envelope e = envelope_exponents(Rational(1, 2), kim_sarnak_theta());
    CHECK(e.max() == Rational(7, 8) + Rational(21, 568));
    CHECK(e.max() == e.r4);
    CHECK(boost::rational_cast<double>(e.max()) == doctest::Approx(0.9120).epsilon(1e-4));

    // synthetic residuals c q^{0.7}: the fit must return 0.7 exactly
    std::vector<MomentReport> rs;
    for (std::int64_t q : {5, 7, 11, 13, 17}) {
      MomentReport r;
      r.q = q;
      r.sigma0 = 0.5;
      r.residual = Complex(0.0, 3.0 * std::pow(static_cast<double>(q), 0.7));
      rs.push_back(r);
    }
    const ExponentFit fit = fit_residuals(rs);
    CHECK(fit.slope == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(fit.slope_stderr < 1e-12);
    CHECK(fit.phases[0] == doctest::Approx(M_PI / 2));
  }

  TEST_CASE("M(sigma0)") {
    const Rational theta = kim_sarnak_theta();
    CHECK(m_exponent(Rational(1, 2), theta) == Rational(543, 25));
    const MBranches half = m_exponent_branches(Rational(1, 2), theta);
    CHECK(half.b[3] == (15 + 18 * theta) / (1 - 2 * theta));
    CHECK(half.b[1] == (3 + 4 * theta) / (1 - 4 * theta));
    const MBranches zero = m_exponent_branches(Rational(1, 2), Rational(0));
    CHECK(zero.b[0] == Rational(1));
    CHECK(zero.b[1] == Rational(3));
    CHECK(zero.b[2] == Rational(1));
    CHECK(zero.b[3] == Rational(15));
    CHECK(m_exponent(0.5, 7.0 / 64.0) == doctest::Approx(21.72).epsilon(1e-14));
    // non-increasing on a 50-point grid, each branch and the max
    MBranches prev = m_exponent_branches(Rational(1, 2), theta);
    for (int k = 1; k < 50; ++k) {
      const MBranches cur = m_exponent_branches(Rational(1, 2) + Rational(k, 100), theta);
      for (int i = 0; i < 4; ++i) CHECK(cur.b[i] <= prev.b[i]);
      CHECK(cur.max() <= prev.max());
      prev = cur;
    }
    CHECK_THROWS_AS(m_exponent(Rational(2, 5), theta), UsageError);
    CHECK_THROWS_AS(m_exponent(Rational(1, 2), Rational(1, 8)), UsageError);
  }

  TEST_CASE("beta parameters and the R4 comparison") {
    const BetaParams b = beta_params(Rational(1, 2), kim_sarnak_theta());
    CHECK(b.beta1 == Rational(25, 142));
    CHECK(b.beta2 == Rational(46, 71));
    CHECK(b.balanced_exactly);
    CHECK(b.balance_gap[0] <= 1e-12);
    CHECK(b.balance_gap[1] <= 1e-12);
    for (int k = 0; k < 50; ++k) {
      const BetaParams g = beta_params(Rational(1, 2) + Rational(k, 100), kim_sarnak_theta());
      CHECK(g.balanced_exactly);
    }
    const BetaParams z = beta_params(Rational(3, 5), Rational(0));
    CHECK(z.beta1 == Rational(3, 10));
    CHECK(z.beta2 == Rational(1, 2));

    const R4Comparison r = r4_comparison(kim_sarnak_theta());
    CHECK(r.a == Rational(-25, 71));
    CHECK(-r.a == (1 - 2 * kim_sarnak_theta()) / (2 * (1 + kim_sarnak_theta())));
    CHECK(r.b == Rational(35, 52));
    CHECK(r.c == Rational(-547, 1664));
    CHECK(r.vertex == Rational(497, 520));
    CHECK(r.negative());
  }

  TEST_CASE("rationals") {
    CHECK(parse_rational("0.5") == Rational(1, 2));
    CHECK(parse_rational("7/64") == Rational(7, 64));
    CHECK(parse_rational("-0.125") == Rational(-1, 8));
    CHECK(to_rational(0.6) == Rational(3, 5));
    CHECK_THROWS_AS(parse_rational("1/0"), UsageError);
    CHECK_THROWS_AS(parse_rational("abc"), UsageError);
  }

  TEST_CASE("nonvanishing scan") {
    const NonvanishingReport r5 = nonvanishing_scan(5, EvaluationPoint(0.5, 0.0), bundled());
    REQUIRE(r5.terms.size() == 1);
    CHECK(r5.minimizer == 2);
    CHECK(r5.min_modulus == std::abs(r5.terms[0].product));
    const NonvanishingReport r13 = nonvanishing_scan(13, EvaluationPoint(0.5, 0.0), bundled());
    CHECK(r13.terms.size() == 5);
    CHECK(r13.some_nonvanishing);
    CHECK(r13.m_value == doctest::Approx(21.72));
    CHECK(r13.threshold == doctest::Approx(std::pow(3.0, 21.72)));
    CHECK_FALSE(r13.regime_reachable);
  }

  TEST_CASE("moduli and determinism") {
    CHECK_THROWS_AS(run_moment(9, EvaluationPoint(0.5, 0.0), bundled()), UsageError);
    CHECK_THROWS_AS(run_moment(3, EvaluationPoint(0.5, 0.0), bundled()), UsageError);
    MomentParams one, three;
    three.afe.threads = 3;
    const MomentReport a = run_moment(13, EvaluationPoint(0.5, 0.0), bundled(), one);
    const MomentReport b = run_moment(13, EvaluationPoint(0.5, 0.0), bundled(), three);
    CHECK(same_bits(a.lhs_direct, b.lhs_direct));
    CHECK(same_bits(a.s.total(), b.s.total()));
  }
}
