#include <doctest.h>

#include <cmath>
#include <vector>

#include "moment_forge/error.hpp"
#include "moment_forge/special_functions.hpp"
#include "oracles/gamma_oracle.hpp"

using namespace mforge;
using namespace mforge::special;

namespace {

constexpr double kTEven = 13.779751351890738944;
constexpr double kTOdd = 9.5337;

double rel_err(Complex a, Complex b) { return std::abs(a - b) / std::abs(b); }

WeightParams with_contour(double c) {
  WeightParams p;
  p.contour_re = c;
  return p;
}

}  // namespace

TEST_SUITE("special_functions") {
  TEST_CASE("Gamma basics and poles") {
    CHECK(std::abs(complex_gamma(1.0) - 1.0) < 1e-15);
    CHECK(std::abs(complex_gamma(0.5) - std::sqrt(kPi)) < 1e-15);
    CHECK(rel_err(complex_gamma({2.0, 3.0}), {-0.0823952726656119, 0.0917742874352593}) < 1e-13);
    CHECK_THROWS_AS(complex_gamma(0.0), PoleError);
    CHECK_THROWS_AS(complex_gamma(-3.0), PoleError);
    CHECK_THROWS_AS(log_gamma(-7.0), PoleError);
    try {
      complex_gamma(-2.0);
    } catch (const PoleError& e) {
      CHECK(std::string(e.what()).find("-2") != std::string::npos);
    }
  }

  TEST_CASE("Gamma panel against the multiprecision oracle") {
    const std::vector<Complex> panel = {
        {1.0, 0.0},    {0.5, 0.0},    {2.0, 3.0},     {10.3, 0.0},  {29.5, 0.0},  {0.1, 20.0},  {-0.5, 0.5},
        {-10.7, 3.0},  {-20.5, 0.0},  {3.0, -25.0},   {15.0, 15.0}, {0.25, 29.0}, {0.75, 2.0},  {1e-3, 1e-3},
        {-0.999, 0.0}, {5.0, -0.3},   {-3.5, 0.2},    {0.5, -14.0}, {7.25, 6.5},  {-5.2, -9.1}, {1.5, 28.0},
        {-29.4, 0.4},  {20.0, -20.0}, {0.375, 0.125}, {2.5, 10.0}};
    for (const Complex& s : panel) {
      CAPTURE(s);
      CHECK(rel_err(complex_gamma(s), oracle::gamma_mp(s)) < 1e-13);
      const Complex lg = log_gamma(s);
      CHECK(rel_err(std::exp(lg), oracle::gamma_mp(s)) < 1e-13);
    }
  }

  TEST_CASE("evaluation point range") {
    const EvaluationPoint p(0.5, -4.0);
    CHECK(p.tau() == 7.0);
    CHECK(p.s0() == Complex(0.5, -4.0));
    CHECK_THROWS_AS(EvaluationPoint(0.49, 0.0), UsageError);
    CHECK_THROWS_AS(EvaluationPoint(1.0, 0.0), UsageError);
    CHECK(EvaluationPoint(1.2, 0.0, true).extended());
  }

  TEST_CASE("gamma ratios") {
    CHECK(std::abs(gamma_ratio_dirichlet(0.5) - 1.0) < 1e-14);
    CHECK(std::abs(gamma_ratio_maass(0.5, kTOdd) - 1.0) < 1e-14);
    CHECK(rel_err(gamma_ratio_dirichlet({0.75, 5.0}), {0.848031593675468453, 0.634465299452212682}) < 1e-13);
    const Complex rm = gamma_ratio_maass({0.75, 5.0}, kTOdd);
    CHECK(rel_err(rm, {-0.761980240031781086, 0.44054617031688373}) < 1e-13);
    CHECK(rel_err(gamma_ratio_maass({0.6, 1.0}, kTEven), {0.00196413799217160292, -0.855134605059755868}) < 1e-13);
    // Stirling magnitude tau^{1-2 sigma0} within a factor 10
    const double tau8 = 8.0;
    CHECK(std::abs(rm) < 10.0 * std::pow(tau8, -0.5));
    CHECK(std::abs(rm) > 0.1 * std::pow(tau8, -0.5));
    for (double t0 : {7.0, 12.0, 30.0}) {
      const double tau = t0 + 3.0;
      const double mag = std::abs(gamma_ratio_maass({0.8, t0}, kTEven));
      CHECK(mag < 10.0 * std::pow(tau, 1.0 - 1.6));
      CHECK(mag > 0.1 * std::pow(tau, 1.0 - 1.6));
    }
    CHECK(std::abs(gamma_dirichlet(1.0) - 1.0) < 1e-15);
    CHECK_THROWS_AS(gamma_dirichlet(-2.0), PoleError);
  }

  TEST_CASE("V against line-integral oracle") {
    const auto v_half = WeightFunction::dirichlet(0.5);
    CHECK(std::abs(v_half(1.0) - 0.112863653924018368) < 1e-13);
    CHECK(std::abs(v_half(1e-6) - 0.99811400731121681) < 1e-13);
    CHECK(std::abs(v_half(100.0 * std::sqrt(3.0)) - 6.22610512528874347e-6) < 1e-15);
    CHECK(std::abs(WeightFunction::dirichlet(0.7)(1.0) - 0.147046579093868689) < 1e-13);
    CHECK(std::abs(WeightFunction::dirichlet({0.6, 1.0})(0.3) - Complex(0.48706405839263577, 0.261862438090552268)) < 1e-13);
    CHECK(std::abs(WeightFunction::dirichlet({0.75, 2.0})(7.0) - Complex(0.0199100254316960796, 0.0331019783311073413)) <
          1e-13);
  }

  TEST_CASE("W against line-integral oracle") {
    CHECK(std::abs(WeightFunction::maass(0.5, kTOdd)(1e-6) - 1.0) < 1e-8);
    const double w1500 = std::abs(WeightFunction::maass(0.5, kTOdd)(1500.0));
    CHECK(std::abs(w1500 - 5.61302783380829933e-7) < 1e-15);
    CHECK(w1500 <= 1e-6);
    CHECK(std::abs(WeightFunction::maass(0.9, kTEven)(2.0) - 0.525622793900608662) < 1e-13);
    CHECK(std::abs(WeightFunction::maass(0.5, kTEven)(0.1) - 0.985590172033609738) < 1e-13);
    CHECK(std::abs(WeightFunction::maass({0.75, 2.0}, kTEven)(3.0) - Complex(0.409047538933241916, -0.000501744298279968625)) <
          1e-13);
  }

  TEST_CASE("residue normalization") {
    // 1 - V(x) is governed by the pole at u = -s0, so it scales like x^{1/2}.
    const auto v = WeightFunction::dirichlet(0.5);
    const double d6 = std::abs(1.0 - v(1e-6));
    const double d8 = std::abs(1.0 - v(1e-8));
    CHECK(d6 / d8 == doctest::Approx(10.0).epsilon(1e-3));
    // For W the poles at u = -s -+ iT carry a factor e^{u^2} ~ e^{-T^2}, so the
    // deficit is far below the O(x^{1/4}) left-line bound.
    const auto w = WeightFunction::maass(0.5, kTEven);
    CHECK(std::abs(w(1e-6) - 1.0) < 1e-8);
    for (double x : {1e-8, 1e-6, 1e-4}) CHECK(std::abs(w(x) - 1.0) <= 1e-10 * std::pow(x / 1e-4, 0.25));
  }

  TEST_CASE("contour-shift invariance") {
    for (double c : {1.0, 1.5, 3.0}) {
      CHECK(std::abs(WeightFunction::dirichlet(0.7, with_contour(c))(1.0) - WeightFunction::dirichlet(0.7)(1.0)) < 1e-10);
      CHECK(std::abs(WeightFunction::maass(0.9, kTEven, with_contour(c))(2.0) - WeightFunction::maass(0.9, kTEven)(2.0)) <
            1e-10);
      CHECK(std::abs(WeightFunction::dirichlet({0.6, 1.0}, with_contour(c))(25.0) -
                     WeightFunction::dirichlet({0.6, 1.0})(25.0)) < 1e-10);
    }
  }

  TEST_CASE("conjugation and decay envelope") {
    const Complex s(0.65, 3.0);
    const auto v = WeightFunction::dirichlet(s);
    const auto vbar = WeightFunction::dirichlet(std::conj(s));
    const auto w = WeightFunction::maass(s, kTEven);
    const auto wbar = WeightFunction::maass(std::conj(s), kTEven);
    for (double x : {0.01, 0.3, 1.0, 4.0, 40.0, 400.0}) {
      CHECK(std::abs(std::conj(v(x)) - vbar(x)) < 1e-12);
      CHECK(std::abs(std::conj(w(x)) - wbar(x)) < 1e-12);
    }
    // |V(x)| <= min(1, (x / sqrt(tau))^{-A}) up to the certified envelope constant.
    for (double x : {1.0, 5.0, 20.0, 100.0, 1000.0}) {
      CHECK(std::abs(v(x)) <= v.envelope(x));
      CHECK(std::abs(w(x)) <= w.envelope(x));
    }
    CHECK(v.envelope(1e4) < 1e-9);
    CHECK(std::abs(v(1e4)) <= v.envelope(1e4));
    CHECK_THROWS_AS(v(0.0), NumericError);
    CHECK_THROWS_AS(v(-1.0), NumericError);
  }

  TEST_CASE("quadrature failure is flagged") {
    WeightParams short_line;
    short_line.t_cutoff = 3.0;  // kernel ~ e^{4-9}, far above tail_tol at the endpoints
    CHECK_THROWS_AS(WeightFunction::dirichlet(0.5, short_line), NumericError);
    // s near the imaginary axis: no left line, and x -> 0 cancels catastrophically on Re u = 2.
    const auto v = WeightFunction::dirichlet(0.1);
    CHECK_THROWS_AS(v(1e-8), NumericError);
    CHECK(std::isfinite(std::abs(v(0.5))));
    WeightParams bad;
    bad.node_count = 10;
    CHECK_THROWS_AS(WeightFunction::dirichlet(0.5, bad), UsageError);
  }

  TEST_CASE("Voronoi G") {
    const Complex s1(-0.99, 3.0), s2(0.5, -20.0);
    CHECK(std::abs(voronoi_G(1, s1, kTEven) - Complex(0.0252511175295678476, -0.0421962057666923594)) < 1e-13);
    CHECK(std::abs(voronoi_G(-1, s1, kTEven)) < 1e-13);
    // G+ cancels two terms of size ~16 here; compare absolutely.
    CHECK(std::abs(voronoi_G(1, s2, kTEven) - Complex(-5.08866610936517282e-8, -2.00496782804120402e-8)) < 1e-12);
    CHECK(rel_err(voronoi_G(-1, s2, kTEven), {-6.1498932701125485, 15.6086062939018614}) < 1e-12);
    for (double t : {-40.0, -13.0, 0.0, 2.0, 13.78, 100.0}) {
      const Complex s(-0.99, t);
      for (int sign : {1, -1}) {
        const Complex g = voronoi_G(sign, s, kTEven);
        CHECK(std::isfinite(g.real()));
        CHECK(std::isfinite(g.imag()));
        CHECK(std::abs(std::conj(voronoi_G(sign, std::conj(s), kTEven)) - g) <= 1e-12 * (1.0 + std::abs(g)));
      }
    }
    CHECK_THROWS_AS(voronoi_G(0, s1, kTEven), UsageError);
  }

  TEST_CASE("bump Mellin transform") {
    const BumpFunction bump;
    CHECK(std::abs(bump.mellin(1.0) - 0.221996908084039719) < 1e-14);
    CHECK(std::abs(bump.mellin({0.5, 3.0}) - Complex(0.0663935761507376333, 0.154166444637237945)) < 1e-14);
    CHECK(std::abs(bump.mellin({-0.5, -40.0}) - Complex(0.000288021608383168293, 0.00198862554689134981)) < 1e-14);
    const auto line = bump.mellin_on_line(0.5, -40.0, 0.01, 3000);
    for (std::size_t j : {0u, 1234u, 2999u}) {
      CHECK(std::abs(line[j] - bump.mellin({0.5, -40.0 + 0.01 * static_cast<double>(j)})) < 1e-14);
    }
  }

  TEST_CASE("Psi kernels") {
    const BumpFunction bump;
    PsiParams left, right, fine, near_pole;
    right.sigma = 0.5;
    right.tail_tol = 1e-10;
    fine.nodes_per_unit = 20;
    near_pole.sigma = -0.9;
    for (int sign : {1, -1}) {
      const PsiKernel a(sign, kTEven, bump, left);
      const PsiKernel b(sign, kTEven, bump, right);
      for (double y : {0.05, 1.0, 5.0, 60.0}) {
        CAPTURE(sign);
        CAPTURE(y);
        CHECK(std::abs(a(y) - b(y)) < 1e-8);
      }
      if (sign == 1) {
        const PsiKernel c(sign, kTEven, bump, fine);
        const PsiKernel d(sign, kTEven, bump, near_pole);
        for (double y : {0.05, 1.0, 60.0}) CHECK(std::abs(a(y) - c(y)) < 1e-9);
        CHECK(std::abs(a(1.0) - d(1.0)) < 1e-8);
      }
      // Small y: |Psi(y)| / y^{0.9} stays bounded.
      double prev_ratio = 0.0;
      for (double y = 1e-2; y > 1e-7; y /= 10.0) {
        const double ratio = std::abs(a(y)) / std::pow(y, 0.9);
        CHECK(ratio < 10.0);
        prev_ratio = ratio;
      }
      CHECK(prev_ratio < 1.0);
    }
    // Generic handle path agrees with the tabulated bump path (coarse bump keeps
    // the pointwise transform cheap; both paths see the same quadrature).
    const BumpFunction coarse(128);
    PsiParams quick;
    quick.tail_tol = 1e-6;
    CHECK(std::abs(voronoi_Psi(1, 2.0, kTEven, coarse.mellin_function(), quick) - PsiKernel(1, kTEven, coarse, quick)(2.0)) <
          1e-12);
    PsiParams bad;
    bad.sigma = -1.0;
    CHECK_THROWS_AS(PsiKernel(1, kTEven, bump, bad), UsageError);
  }
}
