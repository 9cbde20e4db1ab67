#include "moment_forge/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "moment_forge/char_sums.hpp"
#include "moment_forge/error.hpp"
#include "moment_forge/l_functions.hpp"
#include "moment_forge/special_functions.hpp"

namespace mforge::verify {

namespace {

using chars::CharacterTable;
using special::EvaluationPoint;
using special::WeightFunction;
using special::WeightParams;

// Spectral parameter of the bundled form; the special suite does not load f.
constexpr double kReferenceSpectral = 13.779751351890738944;
constexpr double kOddSpectral = 9.5337;

std::string sci(double x) {
  std::ostringstream o;
  o.precision(3);
  o << std::scientific << x;
  return o.str();
}

std::string complex_text(Complex z) {
  std::ostringstream o;
  o.precision(6);
  o << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
  return o.str();
}

// Tracks max(value) against a limit; the detail names the worst inputs, or the
// first violation when there is one.
class Tracker {
 public:
  Tracker(std::string name, double limit, bool upper = true) : name_(std::move(name)), limit_(limit), upper_(upper) {}

  void observe(double value, const std::string& inputs) {
    ++count_;
    const bool bad = !std::isfinite(value) || (upper_ ? value > limit_ : value < limit_);
    if (bad && first_bad_.empty()) first_bad_ = inputs + ": " + sci(value);
    if (!seen_ || (upper_ ? value > worst_ : value < worst_) || !std::isfinite(value)) {
      worst_ = value;
      worst_inputs_ = inputs;
      seen_ = true;
    }
  }
  Check result() const {
    Check c;
    c.name = name_;
    c.limit = limit_;
    c.worst = worst_;
    c.passed = first_bad_.empty() && count_ > 0;
    std::ostringstream d;
    if (!first_bad_.empty()) {
      d << "violated (" << (upper_ ? "limit " : "floor ") << sci(limit_) << ") at " << first_bad_;
    } else if (count_ == 0) {
      d << "no cases evaluated";
    } else {
      d << count_ << " cases, " << (upper_ ? "max " : "min ") << sci(worst_) << " at " << worst_inputs_ << " ("
        << (upper_ ? "limit " : "floor ") << sci(limit_) << ")";
    }
    c.detail = d.str();
    return c;
  }

 private:
  std::string name_;
  double limit_;
  bool upper_;
  double worst_ = 0;
  std::string worst_inputs_;
  bool seen_ = false;
  std::size_t count_ = 0;
  std::string first_bad_;
};

std::vector<std::int64_t> primes_up_to(std::int64_t lo, std::int64_t hi) {
  std::vector<std::int64_t> out;
  for (std::int64_t p = lo; p <= hi; ++p)
    if (chars::is_prime(p)) out.push_back(p);
  return out;
}

template <class F>
SuiteReport timed(const std::string& name, F&& body) {
  const auto t0 = std::chrono::steady_clock::now();
  SuiteReport r;
  r.suite = name;
  body(r);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

std::string qmn(std::int64_t q, std::int64_t m, std::int64_t n) {
  return "q=" + std::to_string(q) + " m=" + std::to_string(m) + " n=" + std::to_string(n);
}

WeightParams with_contour(double c) {
  WeightParams p;
  p.contour_re = c;
  return p;
}

}  // namespace

bool SuiteReport::passed() const {
  return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"char-sums", "special", "maass", "l-eval", "voronoi"};
  return names;
}

bool suite_needs_form(const std::string& suite) { return suite == "maass" || suite == "voronoi"; }

SuiteReport char_sums_suite(const Tolerances& tol) {
  return timed("char-sums", [&](SuiteReport& r) {
    Tracker orth("orthogonality", tol.identity), gt("gauss-twisted", tol.identity), it("inverse-twisted", tol.identity),
        gs("gauss-square", tol.identity), mod("gauss-modulus", tol.gauss), prod("gauss-product", tol.gauss);
    Tracker weil("kloosterman-weil", 1.0);  // |S(a,b;q)| / 2 sqrt q
    for (std::int64_t q : primes_up_to(3, tol.char_q_max)) {
      const CharacterTable t(q);
      std::mt19937_64 rng(tol.seed ^ static_cast<std::uint64_t>(q));
      std::uniform_int_distribution<std::int64_t> pick(1, 10 * q);
      for (int k = 0; k < tol.char_pairs; ++k) {
        std::int64_t m = 0, n = 0;
        do {
          m = pick(rng);
          n = pick(rng);
        } while (m % q == 0 || n % q == 0);
        const std::string in = qmn(q, m, n);
        orth.observe(chars::orthogonality_sum(t, m, n).gap(), in);
        for (chars::Sign s : chars::kSigns) {
          const std::string ins = in + (s == chars::Sign::plus ? " +" : " -");
          gt.observe(chars::gauss_twisted_sum(t, m, n, s).gap(), ins);
          it.observe(chars::inverse_twisted_sum(t, m, n, s).gap(), ins);
        }
        gs.observe(chars::gauss_square_identity(t, m, n).gap(), in);
        weil.observe(std::abs(chars::kloosterman(m, n, q)) / (2.0 * std::sqrt(static_cast<double>(q))), in);
      }
      for (int j : chars::enumerate_characters(t, chars::Parity::even, true)) {
        const std::string in = "q=" + std::to_string(q) + " j=" + std::to_string(j);
        mod.observe(std::abs(std::abs(chars::gauss_sum(t, j)) - std::sqrt(static_cast<double>(q))), in);
        const auto g = chars::gauss_product_identity(t, j);
        prod.observe(std::abs(g.lhs - g.rhs), in);
      }
    }
    for (const Tracker* k : {&orth, &gt, &it, &gs, &mod, &prod, &weil}) r.checks.push_back(k->result());
  });
}

SuiteReport special_suite(const Tolerances& tol) {
  return timed("special", [&](SuiteReport& r) {
    {
      // Gamma(s) Gamma(1-s) = pi / sin(pi s)
      Tracker c("gamma-reflection", 1e-12);
      for (Complex s : {Complex(0.3, 0.0), Complex(0.25, 5.0), Complex(-2.5, 1.0), Complex(0.7, -20.0)}) {
        const Complex lhs = special::complex_gamma(s) * special::complex_gamma(1.0 - s);
        const Complex rhs = kPi / std::sin(kPi * s);
        c.observe(std::abs(lhs - rhs) / std::abs(rhs), "s=" + complex_text(s));
      }
      r.checks.push_back(c.result());
    }
    {
      // 1 - V_s(x) is carried by the pole at u = -s, so it scales like x^{sigma}.
      Tracker c("residue-scaling-V", 1e-2);
      Tracker lim("residue-normalization-V", 1e-3);
      for (Complex s : {Complex(0.5, 0.0), Complex(0.75, 2.0)}) {
        const auto v = WeightFunction::dirichlet(s);
        const Complex d6 = 1.0 - v(1e-6), d8 = 1.0 - v(1e-8);
        const double expect = std::pow(100.0, s.real());
        c.observe(std::abs(std::abs(d6) / std::abs(d8) - expect) / expect, "s=" + complex_text(s) + " x=1e-6,1e-8");
        lim.observe(std::abs(d8), "s=" + complex_text(s) + " x=1e-8");
      }
      r.checks.push_back(c.result());
      r.checks.push_back(lim.result());
    }
    {
      Tracker c("residue-normalization-W", tol.residue);
      for (Complex s : {Complex(0.5, 0.0), Complex(0.9, 0.0), Complex(0.75, 2.0)}) {
        const auto w = WeightFunction::maass(s, kReferenceSpectral);
        for (double x : {1e-8, 1e-6}) c.observe(std::abs(w(x) - 1.0), "s=" + complex_text(s) + " x=" + sci(x));
      }
      r.checks.push_back(c.result());
    }
    {
      Tracker c("contour-shift", tol.contour_shift);
      for (double re : {1.0, 1.5, 3.0}) {
        const std::string in = " contour " + sci(re);
        c.observe(std::abs(WeightFunction::dirichlet(0.7, with_contour(re))(1.0) - WeightFunction::dirichlet(0.7)(1.0)),
                  "V s=0.7 x=1" + in);
        c.observe(std::abs(WeightFunction::dirichlet({0.6, 1.0}, with_contour(re))(25.0) -
                           WeightFunction::dirichlet({0.6, 1.0})(25.0)),
                  "V s=0.6+1i x=25" + in);
        c.observe(std::abs(WeightFunction::maass(0.9, kReferenceSpectral, with_contour(re))(2.0) -
                           WeightFunction::maass(0.9, kReferenceSpectral)(2.0)),
                  "W s=0.9 x=2" + in);
      }
      r.checks.push_back(c.result());
    }
    {
      Tracker c("conjugation", 1e-12);
      const Complex s(0.65, 3.0);
      const auto v = WeightFunction::dirichlet(s), vbar = WeightFunction::dirichlet(std::conj(s));
      const auto w = WeightFunction::maass(s, kReferenceSpectral), wbar = WeightFunction::maass(std::conj(s), kReferenceSpectral);
      for (double x : {0.01, 1.0, 40.0, 400.0}) {
        c.observe(std::abs(std::conj(v(x)) - vbar(x)), "V x=" + sci(x));
        c.observe(std::abs(std::conj(w(x)) - wbar(x)), "W x=" + sci(x));
      }
      r.checks.push_back(c.result());
    }
    {
      // |V| <= min(1, (x/sqrt tau)^{-A}), |W| <= min(1, (x/tau)^{-A}) with certified constants.
      Tracker env("decay-envelope", 1.0);  // |value| / envelope
      for (Complex s : {Complex(0.5, 0.0), Complex(0.65, 3.0)}) {
        const auto v = WeightFunction::dirichlet(s);
        const auto w = WeightFunction::maass(s, kReferenceSpectral);
        for (double x : {1.0, 5.0, 20.0, 100.0, 1000.0}) {
          env.observe(std::abs(v(x)) / v.envelope(x), "V s=" + complex_text(s) + " x=" + sci(x));
          env.observe(std::abs(w(x)) / w.envelope(x), "W s=" + complex_text(s) + " x=" + sci(x));
        }
      }
      r.checks.push_back(env.result());
      // |V_{1/2}(100 sqrt 3)| is 6.2261e-6 by independent quadrature, above the
      // 1e-6 one might expect; assert the oracle and the envelope (x/sqrt tau)^{-2}.
      const EvaluationPoint half(0.5, 0.0);
      const double xv = 100.0 * std::sqrt(3.0);
      const double v = std::abs(special::weight_V(half, xv));
      Tracker oracle("decay-oracle-V", 1e-12);
      oracle.observe(std::abs(v - 6.22610512528874347e-6), "V s=0.5 x=100 sqrt 3");
      Tracker bound("decay-bound-V", 1.0);  // |V| / (x/sqrt tau)^-2
      bound.observe(v / std::pow(xv / std::sqrt(half.tau()), -2.0), "V s=0.5 x=100 sqrt 3");
      Tracker spot("decay-spot-W", tol.decay);
      spot.observe(std::abs(special::weight_W(half, 1500.0, kOddSpectral)), "W s=0.5 T=9.5337 x=1500");
      for (const Tracker* k : {&oracle, &bound, &spot}) r.checks.push_back(k->result());
    }
  });
}

SuiteReport maass_suite(const maass::MaassForm& form, const Tolerances& tol) {
  return timed("maass", [&](SuiteReport& r) {
    const maass::HeckeReport h = maass::hecke_report(form);
    {
      Check c;
      c.name = "hecke-relations";
      c.passed = h.ok();
      c.worst = std::max(h.max_defect, h.lambda_one_defect);
      c.limit = h.tolerance;
      std::ostringstream d;
      if (h.first_violation) {
        d << "violated at (m, n) = (" << h.first_violation->first << ", " << h.first_violation->second << ")";
      } else if (h.lambda_one_defect > h.tolerance) {
        d << "lambda(1) defect " << sci(h.lambda_one_defect);
      } else {
        d << h.pairs_checked << " pairs";
      }
      d << ", max defect " << sci(h.max_defect) << " at (" << h.worst_m << ", " << h.worst_n << "), tolerance "
        << sci(h.tolerance);
      c.detail = d.str();
      r.checks.push_back(c);
    }
    {
      Tracker c("multiplicativity", h.tolerance);
      c.observe(h.multiplicative_defect, "coprime pairs");
      c.observe(h.prime_recursion_defect, "prime-power recursion");
      r.checks.push_back(c.result());
    }
    std::vector<double> xs;
    for (double x = 10.0; x <= static_cast<double>(form.depth()); x *= 10.0) xs.push_back(x);
    if (form.depth() >= 1) xs.push_back(static_cast<double>(form.depth()));
    {
      Tracker c("rankin-selberg", tol.rankin_selberg_max);
      for (const auto& row : maass::rankin_selberg_profile(form, xs)) c.observe(row.ratio, "x=" + sci(row.x));
      r.checks.push_back(c.result());
    }
    {
      std::vector<double> alphas = {0.0, 0.5, 1.0 / 3.0, 0.25, 1.0 / 7.0, std::sqrt(2.0) - 1.0};
      std::vector<std::size_t> lengths;
      for (double x : xs) lengths.push_back(static_cast<std::size_t>(x));
      Tracker c("wilton", tol.wilton_max);
      for (const auto& row : maass::wilton_profile(form, alphas, lengths)) {
        c.observe(row.normalized, "alpha=" + sci(row.alpha) + " n=" + std::to_string(row.n));
      }
      r.checks.push_back(c.result());
    }
  });
}

SuiteReport l_eval_suite(const Tolerances& tol) {
  return timed("l-eval", [&](SuiteReport& r) {
    Tracker c("dirichlet-afe-vs-hurwitz", tol.afe);
    for (std::int64_t q : {5, 7, 11, 13}) {
      const CharacterTable t(q);
      for (const EvaluationPoint& s : {EvaluationPoint(0.5, 0.0), EvaluationPoint(0.6, 1.0), EvaluationPoint(0.75, 2.0)}) {
        const lfun::DirichletAfe afe(s, q);
        for (int j : chars::enumerate_characters(t, chars::Parity::even, true)) {
          const Complex a = afe.evaluate(t, j).value;
          const Complex h = lfun::l_chi_hurwitz(s.s0(), t, j);
          c.observe(std::abs(a - h), "q=" + std::to_string(q) + " j=" + std::to_string(j) + " s0=" + complex_text(s.s0()));
        }
      }
    }
    r.checks.push_back(c.result());

    Tracker refl("dirichlet-reflection", 1e-12);
    const CharacterTable t7(7);
    for (int j : chars::enumerate_characters(t7, chars::Parity::even, true)) {
      const Complex a = lfun::l_chi_afe(EvaluationPoint(0.6, 1.0), t7, j).value;
      const Complex b = lfun::l_chi_afe(EvaluationPoint(0.6, -1.0), t7, t7.conjugate(j)).value;
      refl.observe(std::abs(a - std::conj(b)), "q=7 j=" + std::to_string(j) + " s0=0.6+1i");
    }
    r.checks.push_back(refl.result());
  });
}

SuiteReport voronoi_suite(const maass::MaassForm& form, const Tolerances& tol) {
  return timed("voronoi", [&](SuiteReport& r) {
    // Corrupted coefficients make the identity fail for reasons unrelated to
    // the kernels; refuse to run the panel on them.
    const maass::HeckeReport h = maass::hecke_report(form);
    Check gate;
    gate.name = "hecke-gate";
    gate.passed = h.ok();
    gate.worst = h.max_defect;
    gate.limit = h.tolerance;
    if (h.ok()) {
      gate.detail = "fixture passes Hecke validation";
    } else {
      std::ostringstream d;
      d << "fixture fails Hecke validation";
      if (h.first_violation) d << " at (m, n) = (" << h.first_violation->first << ", " << h.first_violation->second << ")";
      d << ", max defect " << sci(h.max_defect) << "; Voronoi panel not run";
      gate.detail = d.str();
    }
    r.checks.push_back(gate);
    if (!h.ok()) return;

    Tracker c("voronoi-panel", tol.voronoi);
    lfun::VoronoiParams vp;
    vp.tol = tol.voronoi;
    lfun::VoronoiValidator v(form, vp);
    for (double N : {50.0, 100.0, 200.0}) {
      for (std::int64_t cc = 1; cc <= 10; ++cc) {
        for (std::int64_t d = 1; d <= std::max<std::int64_t>(1, cc - 1); ++d) {
          if (std::gcd(cc, d) != 1) continue;
          const lfun::VoronoiResult res = v.check(cc, d, N);
          c.observe(res.gap, "c=" + std::to_string(cc) + " d=" + std::to_string(d) + " N=" + std::to_string(static_cast<int>(N)));
        }
      }
    }
    r.checks.push_back(c.result());
  });
}

std::vector<SuiteReport> run_verify(const std::string& suite, const FormProvider& form, const Tolerances& tol) {
  const auto& names = suite_names();
  if (suite != "all" && std::find(names.begin(), names.end(), suite) == names.end()) {
    std::string known;
    for (const auto& n : names) known += n + ", ";
    throw UsageError("unknown suite '" + suite + "' (known: " + known + "all)");
  }
  std::vector<SuiteReport> out;
  for (const auto& name : names) {
    if (suite != "all" && suite != name) continue;
    if (name == "char-sums") out.push_back(char_sums_suite(tol));
    if (name == "special") out.push_back(special_suite(tol));
    if (name == "maass") out.push_back(maass_suite(form(), tol));
    if (name == "l-eval") out.push_back(l_eval_suite(tol));
    if (name == "voronoi") out.push_back(voronoi_suite(form(), tol));
  }
  return out;
}

}  // namespace mforge::verify
