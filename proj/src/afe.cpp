#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "moment_forge/error.hpp"
#include "moment_forge/l_functions.hpp"

namespace mforge::lfun {

using special::WeightFunction;

double tail_bound(const WeightFunction& w, double k, double sigma, double amplitude, double density, std::size_t M) {
  const double log_m = std::log(static_cast<double>(std::max<std::size_t>(M, 1)));
  const double log_scale = std::log(w.scale() * k);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& [c, constant] : w.envelope_table()) {
    const double a = sigma + c;
    if (a <= 1.0 + 1e-9) continue;
    // |w(k n)| n^{-sigma} <= C (scale k)^{-c} n^{-a}
    double log_t = std::log(constant) - c * log_scale + (1.0 - a) * log_m - std::log(a - 1.0);
    if (density > 0.0) log_t += std::log(density * a);
    best = std::min(best, std::exp(log_t));
  }
  return amplitude * best;
}

TailCertificate certify_cutoff(const WeightFunction& w, double k, double sigma, double amplitude, double density,
                               double target, double multiplier, std::size_t max_terms) {
  if (!(target > 0.0)) throw UsageError("tail target must be positive");
  if (!(multiplier >= 1.0)) throw UsageError("cutoff multiplier must be >= 1");
  auto f = [&](std::size_t M) { return tail_bound(w, k, sigma, amplitude, density, M); };
  std::size_t hi = 1;
  while (f(hi) > target) {
    if (hi > max_terms) {
      std::ostringstream msg;
      msg << "weight envelope does not certify a tail below " << target << " within " << max_terms << " terms";
      throw NumericError(msg.str());
    }
    hi *= 2;
  }
  std::size_t lo = hi / 2;  // f(lo) > target, or lo == 0
  while (hi - lo > 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (f(mid) > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  TailCertificate cert;
  cert.cutoff = static_cast<std::size_t>(std::ceil(multiplier * static_cast<double>(hi)));
  cert.bound = f(cert.cutoff);
  return cert;
}

void require_even_primitive(const chars::CharacterTable& table, int j) {
  if (j < 0 || j >= table.character_count()) throw UsageError("character index out of range");
  if (!table.is_primitive(j) || !table.is_even(j)) {
    std::ostringstream msg;
    msg << "character " << j << " mod " << table.q() << " is not even and primitive";
    throw UsageError(msg.str());
  }
}

namespace {

void require_modulus(const chars::CharacterTable& table, std::int64_t q) {
  if (table.q() != q) {
    std::ostringstream msg;
    msg << "character table is mod " << table.q() << " but the AFE was built for q = " << q;
    throw UsageError(msg.str());
  }
}

// sum_n coeffs[n-1] chi(n) (or conj chi(n))
Complex twisted_sum(const std::vector<Complex>& coeffs, const chars::CharacterTable& table, int j, bool conjugate) {
  const std::int64_t q = table.q();
  std::vector<Complex> terms(coeffs.size());
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    const auto n = static_cast<std::int64_t>(i + 1);
    if (n % q == 0) continue;
    const Complex chi = table.root(static_cast<std::int64_t>(j) * table.dlog(n));
    terms[i] = coeffs[i] * (conjugate ? std::conj(chi) : chi);
  }
  return pairwise_sum(terms);
}

}  // namespace

DirichletAfe::DirichletAfe(const EvaluationPoint& point, std::int64_t q, const AfeParams& params) : q_(q) {
  if (!chars::is_prime(q) || q < 3) throw UsageError("Dirichlet AFE needs an odd prime modulus, got " + std::to_string(q));
  const Complex s0 = point.s0();
  const WeightFunction v1 = WeightFunction::dirichlet(s0, params.weight);
  const WeightFunction v2 = WeightFunction::dirichlet(1.0 - s0, params.weight);
  const double k = 1.0 / std::sqrt(static_cast<double>(q));
  prefactor_ = std::exp(-s0 * std::log(static_cast<double>(q))) * special::gamma_ratio_dirichlet(s0);
  const double dual_amp = std::abs(prefactor_) * std::sqrt(static_cast<double>(q));
  const double target = 0.5 * params.tail_tol;
  const auto c1 = certify_cutoff(v1, k, s0.real(), 1.0, 0.0, target, params.cutoff_multiplier, params.max_terms);
  const auto c2 = certify_cutoff(v2, k, 1.0 - s0.real(), dual_amp, 0.0, target, params.cutoff_multiplier, params.max_terms);
  first_bound_ = c1.bound;
  dual_bound_ = c2.bound;
  first_.resize(c1.cutoff);
  dual_.resize(c2.cutoff);
  parallel_for(first_.size(), params.threads, [&](std::size_t i) {
    const double n = static_cast<double>(i + 1);
    first_[i] = std::exp(-s0 * std::log(n)) * v1(n * k);
  });
  parallel_for(dual_.size(), params.threads, [&](std::size_t i) {
    const double n = static_cast<double>(i + 1);
    dual_[i] = std::exp((s0 - 1.0) * std::log(n)) * v2(n * k);
  });
}

AFEResult DirichletAfe::evaluate(const chars::CharacterTable& table, int j) const {
  require_modulus(table, q_);
  require_even_primitive(table, j);
  const Complex tau = chars::gauss_sum(table, j);
  AFEResult r;
  r.value = twisted_sum(first_, table, j, false) + tau * prefactor_ * twisted_sum(dual_, table, j, true);
  r.first_sum_terms = first_.size();
  r.second_sum_terms = dual_.size();
  r.truncation_bound = truncation_bound();
  return r;
}

double coefficient_density(const maass::MaassForm& form) {
  double acc = 0.0, best = 0.0;
  for (std::size_t n = 1; n <= form.depth(); ++n) {
    acc += std::abs(form.lambda[n - 1]);
    best = std::max(best, acc / static_cast<double>(n));
  }
  return best;
}

TwistedAfe::TwistedAfe(const EvaluationPoint& point, const maass::MaassForm& form, std::int64_t q, const AfeParams& params)
    : q_(q) {
  if (q != 1 && (!chars::is_prime(q) || q < 3)) throw UsageError("twisted AFE needs an odd prime modulus, got " + std::to_string(q));
  if (!form.is_even()) throw UsageError("the twisted AFE assumes an even Maass form");
  const Complex s0 = point.s0();
  const double T = form.spectral_parameter;
  const WeightFunction w1 = WeightFunction::maass(s0, T, params.weight);
  const WeightFunction w2 = WeightFunction::maass(1.0 - s0, T, params.weight);
  const double qd = static_cast<double>(q);
  const double k = 1.0 / qd;
  prefactor_ = std::exp(-2.0 * s0 * std::log(qd)) * special::gamma_ratio_maass(s0, T);
  density_ = coefficient_density(form);
  const double target = 0.5 * params.twisted_tail_tol;
  const auto c1 = certify_cutoff(w1, k, s0.real(), 1.0, density_, target, params.cutoff_multiplier, params.max_terms);
  const auto c2 =
      certify_cutoff(w2, k, 1.0 - s0.real(), std::abs(prefactor_) * qd, density_, target, params.cutoff_multiplier, params.max_terms);
  const std::size_t need = std::max(c1.cutoff, c2.cutoff);
  if (need > form.depth()) {
    std::ostringstream msg;
    msg << "fixture depth " << form.depth() << " is too shallow for q = " << q << ", s0 = " << s0
        << ": the certified cutoff needs N >= " << need;
    throw DepthError(msg.str(), static_cast<long long>(need));
  }
  first_bound_ = c1.bound;
  dual_bound_ = c2.bound;
  first_.resize(c1.cutoff);
  dual_.resize(c2.cutoff);
  parallel_for(first_.size(), params.threads, [&](std::size_t i) {
    const double n = static_cast<double>(i + 1);
    first_[i] = form.lambda[i] * std::exp(-s0 * std::log(n)) * w1(n * k);
  });
  parallel_for(dual_.size(), params.threads, [&](std::size_t i) {
    const double n = static_cast<double>(i + 1);
    dual_[i] = form.lambda[i] * std::exp((s0 - 1.0) * std::log(n)) * w2(n * k);
  });
}

AFEResult TwistedAfe::evaluate(const chars::CharacterTable& table, int j) const {
  require_modulus(table, q_);
  require_even_primitive(table, j);
  const Complex tau = chars::gauss_sum(table, j);
  AFEResult r;
  r.value = twisted_sum(first_, table, j, false) + tau * tau * prefactor_ * twisted_sum(dual_, table, j, true);
  r.first_sum_terms = first_.size();
  r.second_sum_terms = dual_.size();
  r.truncation_bound = truncation_bound();
  return r;
}

AFEResult TwistedAfe::evaluate_untwisted() const {
  if (q_ != 1) throw UsageError("evaluate_untwisted needs q = 1");
  AFEResult r;
  r.value = pairwise_sum(first_) + prefactor_ * pairwise_sum(dual_);
  r.first_sum_terms = first_.size();
  r.second_sum_terms = dual_.size();
  r.truncation_bound = truncation_bound();
  return r;
}

AFEResult l_chi_afe(const EvaluationPoint& s0, const chars::CharacterTable& table, int j, const AfeParams& params) {
  require_even_primitive(table, j);
  return DirichletAfe(s0, table.q(), params).evaluate(table, j);
}

AFEResult l_twisted_afe(const EvaluationPoint& s0, const maass::MaassForm& form, const chars::CharacterTable& table,
                        int j, const AfeParams& params) {
  require_even_primitive(table, j);
  return TwistedAfe(s0, form, table.q(), params).evaluate(table, j);
}

}  // namespace mforge::lfun
