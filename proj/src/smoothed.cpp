#include <algorithm>
#include <cmath>
#include <sstream>

#include "moment_forge/error.hpp"
#include "moment_forge/l_functions.hpp"

namespace mforge::lfun {

namespace {

// Polynomial extrapolation to h = 0 through (h_i, v_i), i = 0..k (Neville).
Complex neville_at_zero(const std::vector<double>& h, const std::vector<Complex>& v, std::size_t k) {
  std::vector<Complex> p(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k + 1));
  for (std::size_t m = 1; m <= k; ++m) {
    for (std::size_t i = 0; i + m <= k; ++i) {
      p[i] = (h[i + m] * p[i] - h[i] * p[i + 1]) / (h[i + m] - h[i]);
    }
  }
  return p[0];
}

}  // namespace

Complex smoothed_sum(Complex s, const maass::MaassForm& form, const chars::CharacterTable* table, int j, double X) {
  if (!(X > 0.0)) throw UsageError("smoothing scale must be positive");
  std::vector<Complex> terms(form.depth());
  for (std::size_t i = 0; i < form.depth(); ++i) {
    const auto n = static_cast<std::int64_t>(i + 1);
    Complex chi = 1.0;
    if (table) {
      if (n % table->q() == 0) continue;
      chi = table->root(static_cast<std::int64_t>(j) * table->dlog(n));
    }
    const double nd = static_cast<double>(n);
    terms[i] = form.lambda[i] * chi * std::exp(-s * std::log(nd) - nd / X);
  }
  return pairwise_sum(terms);
}

LadderResult l_twisted_smoothed(Complex s, const maass::MaassForm& form, const chars::CharacterTable* table, int j,
                                const LadderParams& params) {
  if (s.real() < 0.9) throw UsageError("smoothed ladder needs Re s >= 0.9");
  if (params.rungs < 3) throw UsageError("ladder needs at least 3 rungs");
  if (table && (j <= 0 || j >= table->character_count())) throw UsageError("ladder needs a non-principal character index");
  const double depth = static_cast<double>(form.depth());
  const double top = params.top_scale > 0.0 ? params.top_scale : depth / 25.0;
  if (top > depth / 10.0) {
    std::ostringstream msg;
    msg << "smoothing scale X = " << top << " exceeds fixture depth / 10 = " << depth / 10.0;
    throw UsageError(msg.str());
  }
  LadderResult r;
  std::vector<double> h;
  for (int i = params.rungs - 1; i >= 0; --i) {
    const double X = top / std::ldexp(1.0, i);
    r.scales.push_back(X);
    h.push_back(1.0 / X);
    r.rungs.push_back(smoothed_sum(s, form, table, j, X));
  }
  for (std::size_t k = 0; k < r.rungs.size(); ++k) {
    r.extrapolated.push_back(neville_at_zero(h, r.rungs, k));
    if (k > 0) r.differences.push_back(std::abs(r.extrapolated[k] - r.extrapolated[k - 1]));
  }
  r.value = r.extrapolated.back();
  // Differences at the rounding floor may wobble; anything above it must shrink.
  const double floor = 1e-13 * std::max(1.0, std::abs(r.value));
  for (std::size_t k = 1; k < r.differences.size(); ++k) {
    if (r.differences[k] > floor && r.differences[k] >= r.differences[k - 1]) {
      std::ostringstream msg;
      msg << "smoothed ladder does not converge at s = " << s << ": difference " << r.differences[k]
          << " after " << r.differences[k - 1];
      throw NumericError(msg.str());
    }
  }
  // Cut at the fixture depth: |sum_{n > N} a_n n^{-s} e^{-n/X}| <~ 2 A N^{-sigma} X e^{-N/X}.
  const double tail = 2.0 * coefficient_density(form) * std::pow(depth, -s.real()) * top * std::exp(-depth / top);
  r.error_estimate = std::max(r.differences.back(), floor) + tail;
  return r;
}

double partial_sum_constant(const maass::MaassForm& form) {
  const std::size_t N = form.depth();
  double acc = 0.0, best = 0.0;
  for (std::size_t n = 1; n <= N; ++n) {
    acc += form.lambda[n - 1];
    if (10 * n >= N) best = std::max(best, std::abs(acc) / std::pow(static_cast<double>(n), 0.6));
  }
  return best;
}

LfValue l_f(double s, const maass::MaassForm& form, double max_error) {
  if (!(s >= 1.0)) throw UsageError("l_f needs real s >= 1");
  const double N = static_cast<double>(form.depth());
  if (s > 1.0) {
    // Partial summation against |sum_{n <= x} lambda(n)| <= B x^{0.6}.
    const double B = partial_sum_constant(form);
    const double shape = 1.0 + s / (s - 0.6);
    const double tail = B * std::pow(N, 0.6 - s) * shape;
    if (tail <= max_error) {
      std::vector<double> terms(form.depth());
      for (std::size_t i = 0; i < form.depth(); ++i) terms[i] = form.lambda[i] * std::pow(static_cast<double>(i + 1), -s);
      return {pairwise_sum(terms), tail, "direct", form.depth()};
    }
    const LadderResult ladder = l_twisted_smoothed(Complex(s, 0.0), form, nullptr, 0);
    if (ladder.error_estimate <= max_error) return {ladder.value.real(), ladder.error_estimate, "ladder", form.depth()};
    const double need = std::pow(max_error / (B * shape), 1.0 / (0.6 - s));
    std::ostringstream msg;
    msg << "L(" << s << ", f): tail bound " << tail << " above " << max_error << " at depth " << form.depth()
        << "; the direct series needs N >= " << std::ceil(need);
    throw DepthError(msg.str(), static_cast<long long>(std::ceil(need)));
  }
  const LadderResult ladder = l_twisted_smoothed(Complex(s, 0.0), form, nullptr, 0);
  if (ladder.error_estimate > max_error) {
    std::ostringstream msg;
    msg << "L(1, f) ladder error estimate " << ladder.error_estimate << " above " << max_error;
    throw NumericError(msg.str());
  }
  return {ladder.value.real(), ladder.error_estimate, "ladder", form.depth()};
}

}  // namespace mforge::lfun
