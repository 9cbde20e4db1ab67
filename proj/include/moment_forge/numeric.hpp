#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

namespace mforge {

using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// e(x) = exp(2 pi i x)
inline Complex e_turn(double x) {
  const double r = x - std::floor(x);
  return {std::cos(kTwoPi * r), std::sin(kTwoPi * r)};
}

// e(num/den) with exact reduction of the numerator first.
inline Complex e_frac(std::int64_t num, std::int64_t den) {
  std::int64_t r = num % den;
  if (r < 0) r += den;
  return e_turn(static_cast<double>(r) / static_cast<double>(den));
}

// Fixed-shape pairwise reduction: result depends only on the input order.
template <class T>
T pairwise_sum(std::span<const T> xs) {
  if (xs.size() <= 16) {
    T acc{};
    for (const T& x : xs) acc += x;
    return acc;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

template <class T>
T pairwise_sum(const std::vector<T>& xs) {
  return pairwise_sum(std::span<const T>(xs.data(), xs.size()));
}

// Sum_j w_j exp(-i (t0 + j h) L) for many L over fixed weights. Nodes are
// grouped in blocks of kBlock: block phases and in-block phases are computed
// directly, so there is no recurrence drift and the inner loop vectorizes.
class LineSum {
 public:
  static constexpr std::size_t kBlock = 64;
  LineSum() = default;
  LineSum(std::span<const Complex> weights, double t0, double h);
  Complex operator()(double L) const;
  std::size_t size() const { return size_; }
  double abs_sum() const { return abs_sum_; }

 private:
  std::size_t size_ = 0;
  std::size_t blocks_ = 0;
  double t0_ = 0;
  double h_ = 0;
  double abs_sum_ = 0;
  std::vector<double> re_, im_;  // zero-padded to blocks_ * kBlock
};

// Runs f(i) for i in [0, n) on up to `threads` workers. Each index writes its
// own slot, so callers get identical results for any thread count.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& f);

}  // namespace mforge
