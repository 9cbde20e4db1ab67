#include "moment_forge/numeric.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

namespace mforge {

LineSum::LineSum(std::span<const Complex> weights, double t0, double h)
    : size_(weights.size()), blocks_((weights.size() + kBlock - 1) / kBlock), t0_(t0), h_(h) {
  re_.assign(blocks_ * kBlock, 0.0);
  im_.assign(blocks_ * kBlock, 0.0);
  for (std::size_t j = 0; j < size_; ++j) {
    re_[j] = weights[j].real();
    im_[j] = weights[j].imag();
    abs_sum_ += std::abs(weights[j]);
  }
}

Complex LineSum::operator()(double L) const {
  // sum_k r_k sum_b w_{b,k} B_b with B_b = e^{-i (t0 + b K h) L}, r_k = e^{-i k h L}
  std::array<double, kBlock> acc_re{}, acc_im{};
  for (std::size_t b = 0; b < blocks_; ++b) {
    const double phase = -(t0_ + static_cast<double>(b * kBlock) * h_) * L;
    const double br = std::cos(phase), bi = std::sin(phase);
    const double* wr = re_.data() + b * kBlock;
    const double* wi = im_.data() + b * kBlock;
    for (std::size_t k = 0; k < kBlock; ++k) {
      acc_re[k] += wr[k] * br - wi[k] * bi;
      acc_im[k] += wr[k] * bi + wi[k] * br;
    }
  }
  double sr = 0.0, si = 0.0;
  for (std::size_t k = 0; k < kBlock; ++k) {
    const double phase = -static_cast<double>(k) * h_ * L;
    const double rr = std::cos(phase), ri = std::sin(phase);
    sr += acc_re[k] * rr - acc_im[k] * ri;
    si += acc_re[k] * ri + acc_im[k] * rr;
  }
  return {sr, si};
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& f) {
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, threads), n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto run = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        f(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::jthread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(run);
  run();
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace mforge
