#include <cmath>
#include <numeric>
#include <sstream>

#include "moment_forge/error.hpp"
#include "moment_forge/l_functions.hpp"

namespace mforge::lfun {

VoronoiValidator::VoronoiValidator(const maass::MaassForm& form, const VoronoiParams& params)
    : form_(form), params_(params), bump_(params.bump_nodes) {
  if (!(params.tol > 0.0) || !(params.stop_ratio > 0.0) || params.block == 0) throw UsageError("invalid Voronoi parameters");
  plus_ = std::make_unique<special::PsiKernel>(1, form.spectral_parameter, bump_, params.psi);
  minus_ = std::make_unique<special::PsiKernel>(-1, form.spectral_parameter, bump_, params.psi);
}

const VoronoiValidator::DualSeries& VoronoiValidator::dual(std::int64_t c, double N) {
  const auto key = std::make_pair(c, N);
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  DualSeries series;
  const double scale = N / static_cast<double>(c * c);
  const double stop = params_.stop_ratio * params_.tol;
  double block_max = 0.0;
  for (std::size_t n = 1;; ++n) {
    if (n > form_.depth()) {
      std::ostringstream msg;
      msg << "Voronoi dual sum for c = " << c << ", N = " << N << " has not converged at the fixture depth " << form_.depth();
      throw DepthError(msg.str(), static_cast<long long>(2 * n));
    }
    const double y = static_cast<double>(n) * scale;
    series.psi_plus.push_back((*plus_)(y));
    series.psi_minus.push_back((*minus_)(y));
    const double size = static_cast<double>(c) * std::abs(form_.lambda[n - 1]) / static_cast<double>(n) *
                        (std::abs(series.psi_plus.back()) + std::abs(series.psi_minus.back()));
    block_max = std::max(block_max, size);
    if (n % params_.block == 0) {
      if (block_max < stop) {
        series.terms = n;
        break;
      }
      block_max = 0.0;
    }
  }
  return cache_.emplace(key, std::move(series)).first->second;
}

VoronoiResult VoronoiValidator::check(std::int64_t c, std::int64_t d, double N) {
  if (c < 1) throw UsageError("Voronoi modulus c must be positive");
  if (std::gcd(c, d) != 1) throw UsageError("Voronoi residue d must be coprime to c");
  if (!(N >= 1.0)) throw UsageError("Voronoi scale N must be >= 1");
  if (2.0 * N > static_cast<double>(form_.depth())) throw DepthError("Voronoi lhs needs lambda(n) up to 2N", static_cast<long long>(2 * N));
  VoronoiResult r;
  r.c = c;
  r.d = d;
  r.N = N;
  r.dbar = chars::mod_inverse(d, c);

  std::vector<Complex> lhs;
  for (auto n = static_cast<std::int64_t>(std::ceil(N)); static_cast<double>(n) <= 2.0 * N; ++n) {
    const double psi = special::BumpFunction::value(static_cast<double>(n) / N);
    if (psi == 0.0) continue;
    lhs.push_back(form_.lambda[static_cast<std::size_t>(n - 1)] * psi * e_frac(n * r.dbar, c));
  }
  r.lhs = pairwise_sum(lhs);

  const DualSeries& series = dual(c, N);
  std::vector<Complex> rhs(series.terms);
  for (std::size_t i = 0; i < series.terms; ++i) {
    const auto n = static_cast<std::int64_t>(i + 1);
    const Complex e_plus = e_frac(n * d, c);
    rhs[i] = form_.lambda[i] / static_cast<double>(n) * (e_plus * series.psi_plus[i] + std::conj(e_plus) * series.psi_minus[i]);
  }
  r.rhs = static_cast<double>(c) * pairwise_sum(rhs);
  r.gap = std::abs(r.lhs - r.rhs);
  r.dual_terms = series.terms;
  return r;
}

VoronoiResult verify_voronoi(const maass::MaassForm& form, std::int64_t c, std::int64_t d, double N,
                             const VoronoiParams& params) {
  VoronoiValidator v(form, params);
  return v.check(c, d, N);
}

}  // namespace mforge::lfun
