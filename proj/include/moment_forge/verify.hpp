#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "moment_forge/maass.hpp"

namespace mforge::verify {

struct Check {
  std::string name;
  bool passed = false;
  // Worst case with its inputs, or the first violation.
  std::string detail;
  double worst = 0;   // the measured quantity compared against `limit`
  double limit = 0;
};

struct SuiteReport {
  std::string suite;
  std::vector<Check> checks;
  double seconds = 0;
  bool passed() const;
};

struct Tolerances {
  std::int64_t char_q_max = 101;
  int char_pairs = 50;
  double identity = 1e-9;
  double gauss = 1e-10;
  double afe = 1e-8;
  double voronoi = 1e-4;
  double rankin_selberg_max = 5.0;
  double wilton_max = 10.0;
  double contour_shift = 1e-9;
  double residue = 1e-8;
  double decay = 1e-6;  // |W(1500)| at s0 = 1/2, T = 9.5337
  std::uint64_t seed = 20261017;
};

// char-sums, special, maass, l-eval, voronoi
const std::vector<std::string>& suite_names();
bool suite_needs_form(const std::string& suite);

// Called only by suites that need f; may throw (missing fixture and so on).
using FormProvider = std::function<const maass::MaassForm&()>;

SuiteReport char_sums_suite(const Tolerances& tol = {});
SuiteReport special_suite(const Tolerances& tol = {});
SuiteReport maass_suite(const maass::MaassForm& form, const Tolerances& tol = {});
SuiteReport l_eval_suite(const Tolerances& tol = {});
// Runs Hecke validation first; the panel is skipped when it fails.
SuiteReport voronoi_suite(const maass::MaassForm& form, const Tolerances& tol = {});

// `suite` is one name or "all". Unknown names throw UsageError.
std::vector<SuiteReport> run_verify(const std::string& suite, const FormProvider& form, const Tolerances& tol = {});

}  // namespace mforge::verify
