#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "moment_forge/error.hpp"

namespace mforge::maass {

// Malformed fixture text or remote payload. byte_offset points into the input.
struct FormatError : IoError {
  FormatError(const std::string& what, std::size_t offset) : IoError(what), byte_offset(offset) {}
  std::size_t byte_offset;
};

// Data that parses but breaks a Hecke-form invariant.
struct ValidationError : NumericError {
  using NumericError::NumericError;
};

struct MaassForm {
  double spectral_parameter = 0;
  std::string spectral_text;  // verbatim header value
  int precision_digits = 0;
  std::string source;
  std::string parity;                 // "even" or "odd"; metadata only
  std::vector<std::string> comments;  // header comment lines, without '#'
  std::vector<double> lambda;         // lambda[n - 1]
  std::vector<std::string> decimals;  // verbatim text of each lambda

  std::size_t depth() const { return lambda.size(); }
  bool is_even() const { return parity == "even"; }
  // Throws DepthError past the fixture depth.
  double coefficient(std::size_t n) const;
  // 10^{-(precision_digits - 2)}
  double tolerance() const;
  std::span<const double> coefficients() const { return lambda; }
};

struct HeckeReport {
  double lambda_one_defect = 0;
  double max_defect = 0;  // over all m <= n, mn <= depth
  std::size_t worst_m = 0, worst_n = 0;
  std::size_t pairs_checked = 0;
  double multiplicative_defect = 0;  // coprime pairs
  double prime_recursion_defect = 0; // lambda(p)lambda(p^k) = lambda(p^{k+1}) + lambda(p^{k-1})
  // Reported only: max |lambda(n)| / (d(n) n^theta) with theta = 7/64.
  double ramanujan_ratio = 0;
  std::size_t ramanujan_worst_n = 0;
  // First pair beyond tolerance, if any.
  std::optional<std::pair<std::size_t, std::size_t>> first_violation;
  double tolerance = 0;
  bool ok() const { return !first_violation && lambda_one_defect <= tolerance; }
};

HeckeReport hecke_report(const MaassForm& form);
// Throws ValidationError naming lambda(1) or the first violating (m, n).
void validate_hecke(const MaassForm& form);

// Parses the fixture grammar. `validate` runs validate_hecke afterwards.
MaassForm parse_fixture(std::string_view text, bool validate = true);
MaassForm load_form(const std::string& path, bool validate = true);
std::string format_fixture(const MaassForm& form);
void write_form(const MaassForm& form, const std::string& path);

// Shortest decimal that round-trips the double.
std::string shortest_decimal(double x);

// MOMENT_FORGE_DATA if set, else the data directory of the source tree.
std::string data_dir();
inline constexpr std::string_view kBundledLabel = "sl2z-even-1";
std::string bundled_fixture_path();

struct RankinSelbergRow {
  double x;
  double ratio;  // sum_{n <= x} lambda(n)^2 / x
};
// Throws UsageError for x < 1 or x beyond the fixture depth.
std::vector<RankinSelbergRow> rankin_selberg_profile(const MaassForm& form, std::span<const double> xs);

struct WiltonRow {
  double alpha;
  std::size_t n;
  double normalized;  // |sum_{m <= n} lambda(m) e(alpha m)| / n^{0.6}
};
std::vector<WiltonRow> wilton_profile(const MaassForm& form, std::span<const double> alphas,
                                      std::span<const std::size_t> lengths);

// Remote client. The request is a single GET of endpoint + path, where path is
// path_template with {label} substituted. The payload is JSON, either a record
// or {"data": [record, ...]}, where a record has
//   spectral_parameter: number or decimal string
//   coefficients: array of numbers or decimal strings, lambda(1) first
//   parity: "even"/"odd" or symmetry: 0 (even) / 1 (odd)
//   precision_digits: integer (optional, default kDefaultRemotePrecision)
struct FetchConfig {
  std::string endpoint = "https://www.lmfdb.org";
  std::string path_template = "/api/maass_newforms/?maass_label={label}&_format=json";
  int timeout_seconds = 20;
  bool offline = false;  // set from MOMENT_FORGE_OFFLINE=1 by from_environment()
  static FetchConfig from_environment();
};

inline constexpr int kDefaultRemotePrecision = 8;

struct NotFoundError : IoError {
  using IoError::IoError;
};

struct FetchResult {
  MaassForm form;
  bool fell_back = false;
  std::string notice;  // set when the bundled fixture was used instead of the network
  std::string url;
};

// Fetches `depth` coefficients. Offline mode or a network failure falls back to
// the bundled fixture when the label names it, with an explicit notice.
FetchResult fetch_remote(const std::string& label, std::size_t depth, const FetchConfig& config);
MaassForm parse_remote_payload(std::string_view body, const std::string& label, std::size_t depth,
                               const std::string& provenance);

}  // namespace mforge::maass
