#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "moment_forge/l_functions.hpp"
#include "moment_forge/moment.hpp"
#include "moment_forge/verify.hpp"

namespace mforge::store {

using Document = nlohmann::ordered_json;
inline constexpr int kSchemaVersion = 1;

struct RunConfig {
  std::vector<std::int64_t> q;  // explicit moduli
  std::int64_t q_min = 0, q_max = 0;
  double sigma0 = 0.5;
  double t0 = 0.0;
  bool extended = false;
  std::string form_path;  // empty: bundled fixture
  std::string label;      // remote label; wins over form_path
  std::size_t depth = 0;  // 0: whole fixture (or 1000 for fetch)
  double tol_identity = 1e-6;
  double tail_tol = 1e-12;
  double twisted_tail_tol = 1e-3;
  unsigned threads = 1;
  std::string out = "mforge-reports";
  std::string format = "json";

  // Tolerances positive, threads >= 1, format json|csv, sigma0 range, moduli prime.
  void validate() const;
  special::EvaluationPoint point() const;
  moment::MomentParams moment_params() const;
  // Explicit list if given, else the primes in [q_min, q_max], else the default grid.
  std::vector<std::int64_t> q_list() const;
};

// Rejects q that is not a prime >= 5 with a divisor witness.
void require_prime_modulus(std::int64_t q);
std::vector<std::int64_t> primes_in_range(std::int64_t lo, std::int64_t hi);

struct FormInfo {
  std::string origin;  // fixture path or "label:<label>"
  std::string source;  // the fixture's source header
  double spectral_parameter = 0;
  std::size_t depth = 0;
  int precision_digits = 0;
  std::string notice;  // offline fallback notice, if any
};
FormInfo describe_form(const maass::MaassForm& form, const std::string& origin, const std::string& notice = {});

// Every document has schema, kind, created, config, result and notes. Only
// `created` depends on the clock.
Document moment_document(const moment::MomentReport& r, const RunConfig& c, const FormInfo& f);
Document fit_document(const moment::ExponentFit& fit, const RunConfig& c, const FormInfo& f);
Document nonvanish_document(const moment::NonvanishingReport& r, const RunConfig& c, const FormInfo& f);
Document voronoi_document(const std::vector<lfun::VoronoiResult>& rows, double tol, bool hecke_ok,
                          const std::string& hecke_detail, const RunConfig& c, const FormInfo& f);
Document verify_document(const std::vector<verify::SuiteReport>& suites, const RunConfig& c);
Document fetch_document(const maass::FetchResult& r, const std::string& label, std::size_t depth, const std::string& out_path);

// Pass/fail carried by a document (result.passed).
bool document_passed(const Document& doc);
// Human-readable lines for the console.
std::string summary_text(const Document& doc);

// Append-only directory of JSON reports and an index.csv with one row per
// report file.
class ReportStore {
 public:
  // Creates the directory and the index header. Throws IoError if an existing
  // index has a different header.
  explicit ReportStore(std::string dir);

  struct Entry {
    std::string report_path;
    std::string index_row;  // without the trailing newline
  };
  Entry append(const Document& doc);

  const std::string& dir() const { return dir_; }
  std::string index_path() const;

  static const std::vector<std::string>& columns();
  static std::string header();
  static std::string index_row(const Document& doc, const std::string& file);

 private:
  std::string dir_;
};

std::string utc_timestamp();

}  // namespace mforge::store
