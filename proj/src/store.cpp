#include "moment_forge/store.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "moment_forge/char_sums.hpp"
#include "moment_forge/error.hpp"

namespace mforge::store {

namespace fs = std::filesystem;

namespace {

std::string num(double x) {
  if (!std::isfinite(x)) return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string rational_text(moment::Rational r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

Document rational_json(moment::Rational r) {
  return Document{{"exact", rational_text(r)}, {"value", boost::rational_cast<double>(r)}};
}

Document cplx(Complex z) { return Document{{"re", z.real()}, {"im", z.imag()}}; }

std::string fixed(double x, int digits) {
  std::ostringstream o;
  o << std::fixed << std::setprecision(digits) << x;
  return o.str();
}

std::string gen(double x, int digits = 10) {
  std::ostringstream o;
  o << std::setprecision(digits) << x;
  return o.str();
}

std::string ctext(Complex z, int digits = 10) {
  std::ostringstream o;
  o << std::setprecision(digits) << z.real() << (std::signbit(z.imag()) ? " - " : " + ") << std::abs(z.imag()) << "i";
  return o.str();
}

Document config_json(const RunConfig& c) {
  Document j;
  j["sigma0"] = c.sigma0;
  j["t0"] = c.t0;
  j["extended"] = c.extended;
  j["tol_identity"] = c.tol_identity;
  j["tail_tol"] = c.tail_tol;
  j["twisted_tail_tol"] = c.twisted_tail_tol;
  j["threads"] = c.threads;
  return j;
}

Document form_json(const FormInfo& f) {
  Document j{{"origin", f.origin},
             {"source", f.source},
             {"spectral_parameter", f.spectral_parameter},
             {"depth", f.depth},
             {"precision_digits", f.precision_digits}};
  if (!f.notice.empty()) j["notice"] = f.notice;
  return j;
}

Document base(const std::string& kind) {
  Document d;
  d["schema"] = kSchemaVersion;
  d["kind"] = kind;
  d["created"] = utc_timestamp();
  return d;
}

Document term_json(const moment::CharacterTerm& t) {
  return Document{{"j", t.j},
                  {"twisted", cplx(t.twisted)},
                  {"dirichlet", cplx(t.dirichlet)},
                  {"product", cplx(t.product)},
                  {"bound", t.bound}};
}

Document envelope_json(const moment::Envelope& e) {
  return Document{{"r1", rational_json(e.r1)},
                  {"r2", rational_json(e.r2)},
                  {"r3", rational_json(e.r3)},
                  {"r4", rational_json(e.r4)},
                  {"max", rational_json(e.max())}};
}

const char* kEpsilonNote = "epsilon exponents in the R1..R4 envelope are taken as 0";

void write_atomic(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << text;
    if (!out) throw IoError("write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

std::string get_num(const Document& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return "";
  return num(j[key].get<double>());
}

}  // namespace

// ----------------------------------------------------------------------------- config

void require_prime_modulus(std::int64_t q) {
  if (q < 5) throw UsageError("modulus " + std::to_string(q) + " is too small: need a prime q >= 5 (even primitive characters)");
  if (!chars::is_prime(q)) {
    throw UsageError("modulus " + std::to_string(q) + " is not prime: divisible by " + std::to_string(chars::smallest_factor(q)));
  }
}

std::vector<std::int64_t> primes_in_range(std::int64_t lo, std::int64_t hi) {
  std::vector<std::int64_t> out;
  for (std::int64_t p = std::max<std::int64_t>(lo, 5); p <= hi; ++p)
    if (chars::is_prime(p)) out.push_back(p);
  return out;
}

void RunConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0) || !std::isfinite(v)) throw UsageError(std::string(name) + " must be positive, got " + num(v));
  };
  positive(tol_identity, "--tol-identity");
  positive(tail_tol, "tail tolerance");
  positive(twisted_tail_tol, "twisted tail tolerance");
  if (threads < 1) throw UsageError("--threads must be at least 1");
  if (format != "json" && format != "csv") throw UsageError("--format must be json or csv, got '" + format + "'");
  if (!std::isfinite(t0)) throw UsageError("--t0 must be finite");
  (void)point();
  for (std::int64_t m : q) require_prime_modulus(m);
  if ((q_min != 0 || q_max != 0) && q_min > q_max) {
    throw UsageError("--q-min " + std::to_string(q_min) + " exceeds --q-max " + std::to_string(q_max));
  }
}

special::EvaluationPoint RunConfig::point() const { return special::EvaluationPoint(sigma0, t0, extended); }

moment::MomentParams RunConfig::moment_params() const {
  moment::MomentParams p;
  p.identity_floor = tol_identity;
  p.afe.tail_tol = tail_tol;
  p.afe.twisted_tail_tol = twisted_tail_tol;
  p.afe.threads = threads;
  return p;
}

std::vector<std::int64_t> RunConfig::q_list() const {
  if (!q.empty()) return q;
  if (q_min != 0 || q_max != 0) return primes_in_range(q_min, q_max);
  return moment::default_prime_grid();
}

FormInfo describe_form(const maass::MaassForm& form, const std::string& origin, const std::string& notice) {
  FormInfo f;
  f.origin = origin;
  f.source = form.source;
  f.spectral_parameter = form.spectral_parameter;
  f.depth = form.depth();
  f.precision_digits = form.precision_digits;
  f.notice = notice;
  return f;
}

// ----------------------------------------------------------------------------- documents

Document moment_document(const moment::MomentReport& r, const RunConfig& c, const FormInfo& f) {
  Document d = base("moment");
  Document cfg = config_json(c);
  cfg["q"] = r.q;
  d["config"] = cfg;
  d["form"] = form_json(f);
  Document res;
  res["q"] = r.q;
  res["sigma0"] = r.sigma0;
  res["t0"] = r.t0;
  res["lhs"] = cplx(r.lhs_direct);
  res["main_term"] = r.main_term;
  res["l_2sigma0"] = Document{{"value", r.l_value}, {"error", r.l_error}, {"method", r.l_method}};
  res["residual"] = Document{{"re", r.residual.real()},
                             {"im", r.residual.imag()},
                             {"abs", std::abs(r.residual)},
                             {"phase", std::arg(r.residual)}};
  res["s_terms"] = Document{{"s1", cplx(r.s.s1)},
                            {"s2", cplx(r.s.s2)},
                            {"s3", cplx(r.s.s3)},
                            {"s4", cplx(r.s.s4)},
                            {"total", cplx(r.s.total())},
                            {"s11", cplx(r.s.s11)},
                            {"s11_star", cplx(r.s.s11_star)},
                            {"s11_star_star", cplx(r.s.s11_star_star)},
                            {"s12", cplx(r.s.s12)}};
  res["identity_gap"] = r.identity_gap;
  res["identity_tolerance"] = r.identity_tolerance;
  res["truncation_bound"] = r.truncation_bound;
  res["cutoffs"] = Document{{"v_first", r.v_terms}, {"v_dual", r.v_dual_terms}, {"w_first", r.w_terms}, {"w_dual", r.w_dual_terms}};
  Document terms = Document::array();
  for (const auto& t : r.characters) terms.push_back(term_json(t));
  res["characters"] = terms;
  res["passed"] = r.identity_ok();
  d["result"] = res;
  d["notes"] = Document::array({"lhs is the direct sum over even primitive characters; the S terms are the closed-form route",
                                "passed means identity_gap <= identity_tolerance"});
  return d;
}

Document fit_document(const moment::ExponentFit& fit, const RunConfig& c, const FormInfo& f) {
  Document d = base("fit");
  Document cfg = config_json(c);
  cfg["q_list"] = fit.q_list;
  d["config"] = cfg;
  d["form"] = form_json(f);
  Document res;
  Document points = Document::array();
  bool all_ok = true;
  for (std::size_t i = 0; i < fit.q_list.size(); ++i) {
    Document p{{"q", fit.q_list[i]}, {"residual_abs", fit.residuals[i]}, {"phase", fit.phases[i]}};
    if (i < fit.reports.size()) {
      const auto& r = fit.reports[i];
      p["lhs"] = cplx(r.lhs_direct);
      p["main_term"] = r.main_term;
      p["identity_gap"] = r.identity_gap;
      p["identity_ok"] = r.identity_ok();
      all_ok = all_ok && r.identity_ok();
    }
    points.push_back(p);
  }
  res["sigma0"] = c.sigma0;
  res["t0"] = c.t0;
  res["points"] = points;
  res["slope"] = fit.slope;
  res["slope_stderr"] = fit.slope_stderr;
  res["intercept"] = fit.intercept;
  res["predicted_exponent"] = fit.predicted_exponent;
  res["envelope"] = envelope_json(fit.envelope);
  res["passed"] = all_ok;
  d["result"] = res;
  d["notes"] = Document::array({kEpsilonNote, "slope is least squares of log|lhs - main| on log q; phases are reported, not fitted",
                                "the fitted slope is not expected to match the predicted exponent at these moduli",
                                "passed means every point satisfies its route-equivalence tolerance"});
  return d;
}

Document nonvanish_document(const moment::NonvanishingReport& r, const RunConfig& c, const FormInfo& f) {
  Document d = base("nonvanish");
  Document cfg = config_json(c);
  cfg["q"] = r.q;
  d["config"] = cfg;
  d["form"] = form_json(f);
  Document res;
  res["q"] = r.q;
  res["sigma0"] = r.sigma0;
  res["t0"] = r.t0;
  Document terms = Document::array();
  for (const auto& t : r.terms) terms.push_back(term_json(t));
  res["characters"] = terms;
  res["minimizer"] = r.minimizer;
  res["min_modulus"] = r.min_modulus;
  res["some_nonvanishing"] = r.some_nonvanishing;
  const moment::Rational m = moment::m_exponent(moment::to_rational(r.sigma0), moment::kim_sarnak_theta());
  res["m_exponent"] = rational_json(m);
  res["threshold"] = r.threshold;
  res["regime_reachable"] = r.regime_reachable;
  res["passed"] = true;
  d["result"] = res;
  d["notes"] = Document::array({"threshold is tau^M(sigma0) with theta = 7/64 and epsilon = 0",
                                "some_nonvanishing: some |product| exceeds 10 times its truncation bound"});
  return d;
}

Document voronoi_document(const std::vector<lfun::VoronoiResult>& rows, double tol, bool hecke_ok,
                          const std::string& hecke_detail, const RunConfig& c, const FormInfo& f) {
  Document d = base("voronoi");
  d["config"] = config_json(c);
  d["form"] = form_json(f);
  Document res;
  res["hecke_ok"] = hecke_ok;
  res["hecke_detail"] = hecke_detail;
  res["tolerance"] = tol;
  Document panel = Document::array();
  double worst = 0;
  for (const auto& r : rows) {
    panel.push_back(Document{{"c", r.c},
                             {"d", r.d},
                             {"dbar", r.dbar},
                             {"N", r.N},
                             {"lhs", cplx(r.lhs)},
                             {"rhs", cplx(r.rhs)},
                             {"gap", r.gap},
                             {"dual_terms", r.dual_terms}});
    worst = std::max(worst, r.gap);
  }
  res["panel"] = panel;
  res["max_gap"] = worst;
  res["passed"] = hecke_ok && !rows.empty() && worst <= tol;
  d["result"] = res;
  d["notes"] = Document::array({"lhs = sum lambda(n) e(n dbar/c) psi(n/N); rhs is the dual Voronoi side with Psi kernels",
                                "the panel runs only on fixtures that pass Hecke validation"});
  return d;
}

Document verify_document(const std::vector<verify::SuiteReport>& suites, const RunConfig& c) {
  Document d = base("verify");
  d["config"] = config_json(c);
  Document res;
  Document arr = Document::array();
  bool ok = !suites.empty();
  for (const auto& s : suites) {
    Document checks = Document::array();
    for (const auto& k : s.checks) {
      checks.push_back(Document{{"name", k.name}, {"passed", k.passed}, {"worst", k.worst}, {"limit", k.limit}, {"detail", k.detail}});
    }
    arr.push_back(Document{{"suite", s.suite}, {"passed", s.passed()}, {"checks", checks}});
    ok = ok && s.passed();
  }
  res["suites"] = arr;
  res["passed"] = ok;
  d["result"] = res;
  // Timings live outside `result` so that reruns compare equal there.
  Document timing;
  for (const auto& s : suites) timing[s.suite] = s.seconds;
  d["timing_seconds"] = timing;
  d["notes"] = Document::array();
  return d;
}

Document fetch_document(const maass::FetchResult& r, const std::string& label, std::size_t depth, const std::string& out_path) {
  Document d = base("fetch");
  d["config"] = Document{{"label", label}, {"depth", depth}, {"out", out_path}};
  Document res{{"label", label},
               {"depth", r.form.depth()},
               {"spectral_parameter", r.form.spectral_parameter},
               {"source", r.form.source},
               {"url", r.url},
               {"fell_back", r.fell_back},
               {"notice", r.notice},
               {"path", out_path},
               {"passed", true}};
  d["result"] = res;
  d["notes"] = Document::array();
  return d;
}

bool document_passed(const Document& doc) {
  return doc.contains("result") && doc["result"].contains("passed") && doc["result"]["passed"].get<bool>();
}

std::string summary_text(const Document& doc) {
  std::ostringstream o;
  const std::string kind = doc.value("kind", "");
  const Document& r = doc["result"];
  auto cx = [](const Document& j) { return ctext(Complex(j["re"].get<double>(), j["im"].get<double>())); };
  if (kind == "moment") {
    o << "moment q=" << r["q"].get<std::int64_t>() << " sigma0=" << gen(r["sigma0"]) << " t0=" << gen(r["t0"]) << '\n';
    o << "  lhs          = " << cx(r["lhs"]) << '\n';
    o << "  main term    = " << gen(r["main_term"]) << "  (q/2 L(2 sigma0, f), " << r["l_2sigma0"]["method"].get<std::string>()
      << ", error " << gen(r["l_2sigma0"]["error"], 2) << ")\n";
    o << "  residual     = " << cx(r["residual"]) << "  |residual| = " << gen(r["residual"]["abs"]) << '\n';
    o << "  S1+S2+S3+S4  = " << cx(r["s_terms"]["total"]) << '\n';
    o << "  identity_gap = " << gen(r["identity_gap"], 3) << "  (tolerance " << gen(r["identity_tolerance"], 3) << ") "
      << (r["passed"].get<bool>() ? "ok" : "FAILED") << '\n';
  } else if (kind == "fit") {
    o << "fit sigma0=" << gen(r["sigma0"]) << " t0=" << gen(r["t0"]) << '\n';
    o << "  q     |lhs - main|      identity_gap\n";
    for (const auto& p : r["points"]) {
      o << "  " << std::left << std::setw(5) << p["q"].get<std::int64_t>() << ' ' << std::setw(17) << gen(p["residual_abs"])
        << ' ' << (p.contains("identity_gap") ? gen(p["identity_gap"], 3) : "") << '\n';
    }
    o << std::right;
    o << "  slope = " << fixed(r["slope"], 4) << "  stderr " << fixed(r["slope_stderr"], 4) << '\n';
    o << "  predicted envelope exponent = " << fixed(r["predicted_exponent"], 4) << "  ("
      << r["envelope"]["max"]["exact"].get<std::string>() << ", epsilon = 0)\n";
    o << "  R1..R4 exponents: " << r["envelope"]["r1"]["exact"].get<std::string>() << ", "
      << r["envelope"]["r2"]["exact"].get<std::string>() << ", " << r["envelope"]["r3"]["exact"].get<std::string>() << ", "
      << r["envelope"]["r4"]["exact"].get<std::string>() << '\n';
    o << "  slope " << (r["slope"].get<double>() < 1.0 ? "< 1" : ">= 1") << '\n';
  } else if (kind == "nonvanish") {
    o << "nonvanish q=" << r["q"].get<std::int64_t>() << " sigma0=" << gen(r["sigma0"]) << " t0=" << gen(r["t0"]) << '\n';
    for (const auto& t : r["characters"]) {
      o << "  j=" << std::left << std::setw(4) << t["j"].get<int>() << std::right << " |L(f x chi) conj L(chi)| = "
        << gen(std::hypot(t["product"]["re"].get<double>(), t["product"]["im"].get<double>())) << '\n';
    }
    o << "  min modulus " << gen(r["min_modulus"]) << " at j=" << r["minimizer"].get<int>() << "; some nonvanishing: "
      << (r["some_nonvanishing"].get<bool>() ? "yes" : "no") << '\n';
    o << "  M(sigma0) = " << r["m_exponent"]["exact"].get<std::string>() << " = " << gen(r["m_exponent"]["value"])
      << ", threshold tau^M = " << gen(r["threshold"], 4) << ", regime "
      << (r["regime_reachable"].get<bool>() ? "reached" : "not reached") << '\n';
  } else if (kind == "voronoi") {
    o << "voronoi: " << r["hecke_detail"].get<std::string>() << '\n';
    for (const auto& p : r["panel"]) {
      o << "  c=" << p["c"].get<std::int64_t>() << " d=" << p["d"].get<std::int64_t>() << " N=" << gen(p["N"])
        << "  gap " << gen(p["gap"], 3) << '\n';
    }
    if (!r["panel"].empty()) o << "  max gap " << gen(r["max_gap"], 3) << " (tolerance " << gen(r["tolerance"], 3) << ")\n";
    o << "  " << (r["passed"].get<bool>() ? "ok" : "FAILED") << '\n';
  } else if (kind == "verify") {
    for (const auto& s : r["suites"]) {
      o << s["suite"].get<std::string>() << ": " << (s["passed"].get<bool>() ? "pass" : "FAIL") << '\n';
      for (const auto& k : s["checks"]) {
        o << "  " << (k["passed"].get<bool>() ? "pass " : "FAIL ") << k["name"].get<std::string>() << ": "
          << k["detail"].get<std::string>() << '\n';
      }
    }
  } else if (kind == "fetch") {
    if (!r["notice"].get<std::string>().empty()) o << "notice: " << r["notice"].get<std::string>() << '\n';
    o << "fetched " << r["label"].get<std::string>() << ": " << r["depth"].get<std::size_t>() << " coefficients, T = "
      << gen(r["spectral_parameter"], 16) << " -> " << r["path"].get<std::string>() << '\n';
  }
  return o.str();
}

// ----------------------------------------------------------------------------- store

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream o;
  o << std::put_time(&tm, "%Y-%m-%dT%H:%M:%S") << '.' << std::setw(3) << std::setfill('0') << ms << 'Z';
  return o.str();
}

const std::vector<std::string>& ReportStore::columns() {
  static const std::vector<std::string> cols = {"file",  "kind",        "q",           "sigma0",       "t0",
                                                "lhs_re", "lhs_im",     "main",        "residual_re",  "residual_im",
                                                "identity_gap", "slope", "slope_stderr", "envelope",   "status"};
  return cols;
}

std::string ReportStore::header() {
  std::string h;
  for (const auto& c : columns()) h += (h.empty() ? "" : ",") + c;
  return h;
}

std::string ReportStore::index_row(const Document& doc, const std::string& file) {
  const std::string kind = doc.value("kind", "");
  const Document& r = doc["result"];
  std::vector<std::string> cells(columns().size());
  cells[0] = file;
  cells[1] = kind;
  if (kind == "moment" || kind == "nonvanish") {
    cells[2] = std::to_string(r["q"].get<std::int64_t>());
    cells[3] = get_num(r, "sigma0");
    cells[4] = get_num(r, "t0");
  }
  if (kind == "moment") {
    cells[5] = get_num(r["lhs"], "re");
    cells[6] = get_num(r["lhs"], "im");
    cells[7] = get_num(r, "main_term");
    cells[8] = get_num(r["residual"], "re");
    cells[9] = get_num(r["residual"], "im");
    cells[10] = get_num(r, "identity_gap");
  }
  if (kind == "fit") {
    std::string qs;
    for (const auto& p : r["points"]) qs += (qs.empty() ? "" : ";") + std::to_string(p["q"].get<std::int64_t>());
    cells[2] = qs;
    cells[3] = get_num(r, "sigma0");
    cells[4] = get_num(r, "t0");
    cells[11] = get_num(r, "slope");
    cells[12] = get_num(r, "slope_stderr");
    cells[13] = fixed(r["predicted_exponent"].get<double>(), 4);
  }
  cells[14] = document_passed(doc) ? "pass" : "fail";
  std::string row;
  for (std::size_t i = 0; i < cells.size(); ++i) row += (i ? "," : "") + cells[i];
  return row;
}

ReportStore::ReportStore(std::string dir) : dir_(std::move(dir)) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) throw IoError("cannot create report directory " + dir_ + ": " + ec.message());
  const fs::path idx = index_path();
  if (fs::exists(idx)) {
    std::ifstream in(idx);
    std::string first;
    std::getline(in, first);
    if (first != header()) throw IoError("index " + idx.string() + " has an unexpected header: " + first);
  } else {
    std::ofstream out(idx, std::ios::binary);
    if (!out) throw IoError("cannot create " + idx.string());
    out << header() << '\n';
  }
}

std::string ReportStore::index_path() const { return (fs::path(dir_) / "index.csv").string(); }

ReportStore::Entry ReportStore::append(const Document& doc) {
  std::string stamp = doc.value("created", utc_timestamp());
  for (char& ch : stamp)
    if (ch == ':') ch = '-';
  std::string stem = stamp + "-" + doc.value("kind", "report");
  const Document& r = doc["result"];
  if (r.contains("q") && r["q"].is_number_integer()) stem += "-q" + std::to_string(r["q"].get<std::int64_t>());
  fs::path path = fs::path(dir_) / (stem + ".json");
  for (int k = 1; fs::exists(path); ++k) path = fs::path(dir_) / (stem + "-" + std::to_string(k) + ".json");

  write_atomic(path, doc.dump(2) + "\n");
  Entry e;
  e.report_path = path.string();
  e.index_row = index_row(doc, path.filename().string());
  std::ofstream out(index_path(), std::ios::binary | std::ios::app);
  if (!out) throw IoError("cannot append to " + index_path());
  out << e.index_row << '\n';
  if (!out) throw IoError("append failed: " + index_path());
  return e;
}

}  // namespace mforge::store
