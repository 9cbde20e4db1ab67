#include "moment_forge.h"

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "moment_forge/error.hpp"
#include "moment_forge/store.hpp"

using namespace mforge;

struct mf_session {
  store::RunConfig config;
  std::string label;
  std::size_t depth = 0;
  std::optional<maass::MaassForm> form;
  store::FormInfo info;
};

struct mf_result {
  store::Document doc;
  std::string kind, json, summary;
  bool passed = false;
};

struct mf_store {
  std::unique_ptr<store::ReportStore> st;
  std::string last_path, last_row;
};

namespace {

thread_local std::string g_last_error;

// Default depth for a remote label when none is given: enough for the moment
// engine at the default grid.
constexpr std::size_t kDefaultLabelDepth = 100000;

template <class F>
mf_status guarded(F&& body) {
  g_last_error.clear();
  try {
    body();
    return MF_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return static_cast<mf_status>(static_cast<int>(e.kind()));
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return MF_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = std::string("internal error: ") + e.what();
    return MF_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "internal error";
    return MF_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (!p) throw UsageError(std::string(what) + " is null");
}

mf_result* make_result(store::Document doc) {
  auto r = std::make_unique<mf_result>();
  r->kind = doc.value("kind", "");
  r->passed = store::document_passed(doc);
  r->json = doc.dump(2);
  r->summary = store::summary_text(doc);
  r->doc = std::move(doc);
  return r.release();
}

void truncate(maass::MaassForm& f, std::size_t depth) {
  if (depth == 0 || depth == f.depth()) return;
  if (depth > f.depth()) {
    throw UsageError("--depth " + std::to_string(depth) + " exceeds the fixture depth " + std::to_string(f.depth()));
  }
  f.lambda.resize(depth);
  f.decimals.resize(depth);
}

// Loads without Hecke validation; callers that compute with f validate it
// themselves so that the failure is reported where it matters.
const maass::MaassForm& form_of(mf_session* s) {
  if (s->form) return *s->form;
  if (!s->label.empty()) {
    const std::size_t depth = s->depth ? s->depth : kDefaultLabelDepth;
    maass::FetchResult r = maass::fetch_remote(s->label, depth, maass::FetchConfig::from_environment());
    s->info = store::describe_form(r.form, "label:" + s->label, r.notice);
    s->form = std::move(r.form);
    return *s->form;
  }
  const std::string path = s->config.form_path.empty() ? maass::bundled_fixture_path() : s->config.form_path;
  if (!std::filesystem::exists(path)) throw IoError("setup error: fixture not found: " + path);
  maass::MaassForm f = maass::load_form(path, false);
  truncate(f, s->depth);
  s->info = store::describe_form(f, path);
  s->form = std::move(f);
  return *s->form;
}

const maass::MaassForm& validated_form(mf_session* s) {
  const maass::MaassForm& f = form_of(s);
  maass::validate_hecke(f);
  return f;
}

std::string hecke_summary(const maass::HeckeReport& h) {
  if (h.ok()) return "fixture passes Hecke validation";
  std::string d = "fixture fails Hecke validation";
  if (h.first_violation) {
    d += " at (m, n) = (" + std::to_string(h.first_violation->first) + ", " + std::to_string(h.first_violation->second) + ")";
  } else {
    d += " (lambda(1) != 1)";
  }
  return d + "; Voronoi panel not run";
}

}  // namespace

extern "C" {

const char* mf_version(void) { return "0.1.0"; }

const char* mf_last_error(void) { return g_last_error.c_str(); }

mf_status mf_session_create(mf_session** out) {
  return guarded([&] {
    need(out, "out");
    *out = new mf_session();
  });
}

void mf_session_destroy(mf_session* s) { delete s; }

mf_status mf_session_set_point(mf_session* s, double sigma0, double t0, int extended) {
  return guarded([&] {
    need(s, "session");
    special::EvaluationPoint(sigma0, t0, extended != 0);
    s->config.sigma0 = sigma0;
    s->config.t0 = t0;
    s->config.extended = extended != 0;
  });
}

mf_status mf_session_set_threads(mf_session* s, unsigned threads) {
  return guarded([&] {
    need(s, "session");
    if (threads < 1) throw UsageError("thread count must be at least 1");
    s->config.threads = threads;
  });
}

mf_status mf_session_set_identity_tolerance(mf_session* s, double tol) {
  return guarded([&] {
    need(s, "session");
    if (!(tol > 0)) throw UsageError("identity tolerance must be positive");
    s->config.tol_identity = tol;
  });
}

mf_status mf_session_set_tail_tolerances(mf_session* s, double dirichlet, double twisted) {
  return guarded([&] {
    need(s, "session");
    if (!(dirichlet > 0) || !(twisted > 0)) throw UsageError("tail tolerances must be positive");
    s->config.tail_tol = dirichlet;
    s->config.twisted_tail_tol = twisted;
  });
}

mf_status mf_session_set_form_path(mf_session* s, const char* path, size_t depth) {
  return guarded([&] {
    need(s, "session");
    s->config.form_path = path ? path : "";
    s->label.clear();
    s->depth = depth;
    s->form.reset();
  });
}

mf_status mf_session_set_form_label(mf_session* s, const char* label, size_t depth) {
  return guarded([&] {
    need(s, "session");
    if (!label || !*label) throw UsageError("empty form label");
    s->label = label;
    s->depth = depth;
    s->form.reset();
  });
}

mf_status mf_session_load_form(mf_session* s) {
  return guarded([&] {
    need(s, "session");
    form_of(s);
  });
}

mf_status mf_verify(mf_session* s, const char* suite, mf_result** out) {
  return guarded([&] {
    need(s, "session");
    need(out, "out");
    const std::string name = suite ? suite : "";
    auto suites = verify::run_verify(name, [&]() -> const maass::MaassForm& { return form_of(s); });
    *out = make_result(store::verify_document(suites, s->config));
  });
}

mf_status mf_moment(mf_session* s, int64_t q, mf_result** out) {
  return guarded([&] {
    need(s, "session");
    need(out, "out");
    store::require_prime_modulus(q);
    s->config.validate();
    const auto& f = validated_form(s);
    const moment::MomentReport r = moment::run_moment(q, s->config.point(), f, s->config.moment_params());
    *out = make_result(store::moment_document(r, s->config, s->info));
  });
}

mf_status mf_fit(mf_session* s, const int64_t* q_list, size_t count, mf_result** out) {
  return guarded([&] {
    need(s, "session");
    need(out, "out");
    if (count > 0) need(q_list, "q_list");
    std::vector<std::int64_t> qs(q_list, q_list + count);
    if (qs.empty()) qs = moment::default_prime_grid();
    for (auto q : qs) store::require_prime_modulus(q);
    if (qs.size() < 4) throw UsageError("fit needs at least 4 primes, got " + std::to_string(qs.size()));
    s->config.validate();
    const auto& f = validated_form(s);
    const moment::ExponentFit fit = moment::exponent_fit(qs, s->config.point(), f, s->config.moment_params());
    *out = make_result(store::fit_document(fit, s->config, s->info));
  });
}

mf_status mf_nonvanish(mf_session* s, int64_t q, mf_result** out) {
  return guarded([&] {
    need(s, "session");
    need(out, "out");
    store::require_prime_modulus(q);
    s->config.validate();
    const auto& f = validated_form(s);
    const moment::NonvanishingReport r = moment::nonvanishing_scan(q, s->config.point(), f, s->config.moment_params());
    *out = make_result(store::nonvanish_document(r, s->config, s->info));
  });
}

mf_status mf_voronoi(mf_session* s, int64_t c, int64_t d, double N, mf_result** out) {
  return guarded([&] {
    need(s, "session");
    need(out, "out");
    if (c < 0) throw UsageError("modulus c must be positive");
    const auto& f = form_of(s);
    const maass::HeckeReport h = maass::hecke_report(f);
    const verify::Tolerances tol;
    std::vector<lfun::VoronoiResult> rows;
    if (h.ok()) {
      lfun::VoronoiParams vp;
      vp.tol = tol.voronoi;
      lfun::VoronoiValidator v(f, vp);
      if (c == 0) {
        for (double n : {50.0, 100.0, 200.0})
          for (std::int64_t cc = 1; cc <= 10; ++cc)
            for (std::int64_t dd = 1; dd <= std::max<std::int64_t>(1, cc - 1); ++dd)
              if (std::gcd(cc, dd) == 1) rows.push_back(v.check(cc, dd, n));
      } else {
        if (!(N > 0)) throw UsageError("N must be positive");
        rows.push_back(v.check(c, d, N));
      }
    }
    *out = make_result(store::voronoi_document(rows, tol.voronoi, h.ok(), hecke_summary(h), s->config, s->info));
  });
}

mf_status mf_fetch(const char* label, size_t depth, const char* out_path, mf_result** out) {
  return guarded([&] {
    need(out, "out");
    if (!label || !*label) throw UsageError("fetch needs --label");
    if (!out_path || !*out_path) throw UsageError("fetch needs an output path (--out)");
    maass::FetchResult r = maass::fetch_remote(label, depth, maass::FetchConfig::from_environment());
    r.form.comments.push_back("fetched label " + std::string(label) + " at " + store::utc_timestamp() + ", depth " +
                              std::to_string(r.form.depth()));
    r.form.comments.push_back("provenance: " + (r.fell_back ? r.notice : r.url));
    maass::write_form(r.form, out_path);
    maass::load_form(out_path);  // round trip through the parser and Hecke validation
    *out = make_result(store::fetch_document(r, label, depth, out_path));
  });
}

mf_status mf_primes_in_range(int64_t lo, int64_t hi, int64_t* buf, size_t cap, size_t* count) {
  return guarded([&] {
    need(count, "count");
    if (lo > hi) throw UsageError("empty range: " + std::to_string(lo) + " > " + std::to_string(hi));
    const auto ps = store::primes_in_range(lo, hi);
    *count = ps.size();
    for (std::size_t i = 0; i < ps.size() && i < cap; ++i) buf[i] = ps[i];
  });
}

int mf_result_passed(const mf_result* r) { return r && r->passed ? 1 : 0; }
const char* mf_result_kind(const mf_result* r) { return r ? r->kind.c_str() : ""; }
const char* mf_result_json(const mf_result* r) { return r ? r->json.c_str() : ""; }
const char* mf_result_summary(const mf_result* r) { return r ? r->summary.c_str() : ""; }

mf_status mf_result_number(const mf_result* r, const char* pointer, double* value) {
  return guarded([&] {
    need(r, "result");
    need(pointer, "pointer");
    need(value, "value");
    const store::Document::json_pointer p(pointer);
    if (!r->doc.contains(p)) throw UsageError(std::string("no field ") + pointer);
    const auto& v = r->doc.at(p);
    if (!v.is_number()) throw UsageError(std::string("field ") + pointer + " is not a number");
    *value = v.get<double>();
  });
}

void mf_result_destroy(mf_result* r) { delete r; }

mf_status mf_store_open(const char* dir, mf_store** out) {
  return guarded([&] {
    need(out, "out");
    if (!dir || !*dir) throw UsageError("empty report directory");
    auto st = std::make_unique<mf_store>();
    st->st = std::make_unique<store::ReportStore>(dir);
    *out = st.release();
  });
}

void mf_store_close(mf_store* st) { delete st; }

mf_status mf_store_append(mf_store* st, const mf_result* r) {
  return guarded([&] {
    need(st, "store");
    need(r, "result");
    const auto e = st->st->append(r->doc);
    st->last_path = e.report_path;
    st->last_row = e.index_row;
  });
}

const char* mf_store_last_path(const mf_store* st) { return st ? st->last_path.c_str() : ""; }
const char* mf_store_last_row(const mf_store* st) { return st ? st->last_row.c_str() : ""; }

const char* mf_store_index_header(void) {
  static const std::string h = store::ReportStore::header();
  return h.c_str();
}

}  // extern "C"
