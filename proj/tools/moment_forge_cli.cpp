// moment-forge: command-line front end over the C API.
#include <CLI11.hpp>

#include <cstdio>
#include <string>
#include <vector>

#include "moment_forge.h"

namespace {

struct Options {
  std::vector<std::int64_t> q;
  std::int64_t q_min = 0, q_max = 0;
  double sigma0 = 0.5;
  double t0 = 0.0;
  bool extended = false;
  std::string form;
  std::string label;
  std::size_t depth = 0;
  double tol_identity = 1e-6;
  unsigned threads = 1;
  std::string out = "mforge-reports";
  std::string format = "json";
  std::string suite = "all";
  std::int64_t c = 0, d = 1;
  double N = 100.0;
};

int fail(mf_status st) {
  std::fprintf(stderr, "error: %s\n", mf_last_error());
  return static_cast<int>(st);
}

void add_common(CLI::App* app, Options& o, bool with_point) {
  if (with_point) {
    app->add_option("--sigma0", o.sigma0, "real part of s0, in [1/2, 1)")->capture_default_str();
    app->add_option("--t0", o.t0, "imaginary part of s0")->capture_default_str();
    app->add_flag("--extended", o.extended, "allow sigma0 outside [1/2, 1)");
    app->add_option("--tol-identity", o.tol_identity, "floor of the route-equivalence tolerance")->capture_default_str();
  }
  app->add_option("--form", o.form, "fixture file (default: bundled)");
  app->add_option("--label", o.label, "remote form label (fetched; MOMENT_FORGE_OFFLINE=1 disables network)");
  app->add_option("--depth", o.depth, "number of coefficients to use");
  app->add_option("--threads", o.threads, "worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  app->add_option("--out", o.out, "report directory")->capture_default_str();
  app->add_option("--format", o.format, "stdout format")->capture_default_str()->check(CLI::IsMember({"json", "csv"}));
}

// Applies the options to a session; returns a nonzero exit code on failure.
int configure(mf_session* s, const Options& o, bool with_point) {
  mf_status st = MF_OK;
  if (with_point && (st = mf_session_set_point(s, o.sigma0, o.t0, o.extended ? 1 : 0)) != MF_OK) return fail(st);
  if (with_point && (st = mf_session_set_identity_tolerance(s, o.tol_identity)) != MF_OK) return fail(st);
  if ((st = mf_session_set_threads(s, o.threads)) != MF_OK) return fail(st);
  if (!o.label.empty()) {
    if ((st = mf_session_set_form_label(s, o.label.c_str(), o.depth)) != MF_OK) return fail(st);
  } else if ((st = mf_session_set_form_path(s, o.form.c_str(), o.depth)) != MF_OK) {
    return fail(st);
  }
  return 0;
}

// Persists the report, prints it, and maps pass/fail onto the exit code.
int emit(mf_result* r, const Options& o) {
  std::fputs(mf_result_summary(r), stderr);
  mf_store* st = nullptr;
  mf_status s = mf_store_open(o.out.c_str(), &st);
  if (s == MF_OK) s = mf_store_append(st, r);
  if (s != MF_OK) {
    mf_store_close(st);
    mf_result_destroy(r);
    return fail(s);
  }
  if (o.format == "csv") {
    std::printf("%s\n%s\n", mf_store_index_header(), mf_store_last_row(st));
  } else {
    std::printf("%s\n", mf_result_json(r));
  }
  std::fprintf(stderr, "report %s\n", mf_store_last_path(st));
  const int code = mf_result_passed(r) ? 0 : 1;
  mf_store_close(st);
  mf_result_destroy(r);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"moment-forge: first moments of twisted L-functions, with verification suites"};
  app.require_subcommand(1);
  Options o;

  auto* verify = app.add_subcommand("verify", "run a verification suite");
  verify->add_option("suite", o.suite, "char-sums, special, maass, l-eval, voronoi or all")->capture_default_str();
  add_common(verify, o, false);

  auto* moment = app.add_subcommand("moment", "first moment at one prime modulus, both routes");
  moment->add_option("--q", o.q, "prime modulus")->required()->expected(1);
  add_common(moment, o, true);

  auto* fit = app.add_subcommand("fit", "exponent fit of |lhs - main term| over primes");
  fit->add_option("--q", o.q, "primes (repeat or comma-separate)")->delimiter(',');
  fit->add_option("--q-min", o.q_min, "smallest modulus of the range");
  fit->add_option("--q-max", o.q_max, "largest modulus of the range");
  add_common(fit, o, true);

  auto* nonvanish = app.add_subcommand("nonvanish", "per-character products and the M(sigma0) threshold");
  nonvanish->add_option("--q", o.q, "prime modulus")->required()->expected(1);
  add_common(nonvanish, o, true);

  auto* voronoi = app.add_subcommand("voronoi", "Voronoi summation check (default: the c <= 10 panel)");
  voronoi->add_option("--c", o.c, "modulus c (0: full panel)");
  voronoi->add_option("--d", o.d, "residue d coprime to c")->capture_default_str();
  voronoi->add_option("--N", o.N, "length N")->capture_default_str();
  add_common(voronoi, o, false);

  auto* fetch = app.add_subcommand("fetch", "fetch Hecke eigenvalues into a fixture file");
  std::string fetch_out;
  std::size_t fetch_depth = 1000;
  fetch->add_option("--label", o.label, "form label")->required();
  fetch->add_option("--depth", fetch_depth, "number of coefficients")->capture_default_str();
  fetch->add_option("--out", fetch_out, "fixture path to write")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return MF_ERR_USAGE;
  }

  mf_result* r = nullptr;
  if (fetch->parsed()) {
    const mf_status st = mf_fetch(o.label.c_str(), fetch_depth, fetch_out.c_str(), &r);
    if (st != MF_OK) return fail(st);
    std::fputs(mf_result_summary(r), stderr);
    std::printf("%s\n", mf_result_json(r));
    mf_result_destroy(r);
    return 0;
  }

  mf_session* s = nullptr;
  if (const mf_status st = mf_session_create(&s); st != MF_OK) return fail(st);
  struct Closer {
    mf_session* s;
    ~Closer() { mf_session_destroy(s); }
  } closer{s};

  const bool with_point = moment->parsed() || fit->parsed() || nonvanish->parsed();
  if (const int code = configure(s, o, with_point); code != 0) return code;

  mf_status st = MF_OK;
  if (verify->parsed()) {
    st = mf_verify(s, o.suite.c_str(), &r);
  } else if (moment->parsed()) {
    st = mf_moment(s, o.q.front(), &r);
  } else if (nonvanish->parsed()) {
    st = mf_nonvanish(s, o.q.front(), &r);
  } else if (voronoi->parsed()) {
    st = mf_voronoi(s, o.c, o.d, o.N, &r);
  } else if (fit->parsed()) {
    std::vector<std::int64_t> qs = o.q;
    if (qs.empty() && (o.q_min != 0 || o.q_max != 0)) {
      std::size_t n = 0;
      if ((st = mf_primes_in_range(o.q_min, o.q_max, nullptr, 0, &n)) != MF_OK) return fail(st);
      qs.resize(n);
      if ((st = mf_primes_in_range(o.q_min, o.q_max, qs.data(), qs.size(), &n)) != MF_OK) return fail(st);
      if (qs.empty()) {
        std::fprintf(stderr, "error: no primes >= 5 in [%lld, %lld]\n", static_cast<long long>(o.q_min),
                     static_cast<long long>(o.q_max));
        return MF_ERR_USAGE;
      }
    }
    st = mf_fit(s, qs.data(), qs.size(), &r);
  }
  if (st != MF_OK) return fail(st);
  return emit(r, o);
}
