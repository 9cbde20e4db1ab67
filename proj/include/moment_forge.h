#ifndef MOMENT_FORGE_H
#define MOMENT_FORGE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define MF_API __declspec(dllexport)
#else
#define MF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes double as CLI exit codes. */
typedef enum mf_status {
  MF_OK = 0,
  MF_ERR_NUMERIC = 1, /* numeric or validation failure */
  MF_ERR_USAGE = 2,   /* bad arguments or configuration */
  MF_ERR_IO = 3,      /* file, network or fixture problem */
  MF_ERR_INTERNAL = 4
} mf_status;

typedef struct mf_session mf_session; /* configuration plus a lazily loaded form */
typedef struct mf_result mf_result;   /* one report document */
typedef struct mf_store mf_store;     /* report directory */

MF_API const char* mf_version(void);
/* Message of the last failed call on this thread; "" if none. */
MF_API const char* mf_last_error(void);

MF_API mf_status mf_session_create(mf_session** out);
MF_API void mf_session_destroy(mf_session* s);

MF_API mf_status mf_session_set_point(mf_session* s, double sigma0, double t0, int extended);
MF_API mf_status mf_session_set_threads(mf_session* s, unsigned threads);
/* Floor of the route-equivalence tolerance. */
MF_API mf_status mf_session_set_identity_tolerance(mf_session* s, double tol);
MF_API mf_status mf_session_set_tail_tolerances(mf_session* s, double dirichlet, double twisted);
/* Fixture file; NULL or "" selects the bundled fixture. depth 0 keeps every coefficient. */
MF_API mf_status mf_session_set_form_path(mf_session* s, const char* path, size_t depth);
/* Remote label fetched on first use (MOMENT_FORGE_OFFLINE=1 falls back to the bundled fixture). */
MF_API mf_status mf_session_set_form_label(mf_session* s, const char* label, size_t depth);
/* Loads the form now; later calls reuse it. */
MF_API mf_status mf_session_load_form(mf_session* s);

/* suite: char-sums, special, maass, l-eval, voronoi or all. */
MF_API mf_status mf_verify(mf_session* s, const char* suite, mf_result** out);
MF_API mf_status mf_moment(mf_session* s, int64_t q, mf_result** out);
/* count 0 uses the default prime grid. */
MF_API mf_status mf_fit(mf_session* s, const int64_t* q_list, size_t count, mf_result** out);
MF_API mf_status mf_nonvanish(mf_session* s, int64_t q, mf_result** out);
/* c = 0 runs the panel c <= 10, d coprime, N in {50, 100, 200}. */
MF_API mf_status mf_voronoi(mf_session* s, int64_t c, int64_t d, double N, mf_result** out);
/* Writes a fixture with provenance header to out_path. */
MF_API mf_status mf_fetch(const char* label, size_t depth, const char* out_path, mf_result** out);

/* Primes >= 5 in [lo, hi]; writes at most cap, returns the total count in *count. */
MF_API mf_status mf_primes_in_range(int64_t lo, int64_t hi, int64_t* buf, size_t cap, size_t* count);

/* 1 if the report's checks passed. */
MF_API int mf_result_passed(const mf_result* r);
MF_API const char* mf_result_kind(const mf_result* r);
/* Full JSON document (schema 1). */
MF_API const char* mf_result_json(const mf_result* r);
/* Console summary. */
MF_API const char* mf_result_summary(const mf_result* r);
/* Numeric field by JSON pointer, e.g. "/result/identity_gap". */
MF_API mf_status mf_result_number(const mf_result* r, const char* pointer, double* value);
MF_API void mf_result_destroy(mf_result* r);

MF_API mf_status mf_store_open(const char* dir, mf_store** out);
MF_API void mf_store_close(mf_store* st);
/* Writes the report file and its index row. */
MF_API mf_status mf_store_append(mf_store* st, const mf_result* r);
MF_API const char* mf_store_last_path(const mf_store* st);
MF_API const char* mf_store_last_row(const mf_store* st);
MF_API const char* mf_store_index_header(void);

#ifdef __cplusplus
}
#endif

#endif
