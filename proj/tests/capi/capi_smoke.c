/* Compiled as C to keep the header C-clean. */
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "moment_forge.h"

static int failed = 0;

#define EXPECT(cond)                                           \
  do {                                                         \
    if (!(cond)) {                                             \
      fprintf(stderr, "%s:%d: %s\n", __FILE__, __LINE__, #cond); \
      failed = 1;                                              \
    }                                                          \
  } while (0)

int main(int argc, char** argv) {
  const char* dir = argc > 1 ? argv[1] : "capi-reports";
  mf_session* s = NULL;
  mf_result* r = NULL;
  mf_result* r2 = NULL;
  mf_result* r3 = NULL;
  mf_store* st = NULL;
  double gap = -1, gap2 = -2;
  int64_t primes[8];
  size_t n = 0;

  EXPECT(mf_session_create(&s) == MF_OK);
  EXPECT(mf_session_set_point(s, 0.3, 0.0, 0) == MF_ERR_USAGE);
  EXPECT(strlen(mf_last_error()) > 0);
  EXPECT(mf_session_set_threads(s, 0) == MF_ERR_USAGE);
  EXPECT(mf_session_set_point(s, 0.5, 0.0, 0) == MF_OK);
  EXPECT(strlen(mf_last_error()) == 0);

  EXPECT(mf_moment(s, 9, &r) == MF_ERR_USAGE);
  EXPECT(strstr(mf_last_error(), "divisible by 3") != NULL);
  EXPECT(mf_verify(s, "bogus", &r) == MF_ERR_USAGE);
  EXPECT(mf_fit(s, primes, 0, NULL) == MF_ERR_USAGE);

  EXPECT(mf_moment(s, 5, &r) == MF_OK);
  EXPECT(mf_result_passed(r) == 1);
  EXPECT(strcmp(mf_result_kind(r), "moment") == 0);
  EXPECT(mf_result_number(r, "/result/identity_gap", &gap) == MF_OK);
  EXPECT(gap >= 0 && gap <= 1e-6);
  EXPECT(mf_result_number(r, "/result/nope", &gap2) == MF_ERR_USAGE);
  EXPECT(strstr(mf_result_json(r), "\"schema\": 1") != NULL);

  /* identical config and thread count: identical numbers */
  EXPECT(mf_session_set_threads(s, 2) == MF_OK);
  EXPECT(mf_moment(s, 5, &r2) == MF_OK);
  EXPECT(mf_result_number(r2, "/result/identity_gap", &gap2) == MF_OK);
  EXPECT(memcmp(&gap, &gap2, sizeof gap) == 0);

  EXPECT(mf_store_open(dir, &st) == MF_OK);
  EXPECT(mf_store_append(st, r) == MF_OK);
  EXPECT(strncmp(mf_store_index_header(), "file,kind,q,", 12) == 0);
  EXPECT(strstr(mf_store_last_row(st), ",moment,5,0.5,0,") != NULL);
  EXPECT(strlen(mf_store_last_path(st)) > 0);

  EXPECT(mf_primes_in_range(1, 20, primes, 8, &n) == MF_OK);
  EXPECT(n == 6 && primes[0] == 5 && primes[5] == 19);
  EXPECT(mf_primes_in_range(20, 1, primes, 8, &n) == MF_ERR_USAGE);

  EXPECT(mf_session_set_form_path(s, "no/such/fixture.txt", 0) == MF_OK);
  EXPECT(mf_verify(s, "maass", &r3) == MF_ERR_IO);
  EXPECT(r3 == NULL);
  EXPECT(mf_session_load_form(s) == MF_ERR_IO);
  EXPECT(strstr(mf_last_error(), "fixture not found") != NULL);

  mf_store_close(st);
  mf_result_destroy(r);
  mf_result_destroy(r2);
  mf_session_destroy(s);
  printf("%s\n", failed ? "FAIL" : "ok");
  return failed;
}
