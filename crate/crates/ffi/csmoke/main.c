/* Minimal C consumer: classify the worked 2x2 operator, build its metric,
 * and certify uniqueness of the projector-theory state. Build:
 *   cargo build -p ptqh-ffi
 *   cc csmoke/main.c -Iinclude -L../../target/debug -lptqh_ffi -lm -o csmoke/main
 */
#include <stdio.h>
#include <stdlib.h>
#include "ptqh.h"

static void check(enum PtqhStatus status, const char *what) {
  if (status != PtqhStatusOk) {
    char message[256];
    ptqh_last_error_message(message, sizeof message);
    fprintf(stderr, "%s failed (%d): %s\n", what, (int)status, message);
    exit(1);
  }
}

int main(void) {
  const double h_re[4] = {0.0, 2.0, 2.0, 0.0};
  const double h_im[4] = {1.0, 0.0, 0.0, -1.0};
  const double swap_re[4] = {0.0, 1.0, 1.0, 0.0};

  PtqhMatrix *h = NULL, *swap = NULL, *eta = NULL;
  PtqhSymmetry *sym = NULL;
  PtqhMetric *metric = NULL;

  check(ptqh_matrix_new(2, h_re, h_im, &h), "matrix_new(h)");
  check(ptqh_matrix_new(2, swap_re, NULL, &swap), "matrix_new(swap)");
  check(ptqh_symmetry_new(swap, 0.0, &sym), "symmetry_new");

  enum PtqhPhase phase;
  check(ptqh_classify(h, sym, 0.0, &phase), "classify");
  if (phase != PtqhPhaseUnbroken) {
    fprintf(stderr, "expected unbroken, got %d\n", (int)phase);
    return 1;
  }

  check(ptqh_metric_from_unbroken(h, sym, 0.0, &metric), "metric_from_unbroken");
  double min_eig = 0.0;
  check(ptqh_metric_min_eigenvalue(metric, &min_eig), "metric_min_eigenvalue");
  check(ptqh_metric_matrix(metric, &eta), "metric_matrix");

  bool unique = false;
  uintptr_t refuted = 0;
  check(ptqh_certify_unique(sym, 25, 0, 0.0, &unique, &refuted), "certify_unique");

  printf("phase=unbroken min_eig=%.6f eta_dim=%zu unique=%d refuted=%zu\n",
         min_eig, ptqh_matrix_dim(eta), (int)unique, (size_t)refuted);

  ptqh_matrix_free(eta);
  ptqh_metric_free(metric);
  ptqh_symmetry_free(sym);
  ptqh_matrix_free(swap);
  ptqh_matrix_free(h);
  return unique && refuted == 25 ? 0 : 1;
}
