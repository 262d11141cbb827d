/* Exercises the C interface from plain C. */
#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "evcop/evcop.h"

static int failures = 0;

#define EXPECT(cond)                                              \
  do {                                                            \
    if (!(cond)) {                                                \
      fprintf(stderr, "%s:%d: %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                 \
    }                                                             \
  } while (0)

static const char* kModel =
    "{\"version\":1,\"degree\":3,"
    "\"knots\":[0.0909090909090909,0.181818181818182,0.272727272727273,0.363636363636364,"
    "0.454545454545455,0.545454545454545,0.636363636363636,0.727272727272727,"
    "0.818181818181818,0.909090909090909],"
    "\"theta\":[0,0,0,0,0,0,0,0,0,0,0,0,0],\"center_applied\":true,\"flipped\":false,"
    "\"lambda\":0.0001,\"diagnostics\":{\"loglik\":0,\"penalty\":0,\"iterations\":0,\"converged\":true}}";

int main(void) {
  evcop_model* m = NULL;
  EXPECT(evcop_model_from_json(kModel, &m) == EVCOP_OK);
  if (!m) return 1;

  /* The center model is the U^2 generator: A(1/2) = 3/4. */
  double a = 0.0;
  EXPECT(evcop_model_pickands(m, 0.5, 0, &a) == EVCOP_OK);
  EXPECT(fabs(a - 0.75) < 5e-3);
  EXPECT(evcop_model_pickands(m, 0.5, 7, &a) == EVCOP_ERR_INPUT);
  EXPECT(strlen(evcop_last_error()) > 0);
  EXPECT(evcop_model_pdf(m, 0.0, 0.5, &a) == EVCOP_ERR_INPUT);

  double c = 0.0;
  EXPECT(evcop_model_cdf(m, 0.3, 1.0, &c) == EVCOP_OK);
  EXPECT(fabs(c - 0.3) < 1e-9);

  const size_t n = 1500;
  double* uv = malloc(2 * n * sizeof(double));
  EXPECT(evcop_model_simulate(m, n, 42, uv) == EVCOP_OK);
  double* again = malloc(2 * n * sizeof(double));
  EXPECT(evcop_model_simulate(m, n, 42, again) == EVCOP_OK);
  EXPECT(memcmp(uv, again, 2 * n * sizeof(double)) == 0);

  evcop_fit_options o;
  evcop_fit_options_default(&o);
  EXPECT(o.dim == 13 && o.grid_k == 78 && o.lambda == 1e-4);
  evcop_model* fit = NULL;
  EXPECT(evcop_fit_pairs(uv, 10, &o, &fit) == EVCOP_ERR_INPUT);
  EXPECT(evcop_fit_pairs(uv, n, &o, &fit) == EVCOP_OK);

  evcop_measures ms;
  EXPECT(evcop_model_measures(fit, &ms) == EVCOP_OK);
  EXPECT(fabs(ms.blomqvist - (pow(4.0, 0.25) - 1.0)) < 0.1);
  EXPECT(fabs(ms.gini_pickands - ms.gini_copula) < 5e-3);

  /* JSON round trip reproduces the measures. */
  char* text = NULL;
  EXPECT(evcop_model_to_json(fit, &text) == EVCOP_OK);
  evcop_model* back = NULL;
  EXPECT(evcop_model_from_json(text, &back) == EVCOP_OK);
  evcop_measures mb;
  EXPECT(evcop_model_measures(back, &mb) == EVCOP_OK);
  EXPECT(fabs(mb.gini_pickands - ms.gini_pickands) <= 1e-12);
  EXPECT(fabs(mb.blomqvist - ms.blomqvist) <= 1e-12);
  evcop_string_free(text);

  evcop_model* none = NULL;
  EXPECT(evcop_model_load("/nonexistent/model.json", &none) == EVCOP_ERR_INPUT);
  EXPECT(none == NULL);
  EXPECT(evcop_model_from_json("{\"version\":1}", &none) == EVCOP_ERR_INPUT);

  evcop_model_free(back);
  evcop_model_free(fit);
  evcop_model_free(m);
  free(uv);
  free(again);
  if (failures) fprintf(stderr, "%d check(s) failed\n", failures);
  else printf("capi: all checks passed\n");
  return failures ? 1 : 0;
}
