/* Plain C client: OU factor, whole-past prediction, error handling. */
#include <math.h>
#include <stdio.h>
#include <string.h>

#include "ctp/ctp.h"

#define EXPECT(cond)                                            \
  do {                                                          \
    if (!(cond)) {                                              \
      fprintf(stderr, "%s:%d: %s\n", __FILE__, __LINE__, #cond); \
      return 1;                                                 \
    }                                                           \
  } while (0)

int main(void) {
  const double params[2] = {1.0, 1.0};
  ctp_model* model = NULL;
  ctp_factor* factor = NULL;
  ctp_prediction* pred = NULL;
  ctp_config* cfg = NULL;

  EXPECT(strcmp(ctp_version(), "0.1.0") == 0);
  EXPECT(ctp_model_closed_form("ou", params, 2, 64.0, 1.0 / 256, 0, &model) == CTP_OK);
  EXPECT(ctp_factorize(model, NULL, &factor) == CTP_OK);
  EXPECT(ctp_predict_whole_past(factor, 1.0, 0, &pred) == CTP_OK);
  EXPECT(fabs(ctp_prediction_sigma2(pred) - (1.0 - exp(-2.0))) < 1e-4);

  EXPECT(ctp_predict_whole_past(factor, -1.0, 0, &pred) == CTP_E_DOMAIN);
  EXPECT(strlen(ctp_last_error()) > 0);
  EXPECT(ctp_config_parse("famly = ou\n", &cfg) == CTP_E_CONFIG);
  EXPECT(strstr(ctp_last_error(), "famly") != NULL);
  EXPECT(strcmp(ctp_status_name(CTP_E_WINDOW), "window") == 0 ||
         strlen(ctp_status_name(CTP_E_WINDOW)) > 0);

  ctp_prediction_free(pred);
  ctp_factor_free(factor);
  ctp_model_free(model);
  ctp_config_free(NULL);
  puts("c smoke ok");
  return 0;
}
