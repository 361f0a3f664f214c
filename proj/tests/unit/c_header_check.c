/* Compiles the public header as C and makes one call through it. */
#include <hardyveto/hardyveto.h>

#include <stdio.h>

int main(void) {
  hv_state* s = NULL;
  hv_observables* obs = NULL;
  const int settings[2] = {HV_U, HV_U};
  const int outcomes[2] = {1, 1};
  double p = 0.0;
  if (hv_state_veto(2, &s) != HV_OK) return 1;
  if (hv_observables_protocol(2, &obs) != HV_OK) return 1;
  if (hv_born_probability(s, obs, settings, outcomes, &p) != HV_OK) return 1;
  hv_observables_free(obs);
  hv_state_free(s);
  printf("q = %.15f\n", p);
  return p > 0.0833 && p < 0.0834 ? 0 : 1;
}
