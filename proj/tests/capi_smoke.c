/* The public header must compile as C and the library must be usable from C. */
#include <npslab/npslab.h>

#include <stdio.h>

int main(void) {
  nps_config* cfg = NULL;
  nps_steady* st = NULL;
  nps_currents cur;
  if (nps_config_new(&cfg) != NPS_OK) return 1;
  if (nps_config_set(cfg, "grid.n", "17") != NPS_OK) return 1;
  if (nps_steady_solve(cfg, &st) != NPS_OK) {
    fprintf(stderr, "%s\n", nps_last_error());
    return 1;
  }
  if (nps_steady_currents(st, &cur) != NPS_OK) return 1;
  printf("npslab %s: j1 = %g, j2 = %g\n", nps_version(), cur.j1, cur.j2);
  nps_steady_free(st);
  nps_config_free(cfg);
  return cur.j1 == 0.0 && cur.j2 == 0.0 ? 0 : 1;
}
