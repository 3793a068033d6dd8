#include <stdio.h>
#include <math.h>
#include "wpucn.h"

static int check(WpucnStatus st, const char *what) {
    if (st != WPUCN_STATUS_OK) {
        fprintf(stderr, "%s failed (%d): %s\n", what, (int)st, wpucn_last_error());
        return 1;
    }
    return 0;
}

int main(void) {
    WpucnScenario *s = NULL;
    if (check(wpucn_scenario_from_toml("num_uds_N = 4\nfading_draws = 10\n", &s), "from_toml")) return 1;

    WpucnPathLoss loss;
    if (check(wpucn_path_loss(s, WPUCN_SOURCE_UAV, 1.0, 2.0, &loss), "path_loss")) return 1;
    if (!(loss.total > 1.0)) return 2;

    WpucnPlan *p = NULL;
    if (check(wpucn_plan(s, WPUCN_APPROACH_HYBRID, WPUCN_SCHEME_AASS_II, WPUCN_SCHEME_RAB, 1, &p), "plan")) return 1;
    WpucnPlanSummary sum;
    if (check(wpucn_plan_summary(p, &sum), "summary")) return 1;
    double slots[4];
    if (check(wpucn_plan_slots(p, slots, 4), "slots")) return 1;
    printf("%zu %.6f %d\n", sum.num_uds, sum.energy_j, sum.feasible ? 1 : 0);

    if (wpucn_scenario_set(s, "radius_R", -1.0) != WPUCN_STATUS_VALIDATION_ERROR) return 3;
    wpucn_plan_free(p);
    wpucn_scenario_free(s);
    return 0;
}
