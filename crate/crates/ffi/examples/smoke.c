#include <stdio.h>
#include "tumor_bim.h"

static const char *CONFIG =
    "[params]\nP = 5.0\nA = 0.25\nchi = 5.0\nbeta = 0.5\nsigma_n = 0.2\nGinv = 0.001\n"
    "[necrotic]\nR0 = 0.1\n"
    "[initial]\nR_init = 2.5\neps_init = 0.1\nk_init = 2\n"
    "[numerics]\nN = 64\ndt = 1e-3\nt_final = 0.01\n";

int main(void) {
    TbSimulation *sim = NULL;
    if (tb_simulation_new(CONFIG, &sim) != TB_STATUS_OK) {
        char msg[256];
        tb_last_error_message(msg, sizeof msg);
        fprintf(stderr, "error: %s\n", msg);
        return 1;
    }
    TbRunStatus status;
    if (tb_simulation_run(sim, &status) != TB_STATUS_OK || status != TB_RUN_STATUS_COMPLETED) {
        return 1;
    }
    TbRunRow row;
    tb_simulation_last_row(sim, &row);
    printf("%llu %.6f %.6f\n", (unsigned long long)row.step, row.time, row.area);
    tb_simulation_free(sim);

    double k0;
    if (tb_bessel_k(0, 1.0, &k0) != TB_STATUS_OK) {
        return 1;
    }
    printf("%.15f\n", k0);
    return tb_bessel_k(0, -1.0, &k0) == TB_STATUS_INVALID_ARGUMENT ? 0 : 1;
}
