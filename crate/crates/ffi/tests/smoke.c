#include <math.h>
#include <stdio.h>

#include "orlicz_eig.h"

int main(void) {
    OeYoung *young = NULL;
    if (oe_young_new("power:2", &young) != OE_STATUS_OK) return 1;
    OeSolveOptions opts = oe_solve_options_default();
    opts.n_elements = 32;
    OeEigenPair *pair = NULL;
    if (oe_eig_first(young, 1.0, &opts, &pair) != OE_STATUS_OK) return 2;
    double lambda = oe_eigenpair_lambda(pair);
    oe_eigenpair_free(pair);
    oe_young_free(young);
    if (fabs(lambda - 3.14159265358979) > 1e-2) return 3;

    OeYoung *bad = NULL;
    if (oe_young_new("power:0.9", &bad) != OE_STATUS_CONFIG_ERROR || bad != NULL) return 4;
    char msg[128];
    oe_last_error_message(msg, sizeof msg);
    printf("%.6f %s\n", lambda, msg);
    return 0;
}
