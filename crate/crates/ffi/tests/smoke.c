#include <math.h>
#include <stdio.h>
#include "holocond.h"

int main(void) {
    double k0 = 0.0;
    if (holocond_radial_density(HOLOCOND_DENSITY_KIND_K_INFINITY, 0, 0.0, &k0) != HOLOCOND_STATUS_OK) return 1;
    if (fabs(k0 - 2.0 / M_PI) > 1e-12) return 2;

    double bad = 0.0;
    if (holocond_radial_density(HOLOCOND_DENSITY_KIND_D_INFINITY, 0, -1.0, &bad) != HOLOCOND_STATUS_DOMAIN) return 3;
    if (holocond_last_error_message() == NULL) return 4;

    HolocondPolynomial *poly = NULL;
    if (holocond_polynomial_sample(8, 1, 2, HOLOCOND_CONDITIONING_NONE, &poly) != HOLOCOND_STATUS_OK) return 5;
    HolocondComplex zeros[8];
    size_t len = 0;
    if (holocond_polynomial_zeros(poly, zeros, 8, &len) != HOLOCOND_STATUS_OK || len != 8) return 6;
    holocond_polynomial_free(poly);

    double edges[] = {0.0, 1.0, 2.0};
    HolocondExperiment *exp = NULL;
    if (holocond_experiment_new(30, 20, HOLOCOND_CONDITIONING_CRITICAL_AT_ORIGIN, edges, 3, 4, &exp) != HOLOCOND_STATUS_OK)
        return 7;
    if (holocond_experiment_run(exp) != HOLOCOND_STATUS_OK) return 8;
    uint64_t counts[2];
    if (holocond_experiment_counts(exp, counts, 2, &len) != HOLOCOND_STATUS_OK || len != 2) return 9;
    holocond_experiment_free(exp);

    printf("%.17g %llu %llu\n", k0, (unsigned long long)counts[0], (unsigned long long)counts[1]);
    return 0;
}
