#include <math.h>
#include <stdio.h>
#include "melnikov_lab.h"

int main(void) {
    MlSpec *spec = NULL;
    if (ml_realize(4, 0, 1, false, 1, &spec) != ML_STATUS_OK) {
        fprintf(stderr, "realize: %s\n", ml_last_error_message());
        return 1;
    }
    MlConfiguration conf;
    if (ml_verify(spec, &conf) != ML_STATUS_OK || conf.m1 != 4 || conf.n1 != 0 || !conf.certified) {
        return 2;
    }
    double m1, n1;
    if (ml_eval(spec, 0.5, &m1, &n1) != ML_STATUS_OK || !isfinite(m1)) {
        return 3;
    }
    ml_spec_free(spec);
    if (ml_spec_from_json("[", &spec) != ML_STATUS_INVALID_SPEC) {
        return 4;
    }
    printf("%s ok\n", ml_version());
    return 0;
}
