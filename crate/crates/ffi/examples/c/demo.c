/* Prints the phase-matching angle and the peak count at two idler
 * wavelengths, then the 806.3 nm spectrum maximum. */
#include <stdio.h>
#include <stdlib.h>

#include "spdc_ffi.h"

static int check(SpdcStatus s, const char *what) {
    if (s != SPDC_STATUS_OK) {
        const char *msg = spdc_last_error_message();
        fprintf(stderr, "%s failed (%d): %s\n", what, (int)s, msg ? msg : "?");
        return 1;
    }
    return 0;
}

int main(void) {
    SpdcModel *m = NULL;
    if (check(spdc_model_new_default(&m), "spdc_model_new_default")) return 1;

    double deg, residual;
    if (check(spdc_phase_matching_angle(m, &deg, &residual), "spdc_phase_matching_angle")) goto fail;
    printf("phi0 %.6f deg residual %.3e\n", deg, residual);

    const double l2s[2] = {806.3, 809.4};
    for (int i = 0; i < 2; i++) {
        size_t n = 0;
        if (check(spdc_count_peaks(m, l2s[i], 795.0, 825.0, 0.02, 0.1, &n), "spdc_count_peaks")) goto fail;
        printf("lambda2 %.1f peaks %zu\n", l2s[i], n);
    }

    size_t len = 0;
    SpdcStatus s = spdc_conditional_spectrum(m, 806.3, 795.0, 825.0, 0.02, true, NULL, 0, &len);
    if (s != SPDC_STATUS_BUFFER_TOO_SMALL) goto fail;
    double *buf = malloc(len * sizeof *buf);
    if (check(spdc_conditional_spectrum(m, 806.3, 795.0, 825.0, 0.02, true, buf, len, &len), "spdc_conditional_spectrum")) {
        free(buf);
        goto fail;
    }
    size_t best = 0;
    for (size_t i = 1; i < len; i++)
        if (buf[i] > buf[best]) best = i;
    printf("samples %zu max at %.2f nm\n", len, 795.0 + 0.02 * (double)best);
    free(buf);

    spdc_model_free(m);
    return 0;
fail:
    spdc_model_free(m);
    return 1;
}
