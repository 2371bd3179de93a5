#include <stdio.h>
#include <stdlib.h>
#include "classmem.h"

int main(int argc, char **argv) {
    if (argc != 2) return 2;
    FILE *f = fopen(argv[1], "rb");
    if (!f) return 2;
    static char buf[1 << 16];
    size_t n = fread(buf, 1, sizeof buf - 1, f);
    fclose(f);
    buf[n] = 0;
    ClmModel *m = NULL;
    if (clm_model_parse(buf, &m) != CLM_STATUS_OK) {
        fprintf(stderr, "%s\n", clm_last_error());
        return 1;
    }
    ClmVerdict v;
    if (clm_empty(m, 0, &v) != CLM_STATUS_OK) {
        fprintf(stderr, "%s\n", clm_last_error());
        return 1;
    }
    printf("%s %s\n", clm_model_tag(m), v == CLM_VERDICT_NON_EMPTY ? "nonempty" : "empty");
    clm_model_free(m);
    return 0;
}
