#include <stdio.h>
#include "localhcf.h"

int main(void) {
    LhcfProblem *p = NULL;
    if (lhcf_problem_chain_fixture(&p) != LHCF_STATUS_OK) {
        fprintf(stderr, "%s\n", lhcf_last_error());
        return 1;
    }
    uint32_t labels[8];
    LhcfRunInfo info;
    LhcfStatus st = lhcf_run_local_hcf(p, 1, 0, labels, 8, &info);
    if (st != LHCF_STATUS_OK) {
        fprintf(stderr, "%s\n", lhcf_last_error());
        lhcf_problem_free(p);
        return 1;
    }
    for (int i = 0; i < 8; i++) putchar(labels[i] ? 'e' : 'n');
    printf(" energy=%g iterations=%zu\n", info.energy, info.iterations);
    lhcf_problem_free(p);
    return 0;
}
