#include <stdio.h>
#include "loopblocks.h"

int main(void) {
    LbGroup *g = NULL;
    LbBlocks *b = NULL;
    uint64_t dof = 0, n = 0;
    if (lb_group_new("D6", &g) != LB_STATUS_OK) return 1;
    if (lb_blocks_new(g, "orient:gx=0,gy=0,n=2,s=++", &b) != LB_STATUS_OK) return 2;
    if (lb_blocks_total_dof(b, &dof) != LB_STATUS_OK) return 3;
    if (lb_gsd(g, "torus", &n) != LB_STATUS_OK) return 4;
    if (lb_group_new("nope", &g) == LB_STATUS_OK) return 5;
    char *msg = lb_last_error();
    if (msg == NULL) return 6;
    lb_string_free(msg);
    printf("dof %llu gsd %llu\n", (unsigned long long)dof, (unsigned long long)n);
    lb_blocks_free(b);
    return 0;
}
