#include <stdio.h>
#include "projcalc.h"

int main(void) {
    PcSpace *space = NULL;
    PcSet *ball = NULL;
    double x[3] = {3.0, -4.0, 12.0};
    double px[3];
    double norm;

    if (pc_space_new(3, 3.0, NULL, &space) != PC_STATUS_OK ||
        pc_set_ball(1.0, &ball) != PC_STATUS_OK) {
        fprintf(stderr, "setup: %s\n", pc_last_error());
        return 1;
    }
    if (pc_project(space, ball, x, 3, px) != PC_STATUS_OK ||
        pc_norm(space, px, 3, &norm) != PC_STATUS_OK) {
        fprintf(stderr, "project: %s\n", pc_last_error());
        return 1;
    }
    printf("P(x) = [%.6f, %.6f, %.6f], norm %.12f\n", px[0], px[1], px[2], norm);

    if (pc_frechet_apply(space, ball, px, x, 3, px) == PC_STATUS_NO_DERIVATIVE)
        printf("boundary: %s\n", pc_last_error());

    pc_set_free(ball);
    pc_space_free(space);
    return 0;
}
