#include <stdio.h>

#include "semuav.h"

int main(void) {
    SemParams *params = NULL;
    SemSolution *solution = NULL;
    SemSummary s;

    printf("semuav %s\n", sem_version());
    if (sem_params_default(&params) != SEM_STATUS_OK) {
        fprintf(stderr, "%s\n", sem_last_error());
        return 1;
    }
    sem_params_set_grid(params, 60, 60, 1);
    sem_params_set(params, "B_B", 1e6);

    if (sem_solve(params, "proposed", &solution) != SEM_STATUS_OK) {
        fprintf(stderr, "%s\n", sem_last_error());
        sem_params_free(params);
        return 1;
    }
    sem_solution_summary(solution, &s);
    printf("energy %.6e J, a = %u, rho = %.4f, p_U = %.3e W, p_B = %.3e W\n",
           s.e_total, s.offload, s.rho, s.p_uav, s.p_bs);
    printf("uav at (%.2f, %.2f, %.2f)\n", s.x, s.y, s.h);
    sem_solution_free(solution);

    /* a budget nobody can meet */
    sem_params_set(params, "T_th", 1e-4);
    SemStatus st = sem_solve(params, NULL, &solution);
    printf("status %d: %s\n", (int)st, sem_last_error());

    sem_params_free(params);
    return st == SEM_STATUS_INFEASIBLE ? 0 : 1;
}
