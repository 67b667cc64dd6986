#pragma once

namespace homsvm {

// Derived constants of the homotopic schedule:
//   epsilon0 = (log s0 - log(s0-1)) / log s0
//   alpha    = min((r - 2p) / (2(1 + epsilon0)), 1 - p)
//   big_c    = max(4, 0.5 * s0^p * (s0-1)^alpha)
// big_c is computed via lambda0 = s0^(-p) as max(4, (s0-1)^alpha / (2*lambda0)),
// the equivalent form that makes the link to the stage-0 radius explicit.
struct SchedulePlan {
    double p;
    double r;
    int s0;
    double epsilon0;
    double alpha;
    double big_c;
};

// Validates 0 < p < 1, r > 2p, s0 > 2; each violation is reported naming the
// offending parameter.
SchedulePlan make_plan(double p, double r, int s0);

// Stage s of the schedule:
//   lambda_s = (s0+s)^(-p)
//   t_s      = round((s0+s)^r), ties to even; exact for integer r
//   eta_s    = big_c * (s0+s-1)^(-alpha) / sqrt(t_s)
// eta_s * lambda_s < 1 is required by the inner update and enforced there,
// not here: extreme admissible (p, r, s0) combinations violate it at s = 0.
struct StageParams {
    int s;
    double lambda;
    long long t;
    double eta;
};

StageParams stage(const SchedulePlan& plan, int s);

// R_s = big_c * L * (s0+s-1)^(-alpha): the shrinking radius within which
// stage s's seed is guaranteed to start. R_0 >= mean_norm / lambda_0 by the
// big_c >= (s0-1)^alpha / (2*lambda0) clamp.
double stage_radius(const SchedulePlan& plan, int s, double lipschitz_l);

// Largest stage count whose cumulative update count fits the budget, plus
// that exact cumulative count.
struct StageBudget {
    int stages;
    long long updates;
};

// Requires budget >= t_0 (anything smaller cannot finish one stage).
StageBudget budget_to_stages(const SchedulePlan& plan, long long budget);

}  // namespace homsvm
