#pragma once

#include <optional>
#include <span>
#include <vector>

#include "homsvm/losses.hpp"
#include "homsvm/schedule.hpp"

namespace homsvm {

// Which iterate a stage hands to the next one: the running average of its
// inner iterates, or the inner iterate with the lowest objective.
enum class UpdateRule { averaged, best_iterate };

// plain: w <- (1 - lambda*eta) w + (eta/n) * active_sum. normalized: step of
// length eta against the unit subgradient (no-op when the subgradient is 0).
enum class StepMode { plain, normalized };

struct SolverConfig {
    SchedulePlan plan;
    int stages = 0;          // exactly one of stages/budget must be positive
    long long budget = 0;    // largest update count; resolved via budget_to_stages
    UpdateRule update_rule = UpdateRule::averaged;
    StepMode step_mode = StepMode::plain;
    ActiveRule active_rule = ActiveRule::inclusive;
    bool with_bias = false;
    bool checkpoint_every_stage = true;  // false keeps only the final stage
};

struct Checkpoint {
    int stage = 0;
    long long k = 0;      // cumulative update count through this stage
    double lambda = 0.0;
    double eta = 0.0;
    long long t = 0;
    std::vector<double> iterate;
    double loss = 0.0;    // objective at `iterate` under this stage's lambda
    double max_iterate_norm = 0.0;  // largest iterate norm seen in the stage, seed included
    std::optional<double> bias;
};

struct SolveTrace {
    std::vector<Checkpoint> checkpoints;
    std::vector<double> final_w;
};

struct InnerResult {
    std::vector<double> averaged;  // mean of the t post-update iterates (seed excluded)
    std::vector<double> best;      // lowest-objective iterate, earliest on ties
    std::vector<double> last;
    double best_loss = 0.0;
    double max_iterate_norm = 0.0;
};

// One stage of subgradient descent at fixed lambda. Requires lambda > 0,
// eta > 0, eta*lambda < 1 and t >= 1; the schedule does not enforce
// eta*lambda < 1 on its own, so the check lives here where it matters.
InnerResult inner_run(const LossContext& ctx, std::span<const double> w0, double lambda,
                      double eta, long long t, StepMode mode, ActiveRule rule);

// Runs the staged schedule from the zero vector, each stage seeded with the
// previous stage's selected iterate, and records one checkpoint per stage.
SolveTrace homotopic_solve(const LossContext& ctx, const SolverConfig& config);

// Intercept recovered after the fact: -(min_+ x.w + max_- x.w)/2. Throws
// when either class is missing.
double estimate_bias(const LossContext& ctx, std::span<const double> w);

// Plain gradient descent on the mean logistic loss, step eta = 1/sigma_max,
// started at zero. checkpoint_ks must be strictly increasing iteration
// counts within [1, iterations]; an empty list checkpoints only the end.
// Checkpoints reuse the staged-trace shape with lambda = 0 marking the
// absence of regularization.
SolveTrace logistic_gd(const LossContext& ctx, long long iterations,
                       std::span<const long long> checkpoint_ks);

// Largest singular value of the data matrix, by power iteration on X^T X
// with a fixed deterministic start vector. Throws invalid_argument for
// identically-zero data and runtime_error if 100000 iterations do not reach
// the requested relative tolerance.
double sigma_max(const LossContext& ctx, double tol = 1e-12);

}  // namespace homsvm
