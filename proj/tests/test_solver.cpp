#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "homsvm/dataset.hpp"
#include "homsvm/losses.hpp"
#include "homsvm/metrics.hpp"
#include "homsvm/solver.hpp"

using namespace homsvm;

namespace {

const std::vector<double> kZero2 = {0.0, 0.0};

}  // namespace

TEST_CASE("one plain update from zero, replicated by hand") {
    // At w = 0 every point is active, so the update is
    // w <- (1 - lambda eta) 0 + (eta/16) sum y_j x_j = (0.125/16)(40, 40),
    // all in exact dyadics.
    const Dataset data = canonical_dataset();
    const LossContext ctx = make_loss_context(data);
    const InnerResult res =
        inner_run(ctx, kZero2, 0.5, 0.125, 1, StepMode::plain, ActiveRule::inclusive);
    CHECK(res.averaged == std::vector<double>{0.3125, 0.3125});
    CHECK(res.last == std::vector<double>{0.3125, 0.3125});
    CHECK(res.best == std::vector<double>{0.3125, 0.3125});
    CHECK(res.max_iterate_norm == std::sqrt(2.0 * 0.3125 * 0.3125));
}

TEST_CASE("two plain updates from zero, replicated by hand") {
    // Second step: at (0.3125, 0.3125) only the m = 1 points stay active,
    // so w2 = 0.9375 * 0.3125 + 0.0078125 * 4 = 0.32421875 exactly, and the
    // stage average is (w1 + w2) / 2.
    const Dataset data = canonical_dataset();
    const LossContext ctx = make_loss_context(data);
    const InnerResult res =
        inner_run(ctx, kZero2, 0.5, 0.125, 2, StepMode::plain, ActiveRule::inclusive);
    CHECK(res.last == std::vector<double>{0.32421875, 0.32421875});
    CHECK(res.averaged == std::vector<double>{0.318359375, 0.318359375});
    // The second iterate has the lower objective, so it is also the best.
    CHECK(res.best == res.last);
    CHECK(res.best_loss == doctest::Approx(0.14044952392578125).epsilon(1e-15));
}

TEST_CASE("plain update is stationary at the exact minimizer") {
    // On the 4-point set at lambda = 4 the minimizer (0.25, 0.25) satisfies
    // lambda w = mean of y_j x_j exactly in floating point, so both step
    // modes must sit still.
    const Dataset data = canonical_dataset({});
    const LossContext ctx = make_loss_context(data);
    const std::vector<double> fixed = {0.25, 0.25};
    const InnerResult plain =
        inner_run(ctx, fixed, 4.0, 0.125, 3, StepMode::plain, ActiveRule::inclusive);
    CHECK(plain.last == fixed);
    CHECK(plain.averaged == fixed);
    const InnerResult norm =
        inner_run(ctx, fixed, 4.0, 0.125, 3, StepMode::normalized, ActiveRule::inclusive);
    CHECK(norm.last == fixed);
    CHECK(norm.averaged == fixed);
}

TEST_CASE("normalized step has length eta") {
    const Dataset data = canonical_dataset();
    const LossContext ctx = make_loss_context(data);
    const InnerResult res =
        inner_run(ctx, kZero2, 0.5, 0.125, 1, StepMode::normalized, ActiveRule::inclusive);
    const double nw = std::sqrt(res.last[0] * res.last[0] + res.last[1] * res.last[1]);
    CHECK(nw == doctest::Approx(0.125).epsilon(1e-14));
    // Direction is the negative subgradient -(2.5, 2.5) normalized.
    CHECK(res.last[0] == doctest::Approx(0.125 / std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("inner_run validation") {
    const Dataset data = canonical_dataset();
    const LossContext ctx = make_loss_context(data);
    CHECK_THROWS_AS(inner_run(ctx, kZero2, 0.0, 0.1, 1, StepMode::plain, ActiveRule::inclusive),
                    std::invalid_argument);
    CHECK_THROWS_AS(inner_run(ctx, kZero2, 0.5, 0.0, 1, StepMode::plain, ActiveRule::inclusive),
                    std::invalid_argument);
    CHECK_THROWS_AS(inner_run(ctx, kZero2, 2.0, 0.5, 1, StepMode::plain, ActiveRule::inclusive),
                    std::invalid_argument);
    CHECK_THROWS_AS(inner_run(ctx, kZero2, 0.5, 0.125, 0, StepMode::plain, ActiveRule::inclusive),
                    std::invalid_argument);
    CHECK_THROWS_AS(inner_run(ctx, std::vector<double>{0.0}, 0.5, 0.125, 1, StepMode::plain,
                              ActiveRule::inclusive),
                    std::invalid_argument);
}

TEST_CASE("staged solve records one checkpoint per stage") {
    const Dataset data = canonical_dataset();
    const LossContext ctx = make_loss_context(data);
    SolverConfig config;
    config.plan = make_plan(0.5, 2.0, 10);
    config.stages = 3;
    const SolveTrace trace = homotopic_solve(ctx, config);
    REQUIRE(trace.checkpoints.size() == 3);
    const long long expected_k[3] = {100, 221, 365};
    KernelScratch scratch;
    for (int s = 0; s < 3; ++s) {
        const Checkpoint& cp = trace.checkpoints[s];
        const StageParams sp = stage(config.plan, s);
        CHECK(cp.stage == s);
        CHECK(cp.k == expected_k[s]);
        CHECK(cp.lambda == sp.lambda);
        CHECK(cp.eta == sp.eta);
        CHECK(cp.t == sp.t);
        CHECK(cp.loss == regularized_loss(ctx, cp.iterate, cp.lambda, scratch));
        CHECK(!cp.bias.has_value());
    }
    CHECK(trace.final_w == trace.checkpoints.back().iterate);
}

TEST_CASE("budget and stage counts resolve to the same run") {
    const Dataset data = canonical_dataset();
    const LossContext ctx = make_loss_context(data);
    SolverConfig by_stages;
    by_stages.plan = make_plan(0.5, 2.0, 10);
    by_stages.stages = 3;
    SolverConfig by_budget = by_stages;
    by_budget.stages = 0;
    by_budget.budget = 400;  // enough for three stages (365), not four
    const SolveTrace a = homotopic_solve(ctx, by_stages);
    const SolveTrace b = homotopic_solve(ctx, by_budget);
    CHECK(a.final_w == b.final_w);
    CHECK(b.checkpoints.size() == 3);
}

TEST_CASE("solver config validation") {
    const Dataset data = canonical_dataset();
    const LossContext ctx = make_loss_context(data);
    SolverConfig config;
    config.plan = make_plan(0.5, 2.0, 10);
    CHECK_THROWS_AS(homotopic_solve(ctx, config), std::invalid_argument);
    config.stages = 2;
    config.budget = 300;
    CHECK_THROWS_AS(homotopic_solve(ctx, config), std::invalid_argument);
}

TEST_CASE("last-stage-only checkpointing keeps the same trajectory") {
    const Dataset data = canonical_dataset();
    const LossContext ctx = make_loss_context(data);
    SolverConfig config;
    config.plan = make_plan(0.5, 2.0, 10);
    config.stages = 4;
    const SolveTrace full = homotopic_solve(ctx, config);
    config.checkpoint_every_stage = false;
    const SolveTrace tail = homotopic_solve(ctx, config);
    REQUIRE(tail.checkpoints.size() == 1);
    CHECK(tail.checkpoints[0].stage == 3);
    CHECK(tail.checkpoints[0].k == full.checkpoints[3].k);
    CHECK(tail.final_w == full.final_w);
}

TEST_CASE("iterates respect the norm bound stage by stage") {
    const Dataset data = canonical_dataset();
    const LossContext ctx = make_loss_context(data);
    SolverConfig config;
    config.plan = make_plan(0.5, 2.0, 10);
    config.budget = 5000;
    const SolveTrace trace = homotopic_solve(ctx, config);
    for (const Checkpoint& cp : trace.checkpoints) {
        CHECK(cp.max_iterate_norm <= iterate_norm_bound(ctx, cp.lambda) * (1.0 + 1e-12));
        double nw = 0.0;
        for (double v : cp.iterate) nw += v * v;
        CHECK(std::sqrt(nw) <= cp.max_iterate_norm * (1.0 + 1e-12));
    }
}

TEST_CASE("staged solve approaches the hard-margin direction") {
    const Dataset data = canonical_dataset();
    const LossContext ctx = make_loss_context(data);
    SolverConfig config;
    config.plan = make_plan(0.5, 2.0, 10);
    config.budget = 20000;
    const SolveTrace trace = homotopic_solve(ctx, config);
    const std::vector<double> wstar = {0.5, 0.5};
    const double first = l2_error(trace.checkpoints.front().iterate, wstar);
    const double last = l2_error(trace.checkpoints.back().iterate, wstar);
    CHECK(last < first);
    CHECK(last < 0.2);
}

TEST_CASE("best-iterate rule produces a valid trace") {
    const Dataset data = canonical_dataset();
    const LossContext ctx = make_loss_context(data);
    SolverConfig config;
    config.plan = make_plan(0.5, 2.0, 10);
    config.stages = 3;
    config.update_rule = UpdateRule::best_iterate;
    const SolveTrace trace = homotopic_solve(ctx, config);
    REQUIRE(trace.checkpoints.size() == 3);
    for (const Checkpoint& cp : trace.checkpoints) {
        CHECK(std::isfinite(cp.loss));
        CHECK(cp.loss > 0.0);
    }
}

TEST_CASE("repeat runs are bit-identical across execution policies") {
    // Big enough to clear the parallel cutoff; the blocked reductions make
    // the OpenMP path agree with the serial one exactly, and the solver on
    // top of them inherits that.
    const Dataset data = random_separable(41, 20001, 3, 1.0);
    const LossContext serial = make_loss_context(data, ExecPolicy::serial);
    const LossContext parallel = make_loss_context(data, ExecPolicy::parallel);
    SolverConfig config;
    config.plan = make_plan(0.5, 2.0, 10);
    config.stages = 2;
    const SolveTrace a = homotopic_solve(serial, config);
    const SolveTrace b = homotopic_solve(parallel, config);
    const SolveTrace c = homotopic_solve(parallel, config);
    CHECK(a.final_w == b.final_w);
    CHECK(b.final_w == c.final_w);
    CHECK(a.checkpoints[0].loss == b.checkpoints[0].loss);
}

TEST_CASE("bias recovery") {
    const Dataset data = canonical_dataset();
    const LossContext ctx = make_loss_context(data);
    // The canonical set is symmetric, so the recovered intercept at the
    // separator is exactly zero.
    CHECK(estimate_bias(ctx, std::vector<double>{0.5, 0.5}) == 0.0);

    // An asymmetric set: class extremes 2 and 1 give intercept -1.5.
    const Dataset shifted = make_dataset({{2.0}, {1.0}}, {1.0, -1.0});
    const LossContext sctx = make_loss_context(shifted);
    CHECK(estimate_bias(sctx, std::vector<double>{1.0}) == -1.5);

    const Dataset onesided = make_dataset({{1.0}}, {1.0});
    const LossContext octx = make_loss_context(onesided);
    CHECK_THROWS_AS(estimate_bias(octx, std::vector<double>{1.0}), std::invalid_argument);
    CHECK_THROWS_AS(estimate_bias(ctx, std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("bias lands in a checkpoint when requested") {
    const Dataset data = canonical_dataset();
    const LossContext ctx = make_loss_context(data);
    SolverConfig config;
    config.plan = make_plan(0.5, 2.0, 10);
    config.stages = 2;
    config.with_bias = true;
    const SolveTrace trace = homotopic_solve(ctx, config);
    for (const Checkpoint& cp : trace.checkpoints) {
        REQUIRE(cp.bias.has_value());
        CHECK(*cp.bias == estimate_bias(ctx, cp.iterate));
    }
}

TEST_CASE("largest singular value by power iteration") {
    // X^T X of the canonical set is [[150, 90], [90, 150]] with top
    // eigenvalue 240; the 4-point version scales down to [[5, 3], [3, 5]].
    const Dataset data = canonical_dataset();
    const LossContext ctx = make_loss_context(data);
    CHECK(sigma_max(ctx) == doctest::Approx(15.491933384829668).epsilon(1e-12));
    const Dataset four = canonical_dataset({});
    const LossContext fctx = make_loss_context(four);
    CHECK(sigma_max(fctx) == doctest::Approx(2.8284271247461903).epsilon(1e-12));

    const Dataset zero = make_dataset({{0.0}}, {1.0});
    const LossContext zctx = make_loss_context(zero);
    CHECK_THROWS_AS(sigma_max(zctx), std::invalid_argument);
    CHECK_THROWS_AS(sigma_max(ctx, 0.0), std::invalid_argument);
}

TEST_CASE("logistic descent trace") {
    const Dataset data = canonical_dataset();
    const LossContext ctx = make_loss_context(data);
    const std::vector<long long> ks = {1, 10, 100};
    const SolveTrace trace = logistic_gd(ctx, 100, ks);
    REQUIRE(trace.checkpoints.size() == 3);
    const double eta = 1.0 / sigma_max(ctx);
    double prev_loss = 1e300;
    for (std::size_t i = 0; i < ks.size(); ++i) {
        const Checkpoint& cp = trace.checkpoints[i];
        CHECK(cp.k == ks[i]);
        CHECK(cp.lambda == 0.0);
        CHECK(cp.eta == eta);
        CHECK(cp.loss == logistic_loss(ctx, cp.iterate));
        CHECK(cp.loss < prev_loss);
        prev_loss = cp.loss;
        double nw = 0.0;
        for (double v : cp.iterate) nw += v * v;
        CHECK(std::sqrt(nw) <= cp.max_iterate_norm * (1.0 + 1e-12));
    }
    CHECK(trace.final_w == trace.checkpoints.back().iterate);

    // The mean logistic loss at zero is log 2; one step already beats it.
    CHECK(trace.checkpoints[0].loss < 0.6931471805599453);

    // After a hundred steps the iterate separates the data.
    KernelScratch scratch;
    CHECK(min_margin(data, trace.final_w, ExecPolicy::serial, scratch) > 0.0);
}

TEST_CASE("logistic descent checkpoint validation") {
    const Dataset data = canonical_dataset();
    const LossContext ctx = make_loss_context(data);
    CHECK_THROWS_AS(logistic_gd(ctx, 0, std::vector<long long>{}), std::invalid_argument);
    CHECK_THROWS_AS(logistic_gd(ctx, 10, std::vector<long long>{0, 5}), std::invalid_argument);
    CHECK_THROWS_AS(logistic_gd(ctx, 10, std::vector<long long>{5, 11}), std::invalid_argument);
    CHECK_THROWS_AS(logistic_gd(ctx, 10, std::vector<long long>{5, 5}), std::invalid_argument);
    CHECK_THROWS_AS(logistic_gd(ctx, 10, std::vector<long long>{7, 3}), std::invalid_argument);

    const SolveTrace trace = logistic_gd(ctx, 25, std::vector<long long>{});
    REQUIRE(trace.checkpoints.size() == 1);
    CHECK(trace.checkpoints[0].k == 25);
}
