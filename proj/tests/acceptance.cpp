// Acceptance suite for the staged subgradient solver. Each numbered check
// prints exactly one PASS/FAIL line; the process exits nonzero if any check
// fails. Tolerances are pinned here, next to the checks that use them.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "homsvm/dataset.hpp"
#include "homsvm/losses.hpp"
#include "homsvm/metrics.hpp"
#include "homsvm/oracle.hpp"
#include "homsvm/rng.hpp"
#include "homsvm/schedule.hpp"
#include "homsvm/solver.hpp"
#include "homsvm/trace_io.hpp"

using namespace homsvm;

namespace {

// Reproducibility pin for the long s0 = 10 run (check 5): the final L2 error
// of the first recorded run of this exact configuration (135 stages, plain
// averaged updates, inclusive active rule). Replace with NaN to re-record.
constexpr double kGoldenFinalError = 0.00033827052584024737;
constexpr double kGoldenTol = 1e-10;

int g_failures = 0;
int g_index = 0;

void report(const char* name, bool ok, const std::string& detail) {
    ++g_index;
    std::printf("%s %2d %s%s%s\n", ok ? "PASS" : "FAIL", g_index, name,
                detail.empty() ? "" : ": ", detail.c_str());
    if (!ok) ++g_failures;
}

void run_check(const char* name, const std::function<std::pair<bool, std::string>()>& fn) {
    try {
        const auto [ok, detail] = fn();
        report(name, ok, detail);
    } catch (const std::exception& e) {
        report(name, false, std::string("exception: ") + e.what());
    }
}

double norm2(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

}  // namespace

int main() {
    const Dataset data = canonical_dataset();
    const LossContext ctx = make_loss_context(data);
    const double big_l = ctx.lipschitz_L;
    const double max_norm = max_point_norm(data);
    const std::vector<double> wstar = {0.5, 0.5};

    // Checks 3, 4, 5 and 7 share these four long runs: the s0 = 10 one is
    // pinned to 135 stages so its cumulative update count 1005435 clears 1e6,
    // the others get a 1e6 update budget directly.
    std::vector<SolveTrace> runs;
    std::vector<SchedulePlan> plans;
    for (int s0 : {3, 5, 10, 20}) {
        SolverConfig config;
        config.plan = make_plan(0.5, 2.0, s0);
        if (s0 == 10)
            config.stages = 135;
        else
            config.budget = 1000000;
        plans.push_back(config.plan);
        runs.push_back(homotopic_solve(ctx, config));
    }
    const SolveTrace& run10 = runs[2];

    run_check("hard-margin-exactness", [&] {
        const OracleSolution hard = exact_hard_margin(data);
        const double err = l2_error(hard.w, wstar);
        return std::make_pair(err <= 1e-9, "|w - (0.5, 0.5)| = " + format_g17(err));
    });

    run_check("cutoff-recovery", [&] {
        const double lam16 = estimate_lambda_prime(data, 1e-4);
        const double lam4 = estimate_lambda_prime(canonical_dataset({}), 1e-4);
        const bool ok = std::abs(lam16 - 0.5) <= 1e-3 && std::abs(lam4 - 2.0) <= 1e-3;
        return std::make_pair(ok, "16-point " + format_g17(lam16) + ", 4-point " +
                                      format_g17(lam4));
    });

    run_check("error-bound-dominance", [&] {
        // Every stage checkpoint must sit below the two-term bound, using
        // the known cutoff 0.5 of this dataset.
        bool ok = true;
        double worst = -1e300;
        int violations = 0;
        for (std::size_t i = 0; i < runs.size(); ++i) {
            const BoundContext bctx = make_bound_context(big_l, 0.5, plans[i]);
            for (const Checkpoint& cp : runs[i].checkpoints) {
                const double err = l2_error(cp.iterate, wstar);
                const double bound = convergence_bound(bctx, cp.k);
                worst = std::max(worst, err - bound);
                if (err > bound) {
                    ok = false;
                    ++violations;
                }
            }
        }
        return std::make_pair(ok, std::to_string(violations) +
                                      " violations, worst err - bound = " + format_g17(worst));
    });

    run_check("iterate-norm-bound", [&] {
        bool ok = true;
        double worst = -1e300;
        for (const SolveTrace& trace : runs)
            for (const Checkpoint& cp : trace.checkpoints) {
                const double bound = iterate_norm_bound(ctx, cp.lambda);
                worst = std::max(worst, cp.max_iterate_norm - bound);
                if (cp.max_iterate_norm > bound * (1.0 + 1e-12)) ok = false;
            }
        return std::make_pair(ok, "worst |w| - bound = " + format_g17(worst));
    });

    run_check("long-run-convergence", [&] {
        const double first = l2_error(run10.checkpoints.front().iterate, wstar);
        const double final_err = l2_error(run10.final_w, wstar);
        std::vector<long long> ks;
        std::vector<double> errs;
        for (const Checkpoint& cp : run10.checkpoints) {
            ks.push_back(cp.k);
            errs.push_back(l2_error(cp.iterate, wstar));
        }
        // Slope over the trailing decade of update counts.
        int window = 0;
        for (std::size_t i = 0; i < ks.size(); ++i)
            if (10 * ks[i] >= ks.back()) ++window;
        const double rate = fit_rate(ks, errs, window);
        const bool shrunk = final_err <= 0.1 * first;
        const bool fast = rate <= -0.10;
        const bool pinned = std::abs(final_err - kGoldenFinalError) <= kGoldenTol;
        std::string detail = "final = " + format_g17(final_err) + " (first " +
                             format_g17(first) + "), trailing rate = " + format_g17(rate);
        if (!pinned)
            detail += std::isnan(kGoldenFinalError)
                          ? ", golden value not frozen yet"
                          : ", golden mismatch vs " + format_g17(kGoldenFinalError);
        return std::make_pair(shrunk && fast && pinned, detail);
    });

    // The exact minimizer workspace is shared by checks 6 and 7.
    const RegularizedOracle oracle(data);

    run_check("minimizer-path-bounds", [&] {
        // Grid 0.05, 0.10, ..., 4.00; pairwise Lipschitz bound in 1/lambda
        // and the distance-to-limit bound with cutoff 0.5, 1e-9 slack each.
        std::vector<double> grid;
        std::vector<OracleSolution> sols;
        for (int i = 1; i <= 80; ++i) {
            grid.push_back(0.05 * i);
            sols.push_back(oracle.solve(grid.back()));
        }
        bool ok = true;
        double worst = -1e300;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            for (std::size_t j = i + 1; j < grid.size(); ++j) {
                const double dist = l2_error(sols[i].w, sols[j].w);
                const double bound =
                    0.5 * big_l * std::abs(1.0 / grid[i] - 1.0 / grid[j]) + 1e-9;
                worst = std::max(worst, dist - bound);
                if (dist > bound) ok = false;
            }
            const double to_limit = l2_error(sols[i].w, wstar);
            const double bound = big_l * grid[i] / (2.0 * 0.5 * 0.5) + 1e-9;
            worst = std::max(worst, to_limit - bound);
            if (to_limit > bound) ok = false;
        }
        return std::make_pair(ok, "worst dist - bound = " + format_g17(worst));
    });

    run_check("stage-proximity", [&] {
        // Each stage output of the s0 = 10 run stays within the shrinking
        // radius of that stage's exact minimizer.
        bool ok = true;
        double worst_ratio = 0.0;
        for (const Checkpoint& cp : run10.checkpoints) {
            const OracleSolution sol = oracle.solve(cp.lambda);
            const double err = l2_error(cp.iterate, sol.w);
            const double radius = stage_radius(plans[2], cp.stage, big_l);
            worst_ratio = std::max(worst_ratio, err / radius);
            if (err > radius * (1.0 + 1e-9)) ok = false;
        }
        return std::make_pair(ok, "worst err / radius = " + format_g17(worst_ratio));
    });

    run_check("gap-identities", [&] {
        Rng rng(42);
        const double ws_norm = norm2(wstar);
        bool ok = true;
        double worst = 0.0;
        for (int trial = 0; trial < 1000; ++trial) {
            std::vector<double> w(2);
            double nw = 0.0;
            do {
                nw = 0.0;
                for (double& c : w) {
                    c = rng.gaussian();
                    nw += c * c;
                }
            } while (nw < 1e-12);
            nw = std::sqrt(nw);
            const double ag = angle_gap(w, wstar);
            const std::vector<double> wh = {w[0] / nw, w[1] / nw};
            const std::vector<double> sh = {wstar[0] / ws_norm, wstar[1] / ws_norm};
            const double unit_dist = l2_error(wh, sh);
            const double id_err = std::abs(unit_dist * unit_dist - 2.0 * ag);

            const double full_dist = l2_error(w, wstar);
            const double angle_bound = full_dist * full_dist / (2.0 * nw * ws_norm);
            const double mg = margin_gap(data, w, wstar);
            const double margin_bound = max_norm * std::sqrt(std::max(0.0, 2.0 * ag));

            worst = std::max({worst, id_err, ag - angle_bound, mg - margin_bound});
            if (id_err > 1e-12 || ag > angle_bound + 1e-12 || mg > margin_bound + 1e-12)
                ok = false;
        }
        return std::make_pair(ok, "1000 trials, worst slack = " + format_g17(worst));
    });

    run_check("baseline-ordering", [&] {
        // Both methods get the same update count near 1e5; the staged solver
        // is required to close both direction gaps strictly further than
        // plain logistic descent. On this dataset the requirement cannot
        // hold: the point set is symmetric under swapping the two
        // coordinates, both methods start at zero and preserve that
        // symmetry, so every iterate of either method lies exactly on the
        // diagonal and both direction gaps are identically zero at every k.
        // The strict comparison below therefore ties at machine epsilon and
        // this check is expected to fail; on any asymmetric dataset (for
        // example after `--scale-axis 1 --scale-factor 20`) the staged
        // solver does win both gaps by several orders of magnitude.
        SolverConfig config;
        config.plan = plans[2];
        config.budget = 100000;
        const SolveTrace hom = homotopic_solve(ctx, config);
        const long long k = hom.checkpoints.back().k;
        const std::vector<long long> ks = {k};
        const SolveTrace log = logistic_gd(ctx, k, ks);
        const double ha = angle_gap(hom.final_w, wstar);
        const double hm = margin_gap(data, hom.final_w, wstar);
        const double la = angle_gap(log.final_w, wstar);
        const double lm = margin_gap(data, log.final_w, wstar);
        const bool ok = ha < la && hm < lm;
        std::string detail = "k = " + std::to_string(k) + ", angle " + format_g17(ha) +
                             " vs " + format_g17(la) + ", margin " + format_g17(hm) + " vs " +
                             format_g17(lm);
        if (!ok && ha <= 1e-12 && la <= 1e-12)
            detail += " (symmetric dataset, both methods exact: strict ordering unattainable)";
        return std::make_pair(ok, detail);
    });

    run_check("best-iterate-rule", [&] {
        SolverConfig config;
        config.plan = plans[2];
        config.budget = 100000;
        const SolveTrace avg = homotopic_solve(ctx, config);
        config.update_rule = UpdateRule::best_iterate;
        const SolveTrace best = homotopic_solve(ctx, config);
        const double avg_err = l2_error(avg.final_w, wstar);
        const double best_err = l2_error(best.final_w, wstar);
        return std::make_pair(best_err <= avg_err, "best " + format_g17(best_err) +
                                                       " vs averaged " + format_g17(avg_err));
    });

    run_check("bias-stability", [&] {
        // b* is exactly 0 by the symmetry of the dataset; perturbations move
        // the recovered intercept at most max_j |x_j| times the shift.
        Rng rng(43);
        const double bias_star = estimate_bias(ctx, wstar);
        bool ok = true;
        double worst = -1e300;
        if (bias_star != 0.0) ok = false;
        for (int trial = 0; trial < 100; ++trial) {
            const std::vector<double> w = {wstar[0] + 0.1 * rng.gaussian(),
                                           wstar[1] + 0.1 * rng.gaussian()};
            const double lhs = std::abs(estimate_bias(ctx, w) - bias_star);
            const double rhs = max_norm * l2_error(w, wstar) * (1.0 + 1e-12) + 1e-15;
            worst = std::max(worst, lhs - rhs);
            if (lhs > rhs) ok = false;
        }
        return std::make_pair(ok, "worst |bias shift| - bound = " + format_g17(worst));
    });

    run_check("logistic-gradient-check", [&] {
        Rng rng(44);
        const double h = 1e-5;
        double worst = 0.0;
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<double> w = {rng.gaussian(), rng.gaussian()};
            const std::vector<double> g = logistic_gradient(ctx, w);
            for (int c = 0; c < 2; ++c) {
                std::vector<double> wp = w, wm = w;
                wp[c] += h;
                wm[c] -= h;
                const double fd =
                    (logistic_loss(ctx, wp) - logistic_loss(ctx, wm)) / (2.0 * h);
                worst = std::max(worst, std::abs(fd - g[c]));
            }
        }
        return std::make_pair(worst <= 1e-6, "max |fd - grad| = " + format_g17(worst));
    });

    std::printf("%d/%d checks passed\n", g_index - g_failures, g_index);
    return g_failures == 0 ? 0 : 1;
}
