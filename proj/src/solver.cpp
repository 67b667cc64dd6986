#include "homsvm/solver.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace homsvm {

namespace {

double norm2(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

}  // namespace

InnerResult inner_run(const LossContext& ctx, std::span<const double> w0, double lambda,
                      double eta, long long t, StepMode mode, ActiveRule rule) {
    if (!(lambda > 0.0)) throw std::invalid_argument("inner_run: lambda must be > 0");
    if (!(eta > 0.0)) throw std::invalid_argument("inner_run: eta must be > 0");
    if (!(eta * lambda < 1.0))
        throw std::invalid_argument("inner_run: eta*lambda must be < 1");
    if (t < 1) throw std::invalid_argument("inner_run: t must be >= 1");
    const int d = ctx.data.d;
    const int n = ctx.data.n;
    if (static_cast<int>(w0.size()) != d)
        throw std::invalid_argument("inner_run: seed dimension mismatch");

    KernelScratch scratch;
    std::vector<double> w(w0.begin(), w0.end());
    std::vector<double> sum(d);
    std::vector<double> avg(d, 0.0);
    std::vector<double> grad(mode == StepMode::normalized ? d : 0);

    InnerResult res;
    res.best_loss = std::numeric_limits<double>::infinity();
    res.max_iterate_norm = norm2(w);

    const double a = 1.0 - lambda * eta;
    const double b = eta / n;
    for (long long i = 1; i <= t; ++i) {
        active_sum(ctx.data, w, rule, ctx.policy, scratch, sum);
        if (mode == StepMode::plain) {
            for (int c = 0; c < d; ++c) w[c] = a * w[c] + b * sum[c];
        } else {
            double g2 = 0.0;
            for (int c = 0; c < d; ++c) {
                grad[c] = lambda * w[c] - sum[c] / n;
                g2 += grad[c] * grad[c];
            }
            if (g2 > 0.0) {
                const double step = eta / std::sqrt(g2);
                for (int c = 0; c < d; ++c) w[c] -= step * grad[c];
            }
        }
        for (int c = 0; c < d; ++c) avg[c] += w[c];
        const double nw = norm2(w);
        if (nw > res.max_iterate_norm) res.max_iterate_norm = nw;
        const double f = regularized_loss(ctx, w, lambda, scratch);
        if (f < res.best_loss) {
            res.best_loss = f;
            res.best = w;
        }
    }
    for (int c = 0; c < d; ++c) avg[c] /= static_cast<double>(t);
    res.averaged = std::move(avg);
    res.last = std::move(w);
    return res;
}

SolveTrace homotopic_solve(const LossContext& ctx, const SolverConfig& config) {
    const bool has_stages = config.stages > 0;
    const bool has_budget = config.budget > 0;
    if (has_stages == has_budget)
        throw std::invalid_argument(
            "homotopic_solve: set exactly one of stages or budget");
    const int total_stages =
        has_stages ? config.stages : budget_to_stages(config.plan, config.budget).stages;

    const int d = ctx.data.d;
    std::vector<double> seed(d, 0.0);
    SolveTrace trace;
    KernelScratch scratch;
    long long k = 0;
    for (int s = 0; s < total_stages; ++s) {
        const StageParams sp = stage(config.plan, s);
        const InnerResult res =
            inner_run(ctx, seed, sp.lambda, sp.eta, sp.t, config.step_mode,
                      config.active_rule);
        k += sp.t;
        const std::vector<double>& out =
            config.update_rule == UpdateRule::averaged ? res.averaged : res.best;
        if (config.checkpoint_every_stage || s == total_stages - 1) {
            Checkpoint cp;
            cp.stage = s;
            cp.k = k;
            cp.lambda = sp.lambda;
            cp.eta = sp.eta;
            cp.t = sp.t;
            cp.iterate = out;
            cp.loss = regularized_loss(ctx, out, sp.lambda, scratch);
            cp.max_iterate_norm = res.max_iterate_norm;
            if (config.with_bias) cp.bias = estimate_bias(ctx, out);
            trace.checkpoints.push_back(std::move(cp));
        }
        seed = out;
    }
    trace.final_w = std::move(seed);
    return trace;
}

double estimate_bias(const LossContext& ctx, std::span<const double> w) {
    if (static_cast<int>(w.size()) != ctx.data.d)
        throw std::invalid_argument("estimate_bias: dimension mismatch");
    const ClassExtremes ex = class_extremes(ctx.data, w);
    if (!ex.has_pos || !ex.has_neg)
        throw std::invalid_argument("estimate_bias: dataset must contain both classes");
    return -(ex.min_pos + ex.max_neg) / 2.0;
}

double sigma_max(const LossContext& ctx, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("sigma_max: tol must be > 0");
    bool any_nonzero = false;
    for (double v : ctx.data.xs)
        if (v != 0.0) {
            any_nonzero = true;
            break;
        }
    if (!any_nonzero)
        throw std::invalid_argument("sigma_max: dataset is identically zero");

    const int d = ctx.data.d;
    KernelScratch scratch;
    std::vector<double> v(d);
    std::vector<double> av(d);
    // All-ones start with a tiny ascending ramp: symmetric datasets often
    // have eigenvectors exactly orthogonal to plain all-ones, and the ramp
    // breaks that without affecting converged accuracy.
    for (int c = 0; c < d; ++c) v[c] = 1.0 + (c + 1) * 0x1p-20;
    const double nv0 = norm2(v);
    for (int c = 0; c < d; ++c) v[c] /= nv0;

    double rho_prev = 0.0;
    constexpr int kMaxRounds = 100000;
    for (int round = 0; round < kMaxRounds; ++round) {
        gram_matvec(ctx.data, v, ctx.policy, scratch, av);
        double rho = 0.0;
        for (int c = 0; c < d; ++c) rho += v[c] * av[c];
        if (round > 0 && std::abs(rho - rho_prev) <= tol * rho) return std::sqrt(rho);
        rho_prev = rho;
        const double na = norm2(av);
        if (na == 0.0)
            throw std::runtime_error("sigma_max: power iteration collapsed to zero");
        for (int c = 0; c < d; ++c) v[c] = av[c] / na;
    }
    throw std::runtime_error(
        "sigma_max: power iteration did not converge within 100000 rounds");
}

SolveTrace logistic_gd(const LossContext& ctx, long long iterations,
                       std::span<const long long> checkpoint_ks) {
    if (iterations < 1)
        throw std::invalid_argument("logistic_gd: iterations must be >= 1");
    std::vector<long long> ks(checkpoint_ks.begin(), checkpoint_ks.end());
    if (ks.empty()) ks.push_back(iterations);
    for (std::size_t i = 0; i < ks.size(); ++i) {
        if (ks[i] < 1 || ks[i] > iterations)
            throw std::invalid_argument("logistic_gd: checkpoint out of [1, iterations]");
        if (i > 0 && ks[i] <= ks[i - 1])
            throw std::invalid_argument("logistic_gd: checkpoints must be strictly increasing");
    }

    const int d = ctx.data.d;
    const int n = ctx.data.n;
    const double eta = 1.0 / sigma_max(ctx);
    KernelScratch scratch;
    std::vector<double> w(d, 0.0);
    std::vector<double> gradsum(d);

    SolveTrace trace;
    std::size_t next = 0;
    long long prev_k = 0;
    double seg_max_norm = 0.0;  // w starts at zero
    for (long long i = 1; i <= iterations; ++i) {
        logistic_sums(ctx.data, w, ctx.policy, scratch, gradsum);
        for (int c = 0; c < d; ++c) w[c] += eta * (gradsum[c] / n);
        const double nw = norm2(w);
        if (nw > seg_max_norm) seg_max_norm = nw;
        if (next < ks.size() && i == ks[next]) {
            Checkpoint cp;
            cp.stage = static_cast<int>(next);
            cp.k = i;
            cp.lambda = 0.0;
            cp.eta = eta;
            cp.t = i - prev_k;
            cp.iterate = w;
            cp.loss = logistic_sums(ctx.data, w, ctx.policy, scratch, gradsum) / n;
            cp.max_iterate_norm = seg_max_norm;
            trace.checkpoints.push_back(std::move(cp));
            prev_k = i;
            seg_max_norm = nw;
            ++next;
        }
    }
    trace.final_w = std::move(w);
    return trace;
}

}  // namespace homsvm
