#include "homsvm/losses.hpp"

#include <stdexcept>

namespace homsvm {

LossContext make_loss_context(const Dataset& data, ExecPolicy policy) {
    KernelScratch scratch;
    double mean = norm_sum(data, policy, scratch) / data.n;
    // L = 2 * mean_norm must hold exactly, so derive one from the other
    return LossContext{data, mean, 2.0 * mean, policy};
}

double hinge(double u) { return u < 1.0 ? 1.0 - u : 0.0; }

double empirical_hinge(const LossContext& ctx, std::span<const double> w,
                       KernelScratch& scratch) {
    return hinge_sum(ctx.data, w, ctx.policy, scratch) / ctx.data.n;
}

double empirical_hinge(const LossContext& ctx, std::span<const double> w) {
    KernelScratch scratch;
    return empirical_hinge(ctx, w, scratch);
}

double regularized_loss(const LossContext& ctx, std::span<const double> w, double lambda,
                        KernelScratch& scratch) {
    if (!(lambda > 0.0)) throw std::invalid_argument("regularized_loss: lambda must be > 0");
    double nw2 = 0.0;
    for (double v : w) nw2 += v * v;
    return 0.5 * lambda * nw2 + hinge_sum(ctx.data, w, ctx.policy, scratch) / ctx.data.n;
}

double regularized_loss(const LossContext& ctx, std::span<const double> w, double lambda) {
    KernelScratch scratch;
    return regularized_loss(ctx, w, lambda, scratch);
}

std::vector<double> subgradient(const LossContext& ctx, std::span<const double> w,
                                double lambda, ActiveRule rule) {
    if (lambda < 0.0) throw std::invalid_argument("subgradient: lambda must be >= 0");
    KernelScratch scratch;
    std::vector<double> sum(ctx.data.d);
    active_sum(ctx.data, w, rule, ctx.policy, scratch, sum);
    std::vector<double> g(ctx.data.d);
    for (int c = 0; c < ctx.data.d; ++c) g[c] = lambda * w[c] - sum[c] / ctx.data.n;
    return g;
}

double iterate_norm_bound(const LossContext& ctx, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("iterate_norm_bound: lambda must be > 0");
    return ctx.mean_norm / lambda;
}

double logistic_loss(const LossContext& ctx, std::span<const double> w) {
    KernelScratch scratch;
    std::vector<double> gradsum(ctx.data.d);
    return logistic_sums(ctx.data, w, ctx.policy, scratch, gradsum) / ctx.data.n;
}

std::vector<double> logistic_gradient(const LossContext& ctx, std::span<const double> w) {
    KernelScratch scratch;
    std::vector<double> gradsum(ctx.data.d);
    logistic_sums(ctx.data, w, ctx.policy, scratch, gradsum);
    std::vector<double> g(ctx.data.d);
    for (int c = 0; c < ctx.data.d; ++c) g[c] = -gradsum[c] / ctx.data.n;
    return g;
}

}  // namespace homsvm
