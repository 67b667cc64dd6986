#pragma once

#include <span>
#include <vector>

#include "homsvm/dataset.hpp"
#include "homsvm/kernels.hpp"

namespace homsvm {

// Bundles a dataset with the norm statistics every bound in this codebase
// depends on. mean_norm is (1/n) sum of point norms; lipschitz_L is exactly
// twice that and bounds the subgradient norm on the ball of radius
// iterate_norm_bound(ctx, lambda).
struct LossContext {
    const Dataset& data;
    double mean_norm;
    double lipschitz_L;
    ExecPolicy policy;
};

LossContext make_loss_context(const Dataset& data, ExecPolicy policy = ExecPolicy::parallel);

// max(0, 1 - u)
double hinge(double u);

// Mean hinge loss over the dataset. The scratch overload is for hot loops.
double empirical_hinge(const LossContext& ctx, std::span<const double> w);
double empirical_hinge(const LossContext& ctx, std::span<const double> w,
                       KernelScratch& scratch);

// 0.5 * lambda * |w|^2 + mean hinge loss. Throws for lambda <= 0.
double regularized_loss(const LossContext& ctx, std::span<const double> w, double lambda);
double regularized_loss(const LossContext& ctx, std::span<const double> w, double lambda,
                        KernelScratch& scratch);

// g[c] = lambda * w[c] - active_sum[c] / n. lambda = 0 gives the plain hinge
// subgradient; lambda < 0 throws. Default rule is inclusive, which is what
// the solver update uses.
std::vector<double> subgradient(const LossContext& ctx, std::span<const double> w,
                                double lambda, ActiveRule rule = ActiveRule::inclusive);

// mean_norm / lambda: all iterates of the subgradient update started at 0
// stay inside this ball. Throws for lambda <= 0.
double iterate_norm_bound(const LossContext& ctx, double lambda);

// Mean of log(1 + exp(-margin_j)) and its exact gradient
// (-1/n) sum of sigmoid(-margin_j) * y_j * x_j.
double logistic_loss(const LossContext& ctx, std::span<const double> w);
std::vector<double> logistic_gradient(const LossContext& ctx, std::span<const double> w);

}  // namespace homsvm
