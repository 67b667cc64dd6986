#include "homsvm/schedule.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace homsvm {

SchedulePlan make_plan(double p, double r, int s0) {
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("make_plan: p must satisfy 0 < p < 1");
    if (!(r > 2.0 * p)) throw std::invalid_argument("make_plan: r must satisfy r > 2p");
    if (s0 <= 2) throw std::invalid_argument("make_plan: s0 must be an integer > 2");
    const double ds0 = s0;
    double epsilon0 = (std::log(ds0) - std::log(ds0 - 1.0)) / std::log(ds0);
    double alpha = std::min((r - 2.0 * p) / (2.0 * (1.0 + epsilon0)), 1.0 - p);
    double lambda0 = std::pow(ds0, -p);
    double big_c = std::max(4.0, 0.5 * std::pow(ds0 - 1.0, alpha) / lambda0);
    return SchedulePlan{p, r, s0, epsilon0, alpha, big_c};
}

StageParams stage(const SchedulePlan& plan, int s) {
    if (s < 0) throw std::invalid_argument("stage: s must be >= 0");
    const double base = static_cast<double>(plan.s0) + s;
    double lambda = std::pow(base, -plan.p);
    double raw_t = std::nearbyint(std::pow(base, plan.r));
    if (!(raw_t <= 4.0e18))
        throw std::overflow_error("stage: t_s = round((s0+s)^r) overflows the update counter");
    auto t = static_cast<long long>(raw_t);
    double eta = plan.big_c * std::pow(base - 1.0, -plan.alpha) / std::sqrt(static_cast<double>(t));
    return StageParams{s, lambda, t, eta};
}

double stage_radius(const SchedulePlan& plan, int s, double lipschitz_l) {
    if (s < 0) throw std::invalid_argument("stage_radius: s must be >= 0");
    if (!(lipschitz_l > 0.0))
        throw std::invalid_argument("stage_radius: lipschitz constant must be > 0");
    const double base = static_cast<double>(plan.s0) + s;
    return plan.big_c * lipschitz_l * std::pow(base - 1.0, -plan.alpha);
}

StageBudget budget_to_stages(const SchedulePlan& plan, long long budget) {
    long long t0 = stage(plan, 0).t;
    if (budget < t0)
        throw std::invalid_argument("budget_to_stages: budget " + std::to_string(budget) +
                                    " is below the first stage's update count " +
                                    std::to_string(t0));
    int stages = 0;
    long long cum = 0;
    while (true) {
        long long t = stage(plan, stages).t;
        if (cum + t > budget) break;
        cum += t;
        ++stages;
    }
    return StageBudget{stages, cum};
}

}  // namespace homsvm
