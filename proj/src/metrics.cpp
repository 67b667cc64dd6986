#include "homsvm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "homsvm/kernels.hpp"

namespace homsvm {

namespace {

double norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

}  // namespace

double l2_error(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("l2_error: dimension mismatch");
    double s = 0.0;
    for (std::size_t c = 0; c < a.size(); ++c) {
        double diff = a[c] - b[c];
        s += diff * diff;
    }
    return std::sqrt(s);
}

double angle_gap(std::span<const double> w, std::span<const double> w_star) {
    if (w.size() != w_star.size()) throw std::invalid_argument("angle_gap: dimension mismatch");
    double nw = norm(w);
    double ns = norm(w_star);
    if (nw == 0.0 || ns == 0.0)
        throw std::invalid_argument("angle_gap: undefined for a zero vector");
    double dot = 0.0;
    for (std::size_t c = 0; c < w.size(); ++c) dot += w[c] * w_star[c];
    return 1.0 - dot / (nw * ns);
}

double margin_gap(const Dataset& data, std::span<const double> w,
                  std::span<const double> w_star) {
    if (static_cast<int>(w.size()) != data.d || w.size() != w_star.size())
        throw std::invalid_argument("margin_gap: dimension mismatch");
    double nw = norm(w);
    double ns = norm(w_star);
    if (nw == 0.0 || ns == 0.0)
        throw std::invalid_argument("margin_gap: undefined for a zero vector");
    KernelScratch scratch;
    double mm = min_margin(data, w, ExecPolicy::serial, scratch);
    return 1.0 / ns - mm / nw;
}

BoundContext make_bound_context(double lipschitz_l, double lambda_prime,
                                const SchedulePlan& plan) {
    if (!(lipschitz_l > 0.0))
        throw std::invalid_argument("make_bound_context: lipschitz constant must be > 0");
    if (!(lambda_prime > 0.0))
        throw std::invalid_argument("make_bound_context: lambda_prime must be > 0");
    double qa = plan.alpha * (1.0 - plan.epsilon0) / (plan.r + 1.0);
    double qb = plan.p / (plan.r + 1.0);
    double rate_c = std::min(qa, qb);
    return BoundContext{lipschitz_l, lambda_prime, plan, rate_c, 1.0 / 6.0 - rate_c};
}

double convergence_bound(const BoundContext& bctx, long long k) {
    if (k < 1) throw std::invalid_argument("convergence_bound: k must be >= 1");
    const SchedulePlan& plan = bctx.plan;
    double base = (plan.r + 1.0) * static_cast<double>(k);
    double e1 = -plan.alpha * (1.0 - plan.epsilon0) / (plan.r + 1.0);
    double e2 = -plan.p / (plan.r + 1.0);
    double term1 = plan.big_c * bctx.lipschitz_l * std::pow(base, e1);
    double term2 = bctx.lipschitz_l / (2.0 * bctx.lambda_prime * bctx.lambda_prime) *
                   std::pow(base, e2);
    return term1 + term2;
}

double fit_rate(std::span<const long long> ks, std::span<const double> values, int window) {
    if (ks.size() != values.size()) throw std::invalid_argument("fit_rate: length mismatch");
    if (window < 3) throw std::invalid_argument("fit_rate: window must be >= 3");
    int count = std::min<std::size_t>(window, ks.size());
    if (count < 3) throw std::invalid_argument("fit_rate: need at least 3 points");
    std::size_t start = ks.size() - count;

    double mx = 0.0;
    double my = 0.0;
    for (int i = 0; i < count; ++i) {
        long long k = ks[start + i];
        double v = values[start + i];
        if (k < 1) throw std::runtime_error("fit_rate: k values must be >= 1");
        if (!(v > 0.0)) throw std::runtime_error("fit_rate: nonpositive value in fitting window");
        mx += std::log(static_cast<double>(k));
        my += std::log(v);
    }
    mx /= count;
    my /= count;
    double sxy = 0.0;
    double sxx = 0.0;
    for (int i = 0; i < count; ++i) {
        double dx = std::log(static_cast<double>(ks[start + i])) - mx;
        double dy = std::log(values[start + i]) - my;
        sxy += dx * dy;
        sxx += dx * dx;
    }
    if (sxx == 0.0) throw std::runtime_error("fit_rate: all k values in the window coincide");
    return sxy / sxx;
}

}  // namespace homsvm
