#pragma once

#include <span>

#include "homsvm/dataset.hpp"
#include "homsvm/schedule.hpp"

namespace homsvm {

// Euclidean distance between equal-length vectors.
double l2_error(std::span<const double> a, std::span<const double> b);

// 1 - cosine similarity, in [0, 2] up to rounding (not clamped, so the
// algebraic identity |w/|w| - w*/|w*||^2 == 2 * angle_gap survives intact).
// Throws on a zero vector: the gap is undefined there and callers are
// expected to skip zero iterates instead.
double angle_gap(std::span<const double> w, std::span<const double> w_star);

// 1/|w*| minus the worst normalized margin min_j y_j x_j.w / |w|.
// Nonnegative whenever w* is the true hard-margin solution.
double margin_gap(const Dataset& data, std::span<const double> w,
                  std::span<const double> w_star);

// Everything needed to evaluate the two-term convergence bound:
//   rate_c = min(alpha(1-epsilon0)/(r+1), p/(r+1))
//   delta  = 1/6 - rate_c
struct BoundContext {
    double lipschitz_l;
    double lambda_prime;
    SchedulePlan plan;
    double rate_c;
    double delta;
};

BoundContext make_bound_context(double lipschitz_l, double lambda_prime,
                                const SchedulePlan& plan);

// C*L*((r+1)k)^(-alpha(1-epsilon0)/(r+1)) + (L/(2*lambda_prime^2))*((r+1)k)^(-p/(r+1)),
// strictly decreasing in k. Requires k >= 1.
double convergence_bound(const BoundContext& bctx, long long k);

// Least-squares slope of log(value) against log(k) over the trailing
// `window` points (all points if fewer, but never fewer than 3). Values in
// the window must be strictly positive.
double fit_rate(std::span<const long long> ks, std::span<const double> values, int window);

}  // namespace homsvm
