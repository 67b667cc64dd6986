#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "homsvm/dataset.hpp"

namespace homsvm {

// Certificate-carrying exact solution. For the hard-margin problem `lambda`
// is empty and `duals` are the conic coefficients reconstructing w from the
// active rows. For the regularized problem `duals` are the hinge
// subgradient weights of the on-margin points, each in [0, 1].
struct OracleSolution {
    std::vector<double> w;
    std::vector<int> active_set;    // points with y_j x_j . w == 1 (within tolerance)
    std::vector<double> duals;      // one coefficient per active_set entry
    std::optional<double> lambda;
    double residual = 0.0;          // stationarity residual, should be ~1e-15 scale
};

// The oracles are exact but enumerate activation patterns, so they are
// capped at desk-check sizes. Exceeding a cap throws invalid_argument.
constexpr int kOracleMaxDim = 6;
constexpr int kHardMarginMaxN = 24;
constexpr int kRegularizedMaxN = 16;

// Minimum-norm w with y_j x_j . w >= 1 for all j. Enumerates candidate
// active subsets of size 1..d; each candidate is accepted only with a full
// KKT certificate (feasibility plus nonnegative duals reconstructing w).
// Throws runtime_error when no subset is feasible (data not separable).
OracleSolution exact_hard_margin(const Dataset& data);

// Exact minimizer of 0.5*lambda*|w|^2 + mean hinge loss. Construction
// precomputes everything lambda-independent about each candidate on-margin
// subset, so solve() stays cheap enough to call on dense lambda grids.
class RegularizedOracle {
  public:
    explicit RegularizedOracle(const Dataset& data);
    ~RegularizedOracle();
    RegularizedOracle(RegularizedOracle&&) noexcept;
    RegularizedOracle& operator=(RegularizedOracle&&) noexcept;
    RegularizedOracle(const RegularizedOracle&) = delete;
    RegularizedOracle& operator=(const RegularizedOracle&) = delete;

    OracleSolution solve(double lambda) const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// One-shot convenience wrapper; builds the workspace and solves once.
OracleSolution exact_regularized(const Dataset& data, double lambda);

// Largest lambda at which the regularized minimizer still coincides with
// the hard-margin solution, bracketed by doubling/halving from lambda = 1
// and then bisected until the bracket is narrower than tol.
double estimate_lambda_prime(const Dataset& data, double tol);

}  // namespace homsvm
