#include "homsvm/oracle.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace homsvm {

namespace {

// Margin-equality band: |y x . w - 1| inside it counts as "on the margin".
// Patterns that would classify an off-pattern point inside the band are
// rejected as ambiguous; the pattern with that point moved onto the margin
// is enumerated separately and wins instead.
constexpr double kOnTol = 1e-10;
// Slack on dual sign/box constraints, absorbing pinv rounding.
constexpr double kDualTol = 1e-12;
// Relative singular-value cutoff when deciding the rank of a row subset.
constexpr double kRankTol = 1e-9;
// Hard-margin feasibility slack: margins may undershoot 1 by this much.
constexpr double kFeasTol = 1e-10;
// Certificate acceptance: stationarity residual per unit of (1 + |w|).
constexpr double kResidTol = 1e-9;

std::string fmt_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Rows y_j x_j of the dataset; every oracle condition is linear in these.
Eigen::MatrixXd margin_rows(const Dataset& data) {
    Eigen::MatrixXd m(data.n, data.d);
    for (int j = 0; j < data.n; ++j) {
        const double* xj = data.x(j);
        for (int c = 0; c < data.d; ++c) m(j, c) = data.ys[j] * xj[c];
    }
    return m;
}

struct SubsetSolve {
    int rank = 0;
    Eigen::VectorXd w;       // min-norm solution of rows * w = 1
    bool consistent = false;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd;
};

// Min-norm least-squares solve of (rows * w = 1) with rank decided by the
// singular-value cutoff. `consistent` records whether the equalities are
// actually attainable, not just approximated.
SubsetSolve solve_subset(const Eigen::MatrixXd& rows) {
    SubsetSolve out;
    out.svd.compute(rows, Eigen::ComputeThinU | Eigen::ComputeFullV);
    const Eigen::VectorXd& sv = out.svd.singularValues();
    const double smax = sv.size() > 0 ? sv(0) : 0.0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > kRankTol * smax) ++out.rank;
    if (out.rank == 0) {
        out.w = Eigen::VectorXd::Zero(rows.cols());
        out.consistent = false;
        return out;
    }
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(rows.rows());
    const Eigen::VectorXd coef =
        (out.svd.matrixU().leftCols(out.rank).transpose() * ones).array() /
        sv.head(out.rank).array();
    out.w = out.svd.matrixV().leftCols(out.rank) * coef;
    out.consistent = ((rows * out.w).array() - 1.0).abs().maxCoeff() <= kOnTol;
    return out;
}

// pinv(rows^T) as a (rows.rows() x d) matrix, from the subset SVD. Maps a
// d-vector target to the min-norm coefficient vector beta with
// rows^T beta = target (projected onto the attainable range).
Eigen::MatrixXd pinv_transpose(const SubsetSolve& ss) {
    const Eigen::VectorXd& sv = ss.svd.singularValues();
    return ss.svd.matrixU().leftCols(ss.rank) *
           sv.head(ss.rank).cwiseInverse().asDiagonal() *
           ss.svd.matrixV().leftCols(ss.rank).transpose();
}

// Canonical tie-break key over activation patterns: one trit per point,
// inside = 0, on-margin = 1, outside = 2, point 0 most significant. The
// minimizer of a strictly convex objective is unique, so competing
// patterns certify the same w; the smallest key is just a deterministic
// choice of certificate.
std::uint64_t pattern_key(int n, std::uint32_t omask, std::uint32_t imask) {
    std::uint64_t key = 0;
    for (int j = 0; j < n; ++j) {
        const std::uint32_t bit = 1u << j;
        const std::uint64_t trit = (omask & bit) ? 1 : ((imask & bit) ? 0 : 2);
        key = (key << 2) | trit;
    }
    return key;
}

}  // namespace

OracleSolution exact_hard_margin(const Dataset& data) {
    if (data.n > kHardMarginMaxN || data.d > kOracleMaxDim)
        throw std::invalid_argument(
            "exact_hard_margin: dataset exceeds enumeration cap (n <= 24, d <= 6)");
    const int n = data.n;
    const int d = data.d;
    const Eigen::MatrixXd m = margin_rows(data);

    Eigen::VectorXd best_w;
    Eigen::VectorXd best_beta;
    std::vector<int> best_subset;
    double best_norm = std::numeric_limits<double>::infinity();

    std::vector<int> idx;
    for (int size = 1; size <= std::min(d, n); ++size) {
        idx.resize(size);
        std::iota(idx.begin(), idx.end(), 0);
        while (true) {
            Eigen::MatrixXd rows(size, d);
            for (int i = 0; i < size; ++i) rows.row(i) = m.row(idx[i]);
            SubsetSolve ss = solve_subset(rows);
            if (ss.consistent) {
                const Eigen::VectorXd marg = m * ss.w;
                if (marg.minCoeff() >= 1.0 - kFeasTol) {
                    // KKT: w must be a nonnegative combination of its active rows.
                    const Eigen::VectorXd beta = pinv_transpose(ss) * ss.w;
                    const double wn = ss.w.norm();
                    if (beta.minCoeff() >= -kDualTol &&
                        (rows.transpose() * beta - ss.w).norm() <= kResidTol * (1.0 + wn) &&
                        wn < best_norm * (1.0 - 1e-12)) {
                        best_norm = wn;
                        best_w = ss.w;
                        best_beta = beta;
                        best_subset = idx;
                    }
                }
            }
            // next subset in lexicographic order
            int pos = size - 1;
            while (pos >= 0 && idx[pos] == n - size + pos) --pos;
            if (pos < 0) break;
            ++idx[pos];
            for (int q = pos + 1; q < size; ++q) idx[q] = idx[q - 1] + 1;
        }
    }

    if (!std::isfinite(best_norm))
        throw std::runtime_error(
            "exact_hard_margin: no feasible active set found; "
            "dataset may not be linearly separable");

    OracleSolution sol;
    sol.w.assign(best_w.data(), best_w.data() + d);
    // Report the complete on-margin set; rows outside the certifying subset
    // carry zero dual weight.
    const Eigen::VectorXd marg = m * best_w;
    for (int j = 0; j < n; ++j) {
        if (std::abs(marg(j) - 1.0) <= kResidTol) {
            sol.active_set.push_back(j);
            const auto it = std::find(best_subset.begin(), best_subset.end(), j);
            sol.duals.push_back(it == best_subset.end()
                                    ? 0.0
                                    : best_beta(it - best_subset.begin()));
        }
    }
    Eigen::VectorXd recon = Eigen::VectorXd::Zero(d);
    for (std::size_t i = 0; i < best_subset.size(); ++i)
        recon += best_beta(static_cast<int>(i)) * m.row(best_subset[i]).transpose();
    sol.residual = (recon - best_w).norm();
    return sol;
}

// A candidate pattern fixes which points sit on the margin (O), strictly
// inside it (I), and strictly outside. Stationarity reads
//   lambda * n * w = sum_{j in I} y_j x_j + M_O^T beta,   beta in [0, 1]^|O|,
// with M_O w = 1 and the off-O margins strictly on their assigned side.
// When M_O has full column rank the equalities pin w (and therefore the
// whole split) independently of lambda, so those candidates reduce to a
// per-lambda box test on beta(lambda) = lambda*beta_a - beta_b. Otherwise
// w keeps |null(M_O)| free directions and the inside set must be
// enumerated; everything lambda-independent is still precomputed here.
struct RegularizedOracle::Impl {
    struct FullRankEntry {
        std::uint32_t omask = 0;
        std::uint32_t imask = 0;
        std::uint64_t key = 0;
        int osize = 0;
        double w[kOracleMaxDim] = {};
        std::vector<double> beta_a;
        std::vector<double> beta_b;
    };

    struct DeficientEntry {
        std::uint32_t omask = 0;
        int osize = 0;
        int nullity = 0;
        double wp[kOracleMaxDim] = {};                 // min-norm solution of M_O w = 1
        std::vector<double> nbasis;                    // d x nullity, column-major
        std::vector<double> ntwp;                      // N^T wp (~0, kept for exactness)
        std::vector<double> pinvt;                     // osize x d, row-major pinv(M_O^T)
        std::vector<double> mu;                        // margins of wp, all n points
        std::vector<double> nu;                        // n x nullity margins of N columns
        std::vector<int> comp;                         // points outside O, ascending
    };

    struct Candidate {
        bool found = false;
        std::uint64_t key = ~0ull;
        std::uint32_t omask = 0;
        std::uint32_t imask = 0;
        int osize = 0;
        double w[kOracleMaxDim] = {};
        double beta[kRegularizedMaxN] = {};
    };

    Dataset data;
    int n = 0;
    int d = 0;
    std::vector<double> mrows;  // n x d row-major copy of the margin rows
    std::vector<FullRankEntry> full;
    std::vector<DeficientEntry> deficient;

    void build();
    void scan_full(double lambda, Candidate& best) const;
    void scan_deficient(const DeficientEntry& e, double lambda, Candidate& best) const;
    OracleSolution assemble(double lambda, const Candidate& best) const;
};

void RegularizedOracle::Impl::build() {
    const Eigen::MatrixXd m = margin_rows(data);
    mrows.resize(static_cast<std::size_t>(n) * d);
    for (int j = 0; j < n; ++j)
        for (int c = 0; c < d; ++c) mrows[static_cast<std::size_t>(j) * d + c] = m(j, c);

    // The empty on-margin set: w is free, stationarity alone determines it
    // once the inside set is chosen.
    {
        DeficientEntry e;
        e.omask = 0;
        e.osize = 0;
        e.nullity = d;
        e.nbasis.assign(static_cast<std::size_t>(d) * d, 0.0);
        for (int c = 0; c < d; ++c) e.nbasis[c + static_cast<std::size_t>(c) * d] = 1.0;
        e.ntwp.assign(d, 0.0);
        e.mu.assign(n, 0.0);
        e.nu.resize(static_cast<std::size_t>(n) * d);
        for (int j = 0; j < n; ++j)
            for (int h = 0; h < d; ++h)
                e.nu[static_cast<std::size_t>(j) * d + h] = m(j, h);
        e.comp.resize(n);
        std::iota(e.comp.begin(), e.comp.end(), 0);
        deficient.push_back(std::move(e));
    }

    for (std::uint32_t omask = 1; omask < (1u << n); ++omask) {
        std::vector<int> on;
        for (int j = 0; j < n; ++j)
            if (omask & (1u << j)) on.push_back(j);
        const int osize = static_cast<int>(on.size());
        Eigen::MatrixXd rows(osize, d);
        for (int i = 0; i < osize; ++i) rows.row(i) = m.row(on[i]);

        SubsetSolve ss = solve_subset(rows);
        if (!ss.consistent) continue;  // the rows admit no common margin-1 plane
        const Eigen::MatrixXd pt = pinv_transpose(ss);

        if (ss.rank == d) {
            // w is pinned; classify every off-O point now and drop the
            // entry if any of them lands inside the ambiguity band.
            FullRankEntry e;
            e.omask = omask;
            e.osize = osize;
            for (int c = 0; c < d; ++c) e.w[c] = ss.w(c);
            Eigen::VectorXd v_in = Eigen::VectorXd::Zero(d);
            const Eigen::VectorXd marg = m * ss.w;
            bool ok = true;
            for (int j = 0; j < n && ok; ++j) {
                if (omask & (1u << j)) continue;
                if (std::abs(marg(j) - 1.0) <= kOnTol) {
                    ok = false;
                } else if (marg(j) < 1.0) {
                    e.imask |= 1u << j;
                    v_in += m.row(j).transpose();
                }
            }
            if (!ok) continue;
            const Eigen::VectorXd ba = static_cast<double>(n) * (pt * ss.w);
            const Eigen::VectorXd bb = pt * v_in;
            e.beta_a.assign(ba.data(), ba.data() + osize);
            e.beta_b.assign(bb.data(), bb.data() + osize);
            e.key = pattern_key(n, omask, e.imask);
            full.push_back(std::move(e));
        } else {
            DeficientEntry e;
            e.omask = omask;
            e.osize = osize;
            e.nullity = d - ss.rank;
            for (int c = 0; c < d; ++c) e.wp[c] = ss.w(c);
            const Eigen::MatrixXd nb = ss.svd.matrixV().rightCols(e.nullity);
            e.nbasis.resize(static_cast<std::size_t>(d) * e.nullity);
            for (int h = 0; h < e.nullity; ++h)
                for (int c = 0; c < d; ++c)
                    e.nbasis[c + static_cast<std::size_t>(h) * d] = nb(c, h);
            const Eigen::VectorXd ntw = nb.transpose() * ss.w;
            e.ntwp.assign(ntw.data(), ntw.data() + e.nullity);
            e.pinvt.resize(static_cast<std::size_t>(osize) * d);
            for (int i = 0; i < osize; ++i)
                for (int c = 0; c < d; ++c)
                    e.pinvt[static_cast<std::size_t>(i) * d + c] = pt(i, c);
            const Eigen::VectorXd mu = m * ss.w;
            e.mu.assign(mu.data(), mu.data() + n);
            const Eigen::MatrixXd nu = m * nb;
            e.nu.resize(static_cast<std::size_t>(n) * e.nullity);
            for (int j = 0; j < n; ++j)
                for (int h = 0; h < e.nullity; ++h)
                    e.nu[static_cast<std::size_t>(j) * e.nullity + h] = nu(j, h);
            for (int j = 0; j < n; ++j)
                if (!(omask & (1u << j))) e.comp.push_back(j);
            deficient.push_back(std::move(e));
        }
    }
}

void RegularizedOracle::Impl::scan_full(double lambda, Candidate& best) const {
    double beta[kRegularizedMaxN];
    for (const FullRankEntry& e : full) {
        bool ok = true;
        for (int i = 0; i < e.osize; ++i) {
            const double b = lambda * e.beta_a[i] - e.beta_b[i];
            if (b < -kDualTol || b > 1.0 + kDualTol) {
                ok = false;
                break;
            }
            beta[i] = b;
        }
        if (!ok || e.key >= best.key) continue;
        best.found = true;
        best.key = e.key;
        best.omask = e.omask;
        best.imask = e.imask;
        best.osize = e.osize;
        std::copy(e.w, e.w + d, best.w);
        std::copy(beta, beta + e.osize, best.beta);
    }
}

void RegularizedOracle::Impl::scan_deficient(const DeficientEntry& e, double lambda,
                                             Candidate& best) const {
    const int c = static_cast<int>(e.comp.size());
    const int nv = e.nullity;
    const double lam_n = lambda * n;
    const std::uint64_t total = 1ull << c;

    double v[kOracleMaxDim] = {};  // sum of margin rows over the current inside set
    std::uint32_t imask = 0;

    // Gray-code walk over inside sets: each step flips one point in or out
    // of v. The running sum is rebuilt from scratch every 1024 steps so
    // float drift stays far below the margin tolerance.
    for (std::uint64_t g = 0;; ++g) {
        double tau[kOracleMaxDim];
        for (int h = 0; h < nv; ++h) {
            double s = 0.0;
            const double* col = &e.nbasis[static_cast<std::size_t>(h) * d];
            for (int cc = 0; cc < d; ++cc) s += col[cc] * v[cc];
            tau[h] = s / lam_n - e.ntwp[h];
        }
        bool ok = true;
        for (int b = 0; b < c; ++b) {
            const int j = e.comp[b];
            double mg = e.mu[j];
            const double* nr = &e.nu[static_cast<std::size_t>(j) * nv];
            for (int h = 0; h < nv; ++h) mg += nr[h] * tau[h];
            if (std::abs(mg - 1.0) <= kOnTol) {
                ok = false;
                break;
            }
            const bool inside = (imask >> j) & 1u;
            if ((mg < 1.0) != inside) {
                ok = false;
                break;
            }
        }
        if (ok) {
            double w[kOracleMaxDim];
            for (int cc = 0; cc < d; ++cc) {
                double s = e.wp[cc];
                for (int h = 0; h < nv; ++h)
                    s += e.nbasis[cc + static_cast<std::size_t>(h) * d] * tau[h];
                w[cc] = s;
            }
            double target[kOracleMaxDim];
            for (int cc = 0; cc < d; ++cc) target[cc] = lam_n * w[cc] - v[cc];
            double beta[kRegularizedMaxN];
            bool boxed = true;
            for (int i = 0; i < e.osize; ++i) {
                double b = 0.0;
                const double* pr = &e.pinvt[static_cast<std::size_t>(i) * d];
                for (int cc = 0; cc < d; ++cc) b += pr[cc] * target[cc];
                if (b < -kDualTol || b > 1.0 + kDualTol) {
                    boxed = false;
                    break;
                }
                beta[i] = b;
            }
            if (boxed) {
                const std::uint64_t key = pattern_key(n, e.omask, imask);
                if (key < best.key) {
                    best.found = true;
                    best.key = key;
                    best.omask = e.omask;
                    best.imask = imask;
                    best.osize = e.osize;
                    std::copy(w, w + d, best.w);
                    std::copy(beta, beta + e.osize, best.beta);
                }
            }
        }
        if (g + 1 == total) break;
        const std::uint64_t nx = g + 1;
        const int bitpos = std::countr_zero(nx);
        const int j = e.comp[bitpos];
        imask ^= 1u << j;
        if ((nx & 1023ull) == 0) {
            for (int cc = 0; cc < d; ++cc) v[cc] = 0.0;
            for (int b = 0; b < c; ++b) {
                const int jj = e.comp[b];
                if (!((imask >> jj) & 1u)) continue;
                const double* row = &mrows[static_cast<std::size_t>(jj) * d];
                for (int cc = 0; cc < d; ++cc) v[cc] += row[cc];
            }
        } else {
            const double* row = &mrows[static_cast<std::size_t>(j) * d];
            if ((imask >> j) & 1u)
                for (int cc = 0; cc < d; ++cc) v[cc] += row[cc];
            else
                for (int cc = 0; cc < d; ++cc) v[cc] -= row[cc];
        }
    }
}

OracleSolution RegularizedOracle::Impl::assemble(double lambda,
                                                 const Candidate& best) const {
    OracleSolution sol;
    sol.lambda = lambda;
    sol.w.assign(best.w, best.w + d);
    double acc[kOracleMaxDim] = {};
    int bi = 0;
    for (int j = 0; j < n; ++j) {
        const double* row = &mrows[static_cast<std::size_t>(j) * d];
        if ((best.imask >> j) & 1u) {
            for (int cc = 0; cc < d; ++cc) acc[cc] += row[cc];
        } else if ((best.omask >> j) & 1u) {
            sol.active_set.push_back(j);
            sol.duals.push_back(best.beta[bi]);
            for (int cc = 0; cc < d; ++cc) acc[cc] += best.beta[bi] * row[cc];
            ++bi;
        }
    }
    double r2 = 0.0;
    for (int cc = 0; cc < d; ++cc) {
        const double g = lambda * best.w[cc] - acc[cc] / n;
        r2 += g * g;
    }
    sol.residual = std::sqrt(r2);
    return sol;
}

RegularizedOracle::RegularizedOracle(const Dataset& data) : impl_(new Impl) {
    if (data.n > kRegularizedMaxN || data.d > kOracleMaxDim)
        throw std::invalid_argument(
            "RegularizedOracle: dataset exceeds enumeration cap (n <= 16, d <= 6)");
    impl_->data = data;
    impl_->n = data.n;
    impl_->d = data.d;
    impl_->build();
}

RegularizedOracle::~RegularizedOracle() = default;
RegularizedOracle::RegularizedOracle(RegularizedOracle&&) noexcept = default;
RegularizedOracle& RegularizedOracle::operator=(RegularizedOracle&&) noexcept = default;

OracleSolution RegularizedOracle::solve(double lambda) const {
    if (!(lambda > 0.0))
        throw std::invalid_argument("RegularizedOracle: lambda must be > 0");
    Impl::Candidate best;
    impl_->scan_full(lambda, best);
    for (const Impl::DeficientEntry& e : impl_->deficient)
        impl_->scan_deficient(e, lambda, best);
    if (!best.found)
        throw std::runtime_error(
            "RegularizedOracle: no consistent activation pattern found at lambda = " +
            fmt_g17(lambda));
    return impl_->assemble(lambda, best);
}

OracleSolution exact_regularized(const Dataset& data, double lambda) {
    return RegularizedOracle(data).solve(lambda);
}

double estimate_lambda_prime(const Dataset& data, double tol) {
    if (!(tol > 0.0))
        throw std::invalid_argument("estimate_lambda_prime: tol must be > 0");
    const OracleSolution hard = exact_hard_margin(data);
    const RegularizedOracle oracle(data);
    const auto matches = [&](double lam) {
        const OracleSolution s = oracle.solve(lam);
        double r2 = 0.0;
        for (int c = 0; c < data.d; ++c) {
            const double diff = s.w[c] - hard.w[c];
            r2 += diff * diff;
        }
        return std::sqrt(r2) <= 1e-9;
    };

    constexpr double kLambdaMax = 1048576.0;            // 2^20
    constexpr double kLambdaMin = 0x1p-40;              // 2^-40
    double lo;
    double hi;
    if (matches(1.0)) {
        lo = 1.0;
        hi = 2.0;
        while (matches(hi)) {
            lo = hi;
            hi *= 2.0;
            if (hi > kLambdaMax)
                throw std::runtime_error(
                    "estimate_lambda_prime: minimizer still matches the hard-margin "
                    "solution at lambda = 2^20; no upper bracket");
        }
    } else {
        hi = 1.0;
        lo = 0.5;
        while (!matches(lo)) {
            hi = lo;
            lo *= 0.5;
            if (lo < kLambdaMin)
                throw std::runtime_error(
                    "estimate_lambda_prime: minimizer never matches the hard-margin "
                    "solution down to lambda = 2^-40");
        }
    }
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (matches(mid) ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace homsvm
