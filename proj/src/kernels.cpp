#include "homsvm/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace homsvm {

namespace {

bool run_parallel(ExecPolicy policy, int n) {
#ifdef _OPENMP
    return policy == ExecPolicy::parallel && n >= kParallelCutoff;
#else
    (void)policy;
    (void)n;
    return false;
#endif
}

int block_count(int n) { return (n + kReduceBlock - 1) / kReduceBlock; }

void check_dim(const Dataset& data, std::span<const double> v, const char* what) {
    if (static_cast<int>(v.size()) != data.d)
        throw std::invalid_argument(std::string(what) +
                                    ": vector length does not match dataset dimension");
}

double margin_of(const Dataset& data, std::span<const double> w, int j) {
    const double* x = data.x(j);
    double dot = 0.0;
    for (int c = 0; c < data.d; ++c) dot += x[c] * w[c];
    return dot * data.ys[j];
}

// Per-block workers. Serial and parallel drivers call the same worker over
// the same [begin, end) ranges, so a block's partial never depends on the
// execution policy.

void block_active_sum(const Dataset& data, std::span<const double> w, ActiveRule rule,
                      int begin, int end, double* partial) {
    const int d = data.d;
    for (int c = 0; c < d; ++c) partial[c] = 0.0;
    for (int j = begin; j < end; ++j) {
        double m = margin_of(data, w, j);
        bool active = rule == ActiveRule::inclusive ? m <= 1.0 : m < 1.0;
        if (!active) continue;
        const double* x = data.x(j);
        const double y = data.ys[j];
        for (int c = 0; c < d; ++c) partial[c] += y * x[c];
    }
}

double block_hinge_sum(const Dataset& data, std::span<const double> w, int begin, int end) {
    double s = 0.0;
    for (int j = begin; j < end; ++j) {
        double m = margin_of(data, w, j);
        if (m < 1.0) s += 1.0 - m;
    }
    return s;
}

double block_min_margin(const Dataset& data, std::span<const double> w, int begin, int end) {
    double best = std::numeric_limits<double>::infinity();
    for (int j = begin; j < end; ++j) best = std::min(best, margin_of(data, w, j));
    return best;
}

double sigmoid_neg(double m) {
    // logistic sigmoid at -m without overflow on either tail
    if (m >= 0.0) {
        double e = std::exp(-m);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(m));
}

double softplus_neg(double m) {
    // log(1 + exp(-m)) without overflow for very negative m
    if (m >= 0.0) return std::log1p(std::exp(-m));
    return -m + std::log1p(std::exp(m));
}

double block_logistic(const Dataset& data, std::span<const double> w, int begin, int end,
                      double* grad_partial) {
    const int d = data.d;
    for (int c = 0; c < d; ++c) grad_partial[c] = 0.0;
    double loss = 0.0;
    for (int j = begin; j < end; ++j) {
        double m = margin_of(data, w, j);
        loss += softplus_neg(m);
        double s = sigmoid_neg(m) * data.ys[j];
        const double* x = data.x(j);
        for (int c = 0; c < d; ++c) grad_partial[c] += s * x[c];
    }
    return loss;
}

void block_gram_matvec(const Dataset& data, std::span<const double> v, int begin, int end,
                       double* partial) {
    const int d = data.d;
    for (int c = 0; c < d; ++c) partial[c] = 0.0;
    for (int j = begin; j < end; ++j) {
        const double* x = data.x(j);
        double t = 0.0;
        for (int c = 0; c < d; ++c) t += x[c] * v[c];
        for (int c = 0; c < d; ++c) partial[c] += t * x[c];
    }
}

double block_norm_sum(const Dataset& data, int begin, int end) {
    double s = 0.0;
    for (int j = begin; j < end; ++j) {
        const double* x = data.x(j);
        double q = 0.0;
        for (int c = 0; c < data.d; ++c) q += x[c] * x[c];
        s += std::sqrt(q);
    }
    return s;
}

// Drivers. The fold over block partials runs serially in block order in both
// paths; it is the only cross-block arithmetic.

template <typename BlockFn>
void reduce_vector(const Dataset& data, ExecPolicy policy, KernelScratch& scratch,
                   std::span<double> out, BlockFn&& block) {
    const int d = data.d;
    const int nb = block_count(data.n);
    scratch.partials.resize(static_cast<std::size_t>(nb) * d);
    double* parts = scratch.partials.data();
    if (run_parallel(policy, data.n)) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
        for (int b = 0; b < nb; ++b)
            block(b * kReduceBlock, std::min(data.n, (b + 1) * kReduceBlock),
                  parts + static_cast<std::size_t>(b) * d);
#endif
    } else {
        for (int b = 0; b < nb; ++b)
            block(b * kReduceBlock, std::min(data.n, (b + 1) * kReduceBlock),
                  parts + static_cast<std::size_t>(b) * d);
    }
    for (int c = 0; c < d; ++c) out[c] = 0.0;
    for (int b = 0; b < nb; ++b) {
        const double* p = parts + static_cast<std::size_t>(b) * d;
        for (int c = 0; c < d; ++c) out[c] += p[c];
    }
}

template <typename BlockFn, typename FoldFn>
double reduce_scalar(const Dataset& data, ExecPolicy policy, KernelScratch& scratch,
                     double init, BlockFn&& block, FoldFn&& fold) {
    const int nb = block_count(data.n);
    scratch.scalars.resize(nb);
    double* parts = scratch.scalars.data();
    if (run_parallel(policy, data.n)) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
        for (int b = 0; b < nb; ++b)
            parts[b] = block(b * kReduceBlock, std::min(data.n, (b + 1) * kReduceBlock));
#endif
    } else {
        for (int b = 0; b < nb; ++b)
            parts[b] = block(b * kReduceBlock, std::min(data.n, (b + 1) * kReduceBlock));
    }
    double s = init;
    for (int b = 0; b < nb; ++b) s = fold(s, parts[b]);
    return s;
}

constexpr auto fold_sum = [](double a, double b) { return a + b; };
constexpr auto fold_min = [](double a, double b) { return std::min(a, b); };

}  // namespace

void active_sum(const Dataset& data, std::span<const double> w, ActiveRule rule,
                ExecPolicy policy, KernelScratch& scratch, std::span<double> out) {
    check_dim(data, w, "active_sum");
    check_dim(data, out, "active_sum output");
    reduce_vector(data, policy, scratch, out, [&](int b, int e, double* p) {
        block_active_sum(data, w, rule, b, e, p);
    });
}

double hinge_sum(const Dataset& data, std::span<const double> w, ExecPolicy policy,
                 KernelScratch& scratch) {
    check_dim(data, w, "hinge_sum");
    return reduce_scalar(
        data, policy, scratch, 0.0,
        [&](int b, int e) { return block_hinge_sum(data, w, b, e); }, fold_sum);
}

double min_margin(const Dataset& data, std::span<const double> w, ExecPolicy policy,
                  KernelScratch& scratch) {
    check_dim(data, w, "min_margin");
    return reduce_scalar(
        data, policy, scratch, std::numeric_limits<double>::infinity(),
        [&](int b, int e) { return block_min_margin(data, w, b, e); }, fold_min);
}

double logistic_sums(const Dataset& data, std::span<const double> w, ExecPolicy policy,
                     KernelScratch& scratch, std::span<double> out_gradsum) {
    check_dim(data, w, "logistic_sums");
    check_dim(data, out_gradsum, "logistic_sums output");
    const int d = data.d;
    const int nb = block_count(data.n);
    scratch.partials.resize(static_cast<std::size_t>(nb) * d);
    scratch.scalars.resize(nb);
    double* gparts = scratch.partials.data();
    double* lparts = scratch.scalars.data();
    if (run_parallel(policy, data.n)) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
        for (int b = 0; b < nb; ++b)
            lparts[b] = block_logistic(data, w, b * kReduceBlock,
                                       std::min(data.n, (b + 1) * kReduceBlock),
                                       gparts + static_cast<std::size_t>(b) * d);
#endif
    } else {
        for (int b = 0; b < nb; ++b)
            lparts[b] = block_logistic(data, w, b * kReduceBlock,
                                       std::min(data.n, (b + 1) * kReduceBlock),
                                       gparts + static_cast<std::size_t>(b) * d);
    }
    for (int c = 0; c < d; ++c) out_gradsum[c] = 0.0;
    double loss = 0.0;
    for (int b = 0; b < nb; ++b) {
        const double* p = gparts + static_cast<std::size_t>(b) * d;
        for (int c = 0; c < d; ++c) out_gradsum[c] += p[c];
        loss += lparts[b];
    }
    return loss;
}

void gram_matvec(const Dataset& data, std::span<const double> v, ExecPolicy policy,
                 KernelScratch& scratch, std::span<double> out) {
    check_dim(data, v, "gram_matvec");
    check_dim(data, out, "gram_matvec output");
    reduce_vector(data, policy, scratch, out,
                  [&](int b, int e, double* p) { block_gram_matvec(data, v, b, e, p); });
}

double norm_sum(const Dataset& data, ExecPolicy policy, KernelScratch& scratch) {
    return reduce_scalar(
        data, policy, scratch, 0.0,
        [&](int b, int e) { return block_norm_sum(data, b, e); }, fold_sum);
}

ClassExtremes class_extremes(const Dataset& data, std::span<const double> w) {
    check_dim(data, w, "class_extremes");
    ClassExtremes ex;
    for (int j = 0; j < data.n; ++j) {
        const double* x = data.x(j);
        double dot = 0.0;
        for (int c = 0; c < data.d; ++c) dot += x[c] * w[c];
        if (data.ys[j] > 0.0) {
            if (!ex.has_pos || dot < ex.min_pos) {
                ex.min_pos = dot;
                ex.has_pos = true;
            }
        } else {
            if (!ex.has_neg || dot > ex.max_neg) {
                ex.max_neg = dot;
                ex.has_neg = true;
            }
        }
    }
    return ex;
}

}  // namespace homsvm
