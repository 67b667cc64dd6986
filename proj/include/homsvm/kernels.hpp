#pragma once

#include <span>
#include <vector>

#include "homsvm/dataset.hpp"

namespace homsvm {

// Margin-activity test used by the hinge subgradient. `inclusive` counts
// points sitting exactly on the margin (y x.w == 1) as active, `strict`
// leaves them out. The solver uses the inclusive rule; both are exposed so
// the boundary case can be exercised directly.
enum class ActiveRule { inclusive, strict };

enum class ExecPolicy { serial, parallel };

// All reductions are blocked: points are split into fixed-size blocks, each
// block produces a partial, and the partials are folded serially in block
// order. The parallel path distributes blocks across threads but runs the
// same per-block code and the same fold, so results are bit-identical to the
// serial path at any thread count. Below kParallelCutoff points the fork
// overhead outweighs the work and the serial path is used regardless of
// policy; the cutoff does not affect results, only timing.
constexpr int kReduceBlock = 2048;
constexpr int kParallelCutoff = 8192;

// Reusable partial-result buffers so per-update calls do not allocate.
struct KernelScratch {
    std::vector<double> partials;
    std::vector<double> scalars;
};

// The margin of point j is (x_j . w) * y_j with the dot product accumulated
// over coordinates in ascending order. Every kernel below uses exactly this
// expression, which pins the rounding.

// out[c] = sum of y_j * x_j[c] over points whose margin is active under
// `rule` (<= 1 inclusive, < 1 strict).
void active_sum(const Dataset& data, std::span<const double> w, ActiveRule rule,
                ExecPolicy policy, KernelScratch& scratch, std::span<double> out);

// Sum over points of max(0, 1 - margin).
double hinge_sum(const Dataset& data, std::span<const double> w, ExecPolicy policy,
                 KernelScratch& scratch);

// Smallest margin over all points.
double min_margin(const Dataset& data, std::span<const double> w, ExecPolicy policy,
                  KernelScratch& scratch);

// Returns sum of log(1 + exp(-margin_j)) and fills out_gradsum[c] with
// sum of sigmoid(-margin_j) * y_j * x_j[c]. Both evaluated with softplus
// stabilization so large margins cannot overflow.
double logistic_sums(const Dataset& data, std::span<const double> w, ExecPolicy policy,
                     KernelScratch& scratch, std::span<double> out_gradsum);

// out = X^T X v where the rows of X are the data points.
void gram_matvec(const Dataset& data, std::span<const double> v, ExecPolicy policy,
                 KernelScratch& scratch, std::span<double> out);

// Sum of Euclidean norms of the points.
double norm_sum(const Dataset& data, ExecPolicy policy, KernelScratch& scratch);

struct ClassExtremes {
    double min_pos = 0.0;  // smallest x . w over points labeled +1
    double max_neg = 0.0;  // largest x . w over points labeled -1
    bool has_pos = false;
    bool has_neg = false;
};

// Serial by design: needed once per checkpoint, not per update.
ClassExtremes class_extremes(const Dataset& data, std::span<const double> w);

}  // namespace homsvm
