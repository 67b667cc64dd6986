#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace homsvm {

// Labeled points for binary classification through the origin. Coordinates are
// stored flat and row-major so the kernels can walk them without indirection.
struct Dataset {
    int n = 0;
    int d = 0;
    std::vector<double> xs;  // n*d values, point j occupies xs[j*d .. j*d+d)
    std::vector<double> ys;  // n labels, each exactly -1.0 or +1.0

    const double* x(int j) const { return xs.data() + static_cast<std::size_t>(j) * d; }
};

// Validates the invariants (labels exactly +-1, finite coordinates, consistent
// dimensions) and packs the rows.
Dataset make_dataset(const std::vector<std::vector<double>>& points,
                     const std::vector<double>& labels);

// The canonical benchmark set: four support vectors +(0.5,1.5), +(1.5,0.5) with
// label +1 and their negations with label -1, plus filler points m*v for every
// multiplier m (taken in ascending order). The empty list gives the bare
// 4-point set; the default {2,3,4} gives the 16-point set whose hard-margin
// solution is (0.5,0.5) and whose regularization cutoff is 8/n = 0.5.
Dataset canonical_dataset(const std::vector<int>& filler_multipliers = {2, 3, 4});

// Copy with coordinate `axis` of every point multiplied by factor. Labels kept.
Dataset scaled_dataset(const Dataset& base, int axis, double factor);

// Deterministic separable cloud: a unit direction u is drawn from the seeded
// generator (see rng.hpp for the pinned PRNG), gaussian points are then pushed
// along u until every margin y_j (x_j . u) clears `margin`. When `direction`
// is non-null it receives u, so callers can check the separation directly.
Dataset random_separable(std::uint64_t seed, int n, int d, double margin,
                         std::vector<double>* direction = nullptr);

double max_point_norm(const Dataset& data);

// CSV with header y,x1,...,xd, one row per point, floats at 17 significant
// digits, LF line endings. read(write(D)) reproduces D exactly.
Dataset read_csv(const std::string& path);
void write_csv(const Dataset& data, const std::string& path);

}  // namespace homsvm
