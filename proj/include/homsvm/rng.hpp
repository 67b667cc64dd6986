#pragma once

#include <cstdint>
#include <random>

namespace homsvm {

// Deterministic helper RNG used by the dataset generator, the verify command
// and the tests. The mapping from generator words to reals is pinned here:
// uniform() keeps the top 53 bits of an mt19937_64 draw, gaussian() sums 12
// uniforms (Irwin-Hall) instead of Box-Muller so no libm call enters the
// stream. Streams are therefore bit-reproducible across compilers and libms.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    // uniform in [0, 1)
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1p-53; }

    // approximately standard normal, exactly reproducible
    double gaussian() {
        double s = 0.0;
        for (int i = 0; i < 12; ++i) s += uniform();
        return s - 6.0;
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace homsvm
