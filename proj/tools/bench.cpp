// Timing harness for the reduction kernels: runs each one through the serial
// and the OpenMP path on the same data and reports the speedup. The last
// column is the largest absolute difference between the two paths, which the
// blocked-reduction design guarantees to be exactly zero.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include "homsvm/dataset.hpp"
#include "homsvm/kernels.hpp"
#include "homsvm/rng.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double time_best_of(int reps, const std::function<void()>& fn) {
    double best = 1e300;
    for (int i = 0; i < reps; ++i) {
        const auto t0 = Clock::now();
        fn();
        const auto t1 = Clock::now();
        best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
    }
    return best;
}

struct Row {
    std::string name;
    double serial_s;
    double parallel_s;
    double max_diff;
};

}  // namespace

int main(int argc, char** argv) {
    int n = 400000;
    int d = 8;
    int reps = 5;
    if (argc > 1) n = std::atoi(argv[1]);
    if (argc > 2) d = std::atoi(argv[2]);
    if (argc > 3) reps = std::atoi(argv[3]);
    if (n < 1 || d < 1 || reps < 1) {
        std::fprintf(stderr, "usage: %s [n] [d] [reps]\n", argv[0]);
        return 2;
    }

    std::printf("building a random separable set, n = %d, d = %d\n", n, d);
    const homsvm::Dataset data = homsvm::random_separable(7, n, d, 1.0);

    homsvm::Rng rng(99);
    std::vector<double> w(d);
    for (double& c : w) c = rng.gaussian();

    homsvm::KernelScratch scratch;
    std::vector<double> out_s(d), out_p(d);
    std::vector<Row> rows;

    {
        Row row{"active_sum", 0, 0, 0};
        row.serial_s = time_best_of(reps, [&] {
            homsvm::active_sum(data, w, homsvm::ActiveRule::inclusive,
                               homsvm::ExecPolicy::serial, scratch, out_s);
        });
        row.parallel_s = time_best_of(reps, [&] {
            homsvm::active_sum(data, w, homsvm::ActiveRule::inclusive,
                               homsvm::ExecPolicy::parallel, scratch, out_p);
        });
        for (int c = 0; c < d; ++c)
            row.max_diff = std::max(row.max_diff, std::abs(out_s[c] - out_p[c]));
        rows.push_back(row);
    }
    {
        Row row{"hinge_sum", 0, 0, 0};
        double vs = 0.0, vp = 0.0;
        row.serial_s = time_best_of(reps, [&] {
            vs = homsvm::hinge_sum(data, w, homsvm::ExecPolicy::serial, scratch);
        });
        row.parallel_s = time_best_of(reps, [&] {
            vp = homsvm::hinge_sum(data, w, homsvm::ExecPolicy::parallel, scratch);
        });
        row.max_diff = std::abs(vs - vp);
        rows.push_back(row);
    }
    {
        Row row{"min_margin", 0, 0, 0};
        double vs = 0.0, vp = 0.0;
        row.serial_s = time_best_of(reps, [&] {
            vs = homsvm::min_margin(data, w, homsvm::ExecPolicy::serial, scratch);
        });
        row.parallel_s = time_best_of(reps, [&] {
            vp = homsvm::min_margin(data, w, homsvm::ExecPolicy::parallel, scratch);
        });
        row.max_diff = std::abs(vs - vp);
        rows.push_back(row);
    }
    {
        Row row{"logistic_sums", 0, 0, 0};
        double vs = 0.0, vp = 0.0;
        row.serial_s = time_best_of(reps, [&] {
            vs = homsvm::logistic_sums(data, w, homsvm::ExecPolicy::serial, scratch, out_s);
        });
        row.parallel_s = time_best_of(reps, [&] {
            vp = homsvm::logistic_sums(data, w, homsvm::ExecPolicy::parallel, scratch, out_p);
        });
        row.max_diff = std::abs(vs - vp);
        for (int c = 0; c < d; ++c)
            row.max_diff = std::max(row.max_diff, std::abs(out_s[c] - out_p[c]));
        rows.push_back(row);
    }
    {
        Row row{"gram_matvec", 0, 0, 0};
        row.serial_s = time_best_of(reps, [&] {
            homsvm::gram_matvec(data, w, homsvm::ExecPolicy::serial, scratch, out_s);
        });
        row.parallel_s = time_best_of(reps, [&] {
            homsvm::gram_matvec(data, w, homsvm::ExecPolicy::parallel, scratch, out_p);
        });
        for (int c = 0; c < d; ++c)
            row.max_diff = std::max(row.max_diff, std::abs(out_s[c] - out_p[c]));
        rows.push_back(row);
    }
    {
        Row row{"norm_sum", 0, 0, 0};
        double vs = 0.0, vp = 0.0;
        row.serial_s = time_best_of(
            reps, [&] { vs = homsvm::norm_sum(data, homsvm::ExecPolicy::serial, scratch); });
        row.parallel_s = time_best_of(
            reps, [&] { vp = homsvm::norm_sum(data, homsvm::ExecPolicy::parallel, scratch); });
        row.max_diff = std::abs(vs - vp);
        rows.push_back(row);
    }

    std::printf("best of %d runs\n", reps);
    std::printf("%-14s %12s %12s %9s %10s\n", "kernel", "serial (ms)", "parallel (ms)",
                "speedup", "max |diff|");
    bool all_identical = true;
    for (const Row& row : rows) {
        std::printf("%-14s %12.3f %12.3f %8.2fx %10.3g\n", row.name.c_str(),
                    row.serial_s * 1e3, row.parallel_s * 1e3, row.serial_s / row.parallel_s,
                    row.max_diff);
        if (row.max_diff != 0.0) all_identical = false;
    }
    if (!all_identical) {
        std::printf("serial and parallel paths disagree\n");
        return 1;
    }
    std::printf("serial and parallel paths agree bit for bit\n");
    return 0;
}
