// SPDX-License-Identifier: Apache-2.0
//
// Times the OpenMP space loops against the serial reference kernels on the
// same instance and verifies the results agree bitwise.

#include <chrono>
#include <cmath>
#include <cstdio>

#include "hjhom/solver.hpp"

using namespace hjhom;

namespace {

double run(bool parallel, double dx, GridSolution* out) {
    Piece lower;
    lower.p1 = 1.0;
    Piece upper;
    upper.p1 = -1.0;
    HamiltonianSpec h = build_pinned({lower, upper}, {0.0}, ClassParams{2.0, 0.25, 1.5});

    SolveConfig cfg;
    cfg.dx = dx;
    cfg.t_final = 1.0;
    cfg.parallel = parallel;
    cfg.snapshots = 2;

    const auto t0 = std::chrono::steady_clock::now();
    GridSolution sol = solve_linear_datum(h, nullptr, 0.75, cfg);
    const auto t1 = std::chrono::steady_clock::now();
    if (out) *out = std::move(sol);
    return std::chrono::duration<double>(t1 - t0).count();
}

}  // namespace

int main() {
    for (double dx : {1.0 / 512.0, 1.0 / 1024.0, 1.0 / 2048.0}) {
        GridSolution a, b;
        const double ts = run(false, dx, &a);
        const double tp = run(true, dx, &b);
        double max_diff = 0.0;
        for (std::size_t i = 0; i < a.values.back().size(); ++i)
            max_diff = std::max(max_diff, std::abs(a.values.back()[i] - b.values.back()[i]));
        std::printf("dx=%-10g serial %8.3fs  omp %8.3fs  speedup %5.2fx  max|diff| %g\n", dx, ts,
                    tp, ts / tp, max_diff);
        if (max_diff != 0.0) {
            std::printf("kernel mismatch\n");
            return 1;
        }
    }
    return 0;
}
