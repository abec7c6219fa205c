// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "hjhom/oracle.hpp"
#include "hjhom/solver.hpp"

using namespace hjhom;

namespace {

HamiltonianSpec quadratic() {
    Piece p;
    return build_pinned({p}, {}, ClassParams{2.0, 0.4, 1.0});
}

HamiltonianSpec abs_family() {
    Piece lower;
    lower.p1 = 1.0;
    Piece upper;
    upper.p1 = -1.0;
    return build_pinned({lower, upper}, {0.0}, ClassParams{2.0, 0.25, 1.5});
}

}  // namespace

TEST_CASE("legendre transform of p^2/2 is q^2/2") {
    const auto L = legendre_transform(quadratic());
    for (double q : {-2.0, -0.5, 0.0, 1.0, 3.0})
        CHECK(L(q) == doctest::Approx(0.5 * q * q).epsilon(1e-6));
}

TEST_CASE("hopf-lax on linear data reproduces the classical solution") {
    const auto L = legendre_transform(quadratic());
    for (double theta : {-1.0, 0.5, 2.0})
        for (double x : {-1.0, 0.0, 2.0}) {
            const auto r = hopf_lax([theta](double y) { return theta * y; }, L, 1.0, x);
            CHECK(r.value == doctest::Approx(theta * x - 0.5 * theta * theta).epsilon(1e-6));
        }
}

TEST_CASE("hopf-lax with g = |x| stays nonnegative at the origin") {
    const auto L = legendre_transform(quadratic());
    const auto r = hopf_lax([](double y) { return std::abs(y); }, L, 1.0, 0.0);
    CHECK(r.value == doctest::Approx(0.0).epsilon(1e-7));
}

TEST_CASE("hopf-lax approaches the datum as t -> 0+") {
    const auto L = legendre_transform(quadratic());
    const auto g = [](double y) { return std::cos(y); };
    const auto r = hopf_lax(g, L, 1e-3, 0.7, 1.0, 1e-5);
    CHECK(std::abs(r.value - g(0.7)) <= 1e-2);
}

TEST_CASE("hopf-lax satisfies the semigroup property on probes") {
    const auto L = legendre_transform(quadratic(), 16.0);
    const auto g = [](double y) { return std::cos(y); };
    const double t1 = 0.4, t2 = 0.6;
    const auto direct = hopf_lax(g, L, t1 + t2, 0.3, 8.0, 1e-6);

    // tabulate the t1 state once, then evolve the interpolant by t2
    const int n = 512;
    const double lo = -8.0, hi = 8.0;
    std::vector<double> table(n + 1);
    for (int i = 0; i <= n; ++i)
        table[i] = hopf_lax(g, L, t1, lo + (hi - lo) * i / n, 8.0, 1e-6).value;
    auto mid = [&](double y) {
        const double s = std::clamp((y - lo) / (hi - lo) * n, 0.0, static_cast<double>(n) - 1e-9);
        const int i = static_cast<int>(s);
        const double w = s - i;
        return table[i] * (1.0 - w) + table[i + 1] * w;
    };
    const auto chained = hopf_lax(mid, L, t2, 0.3, 6.0, 1e-6);
    CHECK(std::abs(direct.value - chained.value) <= 2e-3);
}

TEST_CASE("hopf-lax agrees with the pde solver on a non-trivial datum") {
    const HamiltonianSpec h = quadratic();
    const auto L = legendre_transform(h);
    const auto g = [](double y) { return 0.5 * std::cos(y); };
    SolveConfig cfg;
    cfg.dx = 1.0 / 256.0;
    GridSolution sol = solve(h, nullptr, g, cfg);
    for (double x : {-1.0, 0.0, 0.8}) {
        const auto r = hopf_lax(g, L, 1.0, x);
        CHECK(std::abs(sol.value(1.0, x) - r.value) <= 0.05);
    }
}

TEST_CASE("cell problem with zero potential recovers theta^2/2") {
    const auto V = [](double) { return 0.0; };
    for (double theta : {0.0, 0.5, 1.0, 3.0}) {
        const auto r = periodic_cell_effective(V, theta);
        CHECK(r.value == doctest::Approx(0.5 * theta * theta).epsilon(1e-6));
    }
}

TEST_CASE("cell problem with cosine potential: flat piece at theta = 0") {
    const auto V = [](double x) { return std::cos(2.0 * std::numbers::pi_v<double> * x); };
    const auto r = periodic_cell_effective(V, 0.0);
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("cell problem: even, nondecreasing in |theta|, sane for large theta") {
    const auto V = [](double x) { return std::cos(2.0 * std::numbers::pi_v<double> * x); };
    double prev = 0.0;
    for (double theta : {0.0, 0.5, 1.0, 2.0, 4.0}) {
        const auto r = periodic_cell_effective(V, theta);
        const auto rm = periodic_cell_effective(V, -theta);
        CHECK(r.value == doctest::Approx(rm.value).epsilon(1e-8));
        CHECK(r.value >= prev - 1e-9);
        prev = r.value;
    }
    const auto big = periodic_cell_effective(V, 10.0);
    CHECK(big.value >= 0.5 * 10.0 * 10.0);
    CHECK(big.value <= 0.5 * 10.0 * 10.0 + 2.0);
}

TEST_CASE("oracle self-refinement: halving tolerance moves results less than tol") {
    const auto V = [](double x) { return std::cos(2.0 * std::numbers::pi_v<double> * x); };
    const auto a = periodic_cell_effective(V, 0.7, 1e-6);
    const auto b = periodic_cell_effective(V, 0.7, 5e-7);
    CHECK(std::abs(a.value - b.value) <= 1e-6);
}

TEST_CASE("constant-coefficient oracle returns H(theta) and rejects x dependence") {
    const HamiltonianSpec h = abs_family();
    CHECK(constant_coeff_effective(h, 1.0).value == doctest::Approx(-0.5));
    CHECK(constant_coeff_effective(h, 0.0).value == doctest::Approx(0.0));

    Piece osc;
    osc.vamp = 0.5;
    HamiltonianSpec hx = build_pinned({osc}, {}, ClassParams{2.0, 0.4, 4.0});
    CHECK_THROWS_AS(constant_coeff_effective(hx, 0.0), OracleError);
}
