// SPDX-License-Identifier: Apache-2.0

#include "hjhom/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hjhom {

namespace {

// Golden-section descent inside [lo, hi] around a bracketed minimum.
double golden_min(const ScalarFn& f, double lo, double hi, double xtol) {
    constexpr double kInvPhi = 0.6180339887498949;
    double a = lo, b = hi;
    double c = b - kInvPhi * (b - a);
    double d = a + kInvPhi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > xtol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - kInvPhi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + kInvPhi * (b - a);
            fd = f(d);
        }
    }
    return f(0.5 * (a + b));
}

// Global minimum by coarse scan plus local golden section, refined until
// successive resolutions agree to tol/4.
double refined_min(const ScalarFn& f, double lo, double hi, double tol, double* achieved) {
    double prev = std::numeric_limits<double>::infinity();
    double best = prev;
    for (int n = 128; n <= (1 << 20); n *= 2) {
        const double h = (hi - lo) / n;
        double fmin = std::numeric_limits<double>::infinity();
        int imin = 0;
        for (int i = 0; i <= n; ++i) {
            const double v = f(lo + h * i);
            if (v < fmin) {
                fmin = v;
                imin = i;
            }
        }
        const double a = lo + h * std::max(0, imin - 1);
        const double b = lo + h * std::min(n, imin + 1);
        best = golden_min(f, a, b, 1e-12 * std::max(1.0, hi - lo));
        if (std::abs(best - prev) < tol / 4.0) {
            if (achieved) *achieved = std::abs(best - prev) * 4.0 + 1e-14;
            return best;
        }
        prev = best;
    }
    if (achieved) *achieved = std::abs(best - prev);
    return best;
}

// Composite Simpson with doubling until successive refinements agree.
double refined_integral(const ScalarFn& f, double lo, double hi, double tol) {
    double prev = std::numeric_limits<double>::infinity();
    for (int n = 64; n <= (1 << 22); n *= 2) {
        const double h = (hi - lo) / n;
        double s = f(lo) + f(hi);
        for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(lo + h * i);
        s *= h / 3.0;
        if (std::abs(s - prev) < tol / 4.0) return s;
        prev = s;
    }
    throw OracleError("oracle: quadrature non-convergence");
}

}  // namespace

ScalarFn legendre_transform(const HamiltonianSpec& h, double p_radius) {
    if (!h.x_independent()) throw OracleError("legendre_transform: H must be x-independent");
    return [h, p_radius](double q) {
        double tol_out = 0.0;
        return -refined_min([&](double p) { return h.eval(0.0, p) - p * q; }, -p_radius, p_radius,
                            1e-10, &tol_out);
    };
}

OracleResult hopf_lax(const ScalarFn& g, const ScalarFn& lagrangian, double t, double x,
                      double y_radius, double tol) {
    if (!(t > 0.0)) throw OracleError("hopf_lax: t must be positive");
    // Superlinearity sanity for the bracket.
    if (lagrangian(y_radius / t) + lagrangian(-y_radius / t) <
        2.0 * lagrangian(0.0) + 1e-12)
        throw OracleError("hopf_lax: lagrangian fails the superlinearity bracket");
    OracleResult r;
    r.method = "hopf-lax";
    double achieved = 0.0;
    r.value = refined_min([&](double y) { return g(y) + t * lagrangian((x - y) / t); },
                          x - y_radius, x + y_radius, tol, &achieved);
    r.tolerance = std::max(achieved, tol);
    return r;
}

OracleResult periodic_cell_effective(const ScalarFn& potential, double theta, double tol) {
    OracleResult r;
    r.method = "cell-quadrature";
    r.tolerance = tol;

    double vmax = -std::numeric_limits<double>::infinity();
    double achieved = 0.0;
    vmax = -refined_min([&](double x) { return -potential(x); }, 0.0, 1.0, tol / 4.0, &achieved);

    auto momentum = [&](double lambda) {
        return refined_integral(
            [&](double x) { return std::sqrt(2.0 * std::max(lambda - potential(x), 0.0)); }, 0.0,
            1.0, tol / 4.0);
    };

    const double target = std::abs(theta);
    if (momentum(vmax) >= target) {
        r.value = vmax;  // flat piece of the effective Hamiltonian
        return r;
    }
    double lo = vmax, hi = vmax + std::max(1.0, target * target);
    while (momentum(hi) < target) hi *= 2.0;
    while (hi - lo > tol / 2.0) {
        const double mid = 0.5 * (lo + hi);
        (momentum(mid) < target ? lo : hi) = mid;
    }
    r.value = 0.5 * (lo + hi);
    return r;
}

OracleResult constant_coeff_effective(const HamiltonianSpec& h, double theta) {
    if (!h.x_independent()) throw OracleError("constant_coeff_effective: H must be x-independent");
    OracleResult r;
    r.method = "constant-coeff";
    r.value = h.eval(0.0, theta);
    r.tolerance = 0.0;
    return r;
}

}  // namespace hjhom
