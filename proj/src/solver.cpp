// SPDX-License-Identifier: Apache-2.0

#include "hjhom/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace hjhom {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Per-node piece coefficients frozen at x_i/eps, so the inner loops touch
// flat arrays only.
struct Compiled {
    std::size_t n = 0;
    std::vector<double> p2;        // per piece
    std::vector<double> lin, cst;  // [piece * n + node]
    std::vector<double> pins;
    Scheme scheme = Scheme::Godunov;
    double llf_alpha = 0.0;
    bool broken = false;
    double broken_gain = 0.0;

    Compiled(const HamiltonianSpec& h, const std::vector<double>& xs, double eps) {
        n = xs.size();
        const std::size_t np = h.pieces.size();
        p2.resize(np);
        lin.resize(np * n);
        cst.resize(np * n);
        pins = h.pins;
        for (std::size_t k = 0; k < np; ++k) {
            const Piece& pc = h.pieces[k];
            p2[k] = pc.p2;
            for (std::size_t i = 0; i < n; ++i) {
                const double xe = xs[i] / eps;
                const double b = h.b_at(xe);
                lin[k * n + i] = pc.p1 + pc.pb * b;
                cst[k * n + i] = pc.c0 + pc.cb * b +
                                 (pc.vamp != 0.0
                                      ? pc.vamp * std::cos(2.0 * std::numbers::pi * pc.vfreq * xe)
                                      : 0.0);
            }
        }
    }

    double eval(std::size_t i, double p) const {
        std::size_t k = 0;
        while (k < pins.size() && p > pins[k]) ++k;
        return (p2[k] * p + lin[k * n + i]) * p + cst[k * n + i];
    }

    double godunov(std::size_t i, double pl, double pr) const {
        double m;
        if (pl <= pr) {
            m = kInf;
            for (std::size_t k = 0; k < p2.size(); ++k) {
                const double a2 = p2[k], a1 = lin[k * n + i], a0 = cst[k * n + i];
                double v;
                if (a2 > 0.0) {
                    const double pv = std::clamp(-a1 / (2.0 * a2), pl, pr);
                    v = (a2 * pv + a1) * pv + a0;
                } else {
                    v = std::min((a2 * pl + a1) * pl + a0, (a2 * pr + a1) * pr + a0);
                }
                m = std::min(m, v);
            }
        } else {
            m = std::max(eval(i, pl), eval(i, pr));
            for (double pin : pins)
                if (pin > pr && pin < pl) m = std::max(m, eval(i, pin));
        }
        if (broken) m += broken_gain * (pr - pl);
        return m;
    }

    double flux(std::size_t i, double pl, double pr) const {
        if (scheme == Scheme::LocalLaxFriedrichs)
            return eval(i, 0.5 * (pl + pr)) - 0.5 * llf_alpha * (pr - pl) +
                   (broken ? broken_gain * (pr - pl) : 0.0);
        return godunov(i, pl, pr);
    }
};

// The two space kernels: identical arithmetic, the first one carries the
// OpenMP work-sharing pragma, the second is the serial reference.
void flux_pass_omp(const Compiled& c, const double* u, double* f, std::size_t n, double inv_dx) {
#pragma omp parallel for schedule(static)
    for (long i = 1; i < static_cast<long>(n) - 1; ++i) {
        const double pl = (u[i] - u[i - 1]) * inv_dx;
        const double pr = (u[i + 1] - u[i]) * inv_dx;
        f[i] = c.flux(static_cast<std::size_t>(i), pl, pr);
    }
}

void flux_pass_serial(const Compiled& c, const double* u, double* f, std::size_t n, double inv_dx) {
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double pl = (u[i] - u[i - 1]) * inv_dx;
        const double pr = (u[i + 1] - u[i]) * inv_dx;
        f[i] = c.flux(i, pl, pr);
    }
}

void explicit_update_omp(const double* u, const double* f, const double* diff, double* un,
                         std::size_t n, double dt, double inv_dx2) {
#pragma omp parallel for schedule(static)
    for (long i = 1; i < static_cast<long>(n) - 1; ++i) {
        double v = u[i] - dt * f[i];
        if (diff) v += dt * diff[i] * (u[i + 1] - 2.0 * u[i] + u[i - 1]) * inv_dx2;
        un[i] = v;
    }
}

void explicit_update_serial(const double* u, const double* f, const double* diff, double* un,
                            std::size_t n, double dt, double inv_dx2) {
    for (std::size_t i = 1; i + 1 < n; ++i) {
        double v = u[i] - dt * f[i];
        if (diff) v += dt * diff[i] * (u[i + 1] - 2.0 * u[i] + u[i - 1]) * inv_dx2;
        un[i] = v;
    }
}

// Prefactored constant tridiagonal (I + dt/dx^2 diag(D) * [-1 2 -1]) with
// identity boundary rows. The solve itself is the sequential kernel of a step.
struct Tridiag {
    std::vector<double> cp, inv_den, a;

    Tridiag(const std::vector<double>& mu) {
        const std::size_t n = mu.size();
        cp.assign(n, 0.0);
        inv_den.assign(n, 1.0);
        a.assign(n, 0.0);
        // Row 0 and n-1 are identity.
        for (std::size_t i = 1; i + 1 < n; ++i) {
            a[i] = -mu[i];
            const double b = 1.0 + 2.0 * mu[i], c = -mu[i];
            const double den = b - a[i] * cp[i - 1];
            inv_den[i] = 1.0 / den;
            cp[i] = c * inv_den[i];
        }
    }

    void solve(std::vector<double>& rhs) const {
        const std::size_t n = rhs.size();
        for (std::size_t i = 1; i + 1 < n; ++i) rhs[i] = (rhs[i] - a[i] * rhs[i - 1]) * inv_den[i];
        for (std::size_t i = n - 1; i-- > 1;) rhs[i] -= cp[i] * rhs[i + 1];
    }
};

}  // namespace

double godunov_flux(const HamiltonianSpec& h, double x, double p_minus, double p_plus) {
    const double b = h.b_at(x);
    if (p_minus <= p_plus) {
        double m = kInf;
        for (const auto& pc : h.pieces) m = std::min(m, pc.min_on(x, p_minus, p_plus, b));
        return m;
    }
    double m = std::max(h.eval(x, p_minus), h.eval(x, p_plus));
    for (double pin : h.pins)
        if (pin > p_plus && pin < p_minus) m = std::max(m, h.eval(x, pin));
    return m;
}

double gradient_bound(const HamiltonianSpec& h, double lip_g) {
    std::vector<double> xs;
    if (h.x_independent()) xs = {0.0};
    else
        for (int i = 0; i <= 160; ++i) xs.push_back(0.05 * static_cast<double>(i));

    double top = -kInf;
    for (double x : xs)
        for (int k = -40; k <= 40; ++k)
            top = std::max(top, h.eval(x, lip_g * static_cast<double>(k) / 40.0));

    auto floor_at = [&](double r) {
        double m = kInf;
        for (double x : xs) m = std::min({m, h.eval(x, r), h.eval(x, -r)});
        return m;
    };

    double lo = lip_g + 0.5, hi = lo;
    while (floor_at(hi) < top + 1.0) {
        hi *= 1.3;
        if (hi > 1e6) throw SolverError("gradient_bound: hamiltonian is not coercive on probes");
    }
    while (hi - lo > 0.01) {
        const double mid = 0.5 * (lo + hi);
        (floor_at(mid) < top + 1.0 ? lo : hi) = mid;
    }
    return hi;
}

nlohmann::json SolveConfig::to_json() const {
    return {{"epsilon", epsilon},
            {"half_width", half_width},
            {"dx", dx},
            {"t_final", t_final},
            {"cfl_safety", cfl_safety},
            {"scheme", scheme == Scheme::Godunov ? "godunov" : "local-lax-friedrichs"},
            {"boundary",
             boundary == Boundary::GradientExtrapolation ? "gradient-extrapolation" : "frozen-linear"},
            {"diffusion_stepping", diffusion == DiffusionStepping::Imex ? "imex" : "explicit"},
            {"snapshots", snapshots},
            {"parallel", parallel},
            {"grad_bound", grad_bound},
            {"broken_flux", broken_flux}};
}

SolveConfig SolveConfig::from_json(const nlohmann::json& j) {
    SolveConfig c;
    c.epsilon = j.value("epsilon", 1.0);
    c.half_width = j.value("half_width", 0.0);
    c.dx = j.value("dx", 1.0 / 256.0);
    c.t_final = j.value("t_final", 1.0);
    c.cfl_safety = j.value("cfl_safety", 0.9);
    const std::string sch = j.value("scheme", "godunov");
    if (sch == "godunov") c.scheme = Scheme::Godunov;
    else if (sch == "local-lax-friedrichs") c.scheme = Scheme::LocalLaxFriedrichs;
    else throw SpecError("solve config: unknown scheme '" + sch + "'");
    const std::string bd = j.value("boundary", "gradient-extrapolation");
    if (bd == "gradient-extrapolation") c.boundary = Boundary::GradientExtrapolation;
    else if (bd == "frozen-linear") c.boundary = Boundary::FrozenLinear;
    else throw SpecError("solve config: unknown boundary '" + bd + "'");
    const std::string df = j.value("diffusion_stepping", "imex");
    if (df == "imex") c.diffusion = DiffusionStepping::Imex;
    else if (df == "explicit") c.diffusion = DiffusionStepping::Explicit;
    else throw SpecError("solve config: unknown diffusion_stepping '" + df + "'");
    c.snapshots = j.value("snapshots", 9);
    c.parallel = j.value("parallel", true);
    c.grad_bound = j.value("grad_bound", 0.0);
    c.broken_flux = j.value("broken_flux", false);
    return c;
}

double GridSolution::value(double t, double x) const {
    const double xi = (x - xs.front()) / dx;
    const auto i = static_cast<std::size_t>(std::clamp(xi, 0.0, static_cast<double>(xs.size() - 2)));
    const double wx = std::clamp(xi - static_cast<double>(i), 0.0, 1.0);
    auto at = [&](std::size_t k) {
        return values[k][i] * (1.0 - wx) + values[k][i + 1] * wx;
    };
    if (t <= times.front()) return at(0);
    if (t >= times.back()) return at(times.size() - 1);
    std::size_t k = 0;
    while (k + 1 < times.size() && times[k + 1] < t) ++k;
    const double wt = (t - times[k]) / (times[k + 1] - times[k]);
    return at(k) * (1.0 - wt) + at(k + 1) * wt;
}

double GridSolution::center_value(double t) const {
    if (t <= center_times.front()) return center_values.front();
    if (t >= center_times.back()) return center_values.back();
    const double s = t / dt;
    const auto k = static_cast<std::size_t>(s);
    const double w = s - static_cast<double>(k);
    return center_values[k] * (1.0 - w) + center_values[std::min(k + 1, center_values.size() - 1)] * w;
}

GridSolution solve(const HamiltonianSpec& h, const MediumSample* sigma,
                   const std::function<double(double)>& g, const SolveConfig& cfg) {
    if (!(cfg.epsilon > 0.0 && cfg.epsilon <= 1.0)) throw SpecError("solve: epsilon must lie in (0,1]");
    if (!(cfg.dx > 0.0)) throw SpecError("solve: dx must be positive");
    if (!(cfg.t_final > 0.0)) throw SpecError("solve: t_final must be positive");
    if (!(cfg.cfl_safety > 0.0 && cfg.cfl_safety < 1.0))
        throw SpecError("solve: cfl_safety must lie in (0,1)");

    // Gradient bound: caller-provided, else coercivity-based from the data.
    double kappa = cfg.grad_bound;
    if (kappa <= 0.0) {
        double lip = 0.0;
        for (int i = -800; i < 800; ++i) {
            const double x = 0.01 * static_cast<double>(i);
            lip = std::max(lip, std::abs(g(x + 0.01) - g(x)) / 0.01);
        }
        kappa = gradient_bound(h, lip);
    }

    const double speed = std::max(h.speed_bound(kappa), 1e-12);
    const double sig_max = sigma ? sigma->spec().max_abs_bound() : 0.0;
    const double diff_max = cfg.epsilon * sig_max * sig_max;
    const double width = speed * cfg.t_final + 4.0 * std::sqrt(diff_max * cfg.t_final);

    const double half_width = cfg.half_width > 0.0
                                  ? cfg.half_width
                                  : std::max(3.0 * kappa * cfg.t_final + 1.0, width + 1.0);
    if (half_width - width <= 0.0)
        throw BoundaryInfluenceError("solve: boundary influence reaches the evaluation region; "
                                     "margin = " + std::to_string(half_width - width) +
                                     ", enlarge half_width");

    const auto half_n = static_cast<std::size_t>(std::ceil(half_width / cfg.dx));
    const std::size_t n = 2 * half_n + 1;
    std::vector<double> xs(n);
    for (std::size_t i = 0; i < n; ++i)
        xs[i] = (static_cast<double>(i) - static_cast<double>(half_n)) * cfg.dx;

    double dt = cfg.cfl_safety * cfg.dx / speed;
    const bool viscous = sigma != nullptr && sig_max > 0.0;
    if (viscous && cfg.diffusion == DiffusionStepping::Explicit)
        dt = std::min(dt, cfg.cfl_safety * cfg.dx * cfg.dx / (2.0 * diff_max));
    dt = std::min(dt, cfg.t_final);
    if (dt < 1e-12) throw CflError("solve: CFL time step underflow (dt < 1e-12)");
    const auto steps = static_cast<std::size_t>(std::ceil(cfg.t_final / dt - 1e-12));
    dt = cfg.t_final / static_cast<double>(steps);

    Compiled comp(h, xs, cfg.epsilon);
    comp.scheme = cfg.scheme;
    comp.llf_alpha = speed;
    comp.broken = cfg.broken_flux;
    comp.broken_gain = 0.8 * speed;

    std::vector<double> diff_coef;
    if (viscous) {
        diff_coef.resize(n);
        for (std::size_t i = 0; i < n; ++i) diff_coef[i] = cfg.epsilon * sigma->A(xs[i] / cfg.epsilon);
    }

    const bool imex = viscous && cfg.diffusion == DiffusionStepping::Imex;
    std::unique_ptr<Tridiag> tri;
    if (imex) {
        std::vector<double> mu(n);
        for (std::size_t i = 0; i < n; ++i) mu[i] = dt * diff_coef[i] / (cfg.dx * cfg.dx);
        tri = std::make_unique<Tridiag>(mu);
    }

    GridSolution sol;
    sol.xs = xs;
    sol.dx = cfg.dx;
    sol.dt = dt;
    sol.epsilon = cfg.epsilon;
    sol.half_width = half_width;
    sol.influence_speed = speed;
    sol.trusted_half_width = half_width - width;

    std::vector<double> u(n), un(n), f(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) u[i] = g(xs[i]);

    // Frozen boundary rates, used by the FrozenLinear boundary.
    const double rate_lo = h.eval(xs[0] / cfg.epsilon, (u[1] - u[0]) / cfg.dx);
    const double rate_hi = h.eval(xs[n - 1] / cfg.epsilon, (u[n - 1] - u[n - 2]) / cfg.dx);

    // Snapshot schedule.
    std::vector<std::size_t> snap_steps;
    if (cfg.snapshots <= 0) {
        snap_steps.resize(steps + 1);
        for (std::size_t s = 0; s <= steps; ++s) snap_steps[s] = s;
    } else {
        const auto m = static_cast<std::size_t>(std::max(2, cfg.snapshots));
        for (std::size_t j = 0; j < m; ++j)
            snap_steps.push_back(static_cast<std::size_t>(
                std::llround(static_cast<double>(j) * static_cast<double>(steps) /
                             static_cast<double>(m - 1))));
        snap_steps.erase(std::unique(snap_steps.begin(), snap_steps.end()), snap_steps.end());
    }
    std::size_t next_snap = 0;
    auto maybe_snapshot = [&](std::size_t s) {
        if (next_snap < snap_steps.size() && snap_steps[next_snap] == s) {
            sol.times.push_back(static_cast<double>(s) * dt);
            sol.values.push_back(u);
            ++next_snap;
        }
    };

    sol.center_times.reserve(steps + 1);
    sol.center_values.reserve(steps + 1);
    sol.center_times.push_back(0.0);
    sol.center_values.push_back(u[half_n]);
    maybe_snapshot(0);

    const double inv_dx = 1.0 / cfg.dx;
    const double inv_dx2 = inv_dx * inv_dx;
    const double* dc = (viscous && cfg.diffusion == DiffusionStepping::Explicit) ? diff_coef.data()
                                                                                 : nullptr;

    for (std::size_t s = 1; s <= steps; ++s) {
        if (cfg.parallel) {
            flux_pass_omp(comp, u.data(), f.data(), n, inv_dx);
            explicit_update_omp(u.data(), f.data(), dc, un.data(), n, dt, inv_dx2);
        } else {
            flux_pass_serial(comp, u.data(), f.data(), n, inv_dx);
            explicit_update_serial(u.data(), f.data(), dc, un.data(), n, dt, inv_dx2);
        }

        if (cfg.boundary == Boundary::GradientExtrapolation) {
            un[0] = u[0] - dt * comp.eval(0, (u[1] - u[0]) * inv_dx);
            un[n - 1] = u[n - 1] - dt * comp.eval(n - 1, (u[n - 1] - u[n - 2]) * inv_dx);
        } else {
            un[0] = u[0] - dt * rate_lo;
            un[n - 1] = u[n - 1] - dt * rate_hi;
        }

        if (imex) tri->solve(un);

        std::swap(u, un);
        sol.center_times.push_back(static_cast<double>(s) * dt);
        sol.center_values.push_back(u[half_n]);
        maybe_snapshot(s);
    }

    // Metadata measured on the trusted region only.
    const auto i_lo = static_cast<std::size_t>(
        std::floor((half_width - sol.trusted_half_width) / cfg.dx));
    const auto i_hi = n - 1 - i_lo;
    for (std::size_t k = 0; k < sol.values.size(); ++k) {
        const auto& slice = sol.values[k];
        for (std::size_t i = i_lo; i < i_hi; ++i) {
            sol.measured_lipschitz =
                std::max(sol.measured_lipschitz, std::abs(slice[i + 1] - slice[i]) * inv_dx);
            sol.growth_bound = std::max(sol.growth_bound, std::abs(slice[i] - sol.values[0][i]));
        }
    }
    return sol;
}

GridSolution solve_linear_datum(const HamiltonianSpec& h, const MediumSample* sigma, double theta,
                                SolveConfig cfg) {
    if (cfg.grad_bound <= 0.0) cfg.grad_bound = gradient_bound(h, std::abs(theta));
    return solve(h, sigma, [theta](double x) { return theta * x; }, cfg);
}

void write_csv(const GridSolution& sol, const std::string& path) {
    std::FILE* fp = std::fopen(path.c_str(), "w");
    if (!fp) throw SolverError("write_csv: cannot open " + path);
    std::fprintf(fp, "t,x,u\n");
    for (std::size_t k = 0; k < sol.times.size(); ++k)
        for (std::size_t i = 0; i < sol.xs.size(); ++i)
            std::fprintf(fp, "%.17g,%.17g,%.17g\n", sol.times[k], sol.xs[i], sol.values[k][i]);
    std::fclose(fp);
}

}  // namespace hjhom
