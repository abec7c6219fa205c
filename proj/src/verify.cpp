// SPDX-License-Identifier: Apache-2.0

#include "hjhom/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "hjhom/rng.hpp"

namespace hjhom {

namespace {

std::string hash_config(const nlohmann::json& j) { return fnv1a_hex(j.dump()); }

// Indices of xs lying in the common trusted region of both solutions.
std::pair<std::size_t, std::size_t> trusted_range(const GridSolution& u,
                                                  double trusted_half_width) {
    std::size_t lo = 0, hi = u.xs.size();
    while (lo < hi && u.xs[lo] < -trusted_half_width) ++lo;
    while (hi > lo && u.xs[hi - 1] > trusted_half_width) --hi;
    return {lo, hi};
}

void require_same_grid(const GridSolution& a, const GridSolution& b, const char* who) {
    if (a.xs.size() != b.xs.size() || a.values.size() != b.values.size() ||
        std::abs(a.dx - b.dx) > 1e-15 || std::abs(a.dt - b.dt) > 1e-15)
        throw std::invalid_argument(std::string(who) + ": grid mismatch");
}

}  // namespace

VerificationReport check_contraction(const GridSolution& u1, const GridSolution& u2,
                                     double slack) {
    require_same_grid(u1, u2, "check_contraction");
    VerificationReport r;
    r.check_name = "contraction";
    r.tolerance = slack;
    r.config_hash = hash_config({{"dx", u1.dx}, {"dt", u1.dt}, {"slack", slack}});

    const double tw = std::min(u1.trusted_half_width, u2.trusted_half_width);
    const auto [lo, hi] = trusted_range(u1, tw);
    double d0 = 0.0;
    for (std::size_t k = 0; k < u1.values.size(); ++k) {
        double d = 0.0;
        std::size_t worst_i = lo;
        for (std::size_t i = lo; i < hi; ++i) {
            double g = std::abs(u1.values[k][i] - u2.values[k][i]);
            if (!std::isfinite(g)) g = 1e300;  // blowup counts as a violation
            if (g > d) {
                d = g;
                worst_i = i;
            }
        }
        if (k == 0) {
            d0 = d;
            continue;
        }
        const double viol = d - d0;
        if (viol > r.worst_violation) {
            r.worst_violation = viol;
            char loc[64];
            std::snprintf(loc, sizeof loc, "t=%.6g x=%.6g", u1.times[k], u1.xs[worst_i]);
            r.witnesses = {{loc, d}};
        }
    }
    r.finalize();
    return r;
}

VerificationReport check_ordering(const GridSolution& u1, const GridSolution& u2, double tol) {
    require_same_grid(u1, u2, "check_ordering");
    VerificationReport r;
    r.check_name = "ordering";
    r.tolerance = tol;
    r.config_hash = hash_config({{"dx", u1.dx}, {"dt", u1.dt}, {"tol", tol}});

    const double tw = std::min(u1.trusted_half_width, u2.trusted_half_width);
    const auto [lo, hi] = trusted_range(u1, tw);
    for (std::size_t k = 0; k < u1.values.size(); ++k)
        for (std::size_t i = lo; i < hi; ++i) {
            double viol = u1.values[k][i] - u2.values[k][i];
            if (!std::isfinite(viol)) viol = 1e300;
            if (viol > r.worst_violation) {
                r.worst_violation = viol;
                char loc[64];
                std::snprintf(loc, sizeof loc, "t=%.6g x=%.6g", u1.times[k], u1.xs[i]);
                r.witnesses = {{loc, viol}};
            }
        }
    r.finalize();
    return r;
}

VerificationReport check_monotone_preservation(const HamiltonianSpec& h,
                                               std::shared_ptr<const MediumSample> sigma,
                                               const std::function<double(double)>& g,
                                               const SolveConfig& cfg) {
    SolveConfig sc = cfg;
    sc.snapshots = 0;  // inspect every step
    GridSolution sol = solve(h, sigma.get(), g, sc);

    // Direction of the datum on the grid (0 when constant).
    int dir = 0;
    for (std::size_t i = 0; i + 1 < sol.xs.size(); ++i) {
        const double d = g(sol.xs[i + 1]) - g(sol.xs[i]);
        if (d > 1e-14) {
            if (dir < 0) throw std::invalid_argument("check_monotone_preservation: datum not monotone");
            dir = 1;
        } else if (d < -1e-14) {
            if (dir > 0) throw std::invalid_argument("check_monotone_preservation: datum not monotone");
            dir = -1;
        }
    }

    VerificationReport r;
    r.check_name = "monotone_preservation";
    r.tolerance = 1e-12;
    r.config_hash = hash_config({{"cfg", cfg.to_json()}, {"dir", dir}});

    const auto [lo, hi] = trusted_range(sol, sol.trusted_half_width);
    for (std::size_t k = 0; k < sol.values.size(); ++k)
        for (std::size_t i = lo; i + 1 < hi; ++i) {
            const double d = sol.values[k][i + 1] - sol.values[k][i];
            const double viol = dir >= 0 ? std::max(-d, 0.0) : std::max(d, 0.0);
            if (dir == 0) {
                const double v2 = std::abs(d);
                if (v2 > r.worst_violation) r.worst_violation = v2;
                continue;
            }
            if (viol > r.worst_violation) {
                r.worst_violation = viol;
                char loc[64];
                std::snprintf(loc, sizeof loc, "t=%.6g x=%.6g", sol.times[k], sol.xs[i]);
                r.witnesses = {{loc, viol}};
            }
        }
    r.finalize();
    return r;
}

namespace {

double sup_diff(const GridSolution& a, const GridSolution& b) {
    // Evaluate b on a's grid and snapshot times over the common trusted region.
    const double tw = std::min(a.trusted_half_width, b.trusted_half_width);
    const auto [lo, hi] = trusted_range(a, tw);
    double m = 0.0;
    for (std::size_t k = 0; k < a.values.size(); ++k)
        for (std::size_t i = lo; i < hi; ++i)
            m = std::max(m, std::abs(a.values[k][i] - b.value(a.times[k], a.xs[i])));
    return m;
}

}  // namespace

VerificationReport check_sign_reduction(const HamiltonianSpec& h,
                                        std::shared_ptr<const MediumSample> sigma, double theta,
                                        const SolveConfig& cfg) {
    std::size_t pin_idx = h.pins.size();
    for (std::size_t i = 0; i < h.pins.size(); ++i)
        if (std::abs(h.pins[i]) <= 1e-12) pin_idx = i;
    if (pin_idx == h.pins.size())
        throw std::invalid_argument("check_sign_reduction: not pinned at 0 (apply shift_pin first)");

    const SplitPair sp = split_at_pin(h, pin_idx);
    const HamiltonianSpec& side = theta >= 0 ? sp.plus : sp.minus;

    GridSolution u_full = solve_linear_datum(h, sigma.get(), theta, cfg);
    GridSolution u_side = solve_linear_datum(side, sigma.get(), theta, cfg);

    SolveConfig fine = cfg;
    fine.dx = cfg.dx / 2.0;
    GridSolution u_ref = solve_linear_datum(h, sigma.get(), theta, fine);
    const double refine_delta = sup_diff(u_full, u_ref);

    VerificationReport r;
    r.check_name = "sign_reduction";
    r.tolerance = 2.0 * refine_delta + 1e-12;
    r.worst_violation = sup_diff(u_full, u_side);
    r.witnesses = {{"refinement_delta", refine_delta},
                   {theta >= 0 ? "theta>=0 side=plus" : "theta<0 side=minus", theta}};
    r.config_hash = hash_config({{"cfg", cfg.to_json()}, {"theta", theta}});
    r.finalize();
    return r;
}

VerificationReport check_theta_continuity(const HamiltonianSpec& h,
                                          std::shared_ptr<const MediumSample> sigma,
                                          const std::vector<std::pair<double, double>>& theta_pairs,
                                          const SolveConfig& cfg, double tol) {
    VerificationReport r;
    r.check_name = "theta_continuity";
    r.tolerance = tol;
    r.config_hash = hash_config({{"cfg", cfg.to_json()}, {"pairs", theta_pairs.size()}});

    std::vector<std::pair<double, double>> modulus;  // (delta, measured excess)
    for (const auto& [t1, t2] : theta_pairs) {
        GridSolution u1 = solve_linear_datum(h, sigma.get(), t1, cfg);
        GridSolution u2 = solve_linear_datum(h, sigma.get(), t2, cfg);
        const double tw = std::min(u1.trusted_half_width, u2.trusted_half_width);
        const auto [lo, hi] = trusted_range(u1, tw);
        double m = 0.0;
        for (std::size_t k = 0; k < u1.values.size(); ++k)
            for (std::size_t i = lo; i < hi; ++i) {
                const double excess = std::abs(u1.values[k][i] - u2.value(u1.times[k], u1.xs[i])) -
                                      std::abs(u1.xs[i]) * std::abs(t1 - t2);
                m = std::max(m, excess);
            }
        modulus.emplace_back(std::abs(t1 - t2), m);
        char loc[64];
        std::snprintf(loc, sizeof loc, "delta=%.6g", std::abs(t1 - t2));
        r.witnesses.emplace_back(loc, m);
    }

    // Fit m_hat(delta) = c0 + c1 delta; the modulus must vanish at 0.
    double sd = 0, sm = 0, sdd = 0, sdm = 0;
    for (const auto& [d, m] : modulus) {
        sd += d;
        sm += m;
        sdd += d * d;
        sdm += d * m;
    }
    const double n = static_cast<double>(modulus.size());
    double c0 = sm / n;
    const double det = n * sdd - sd * sd;
    if (det > 1e-300) {
        const double c1 = (n * sdm - sd * sm) / det;
        c0 = (sm - c1 * sd) / n;
    }
    r.worst_violation = std::max(c0, 0.0);
    r.finalize();
    return r;
}

VerificationReport check_scaling_identity(const HamiltonianSpec& h,
                                          std::shared_ptr<const MediumSample> sigma, double theta,
                                          double eps, const SolveConfig& cfg) {
    SolveConfig scaled = cfg;
    scaled.epsilon = eps;
    GridSolution ue = solve_linear_datum(h, sigma.get(), theta, scaled);

    SolveConfig unscaled = cfg;
    unscaled.epsilon = 1.0;
    unscaled.dx = cfg.dx / eps;
    unscaled.t_final = cfg.t_final / eps;
    GridSolution u1 = solve_linear_datum(h, sigma.get(), theta, unscaled);

    VerificationReport r;
    r.check_name = "scaling_identity";
    r.tolerance = 5.0 * (ue.dx + ue.dt);
    r.config_hash = hash_config({{"cfg", cfg.to_json()}, {"theta", theta}, {"eps", eps}});

    const double tw = std::min(ue.trusted_half_width, eps * u1.trusted_half_width);
    const auto [lo, hi] = trusted_range(ue, tw);
    for (std::size_t k = 0; k < ue.values.size(); ++k)
        for (std::size_t i = lo; i < hi; ++i) {
            const double rescaled = eps * u1.value(ue.times[k] / eps, ue.xs[i] / eps);
            const double d = std::abs(ue.values[k][i] - rescaled);
            if (d > r.worst_violation) {
                r.worst_violation = d;
                char loc[64];
                std::snprintf(loc, sizeof loc, "t=%.6g x=%.6g", ue.times[k], ue.xs[i]);
                r.witnesses = {{loc, d}};
            }
        }
    r.finalize();
    return r;
}

VerificationReport check_coercivity_sandwich(const EffectiveCurve& c, double tol) {
    VerificationReport r;
    r.check_name = "coercivity_sandwich";
    r.tolerance = tol;
    r.config_hash = hash_config({{"n", c.thetas.size()}, {"seeds", c.seed_count}});
    double worst_err = 0.0;
    for (std::size_t i = 0; i < c.thetas.size(); ++i) {
        const double viol =
            std::max(c.alpha_env[i] - c.value(i), c.value(i) - c.beta_env[i]);
        if (viol > r.worst_violation) {
            r.worst_violation = viol;
            worst_err = c.err(i);
            char loc[64];
            std::snprintf(loc, sizeof loc, "theta=%.6g", c.thetas[i]);
            r.witnesses = {{loc, c.value(i)}};
        }
    }
    if (r.worst_violation > tol && r.worst_violation - worst_err <= tol)
        r.status = CheckStatus::Inconclusive;
    r.finalize();
    return r;
}

VerificationReport check_pin_values(const ProblemSpec& prob, std::uint64_t seed,
                                    const EffectiveConfig& cfg, double tol) {
    const HamiltonianSpec h = prob.hamiltonian(seed);
    VerificationReport r;
    r.check_name = "pin_values";
    r.tolerance = tol;
    r.config_hash = hash_config({{"cfg", cfg.to_json()}, {"seed", seed}});
    for (std::size_t i = 0; i < h.pins.size(); ++i) {
        const EffectiveEstimate est = effective_at(prob, h.pins[i], seed, cfg);
        const double d = std::abs(est.extrapolated - h.pinned_values[i]);
        char loc[64];
        std::snprintf(loc, sizeof loc, "pin=%.6g", h.pins[i]);
        r.witnesses.emplace_back(loc, est.extrapolated);
        r.worst_violation = std::max(r.worst_violation, d);
    }
    r.finalize();
    return r;
}

VerificationReport check_shift_covariance(const ProblemSpec& prob, double p0,
                                          const std::vector<double>& thetas, std::uint64_t seed,
                                          const EffectiveConfig& cfg) {
    // Shift the pieces exactly: H~(x,p) = H(x, p + p0).
    ProblemSpec shifted = prob;
    for (auto& pc : shifted.pieces) {
        pc.c0 += pc.p1 * p0 + pc.p2 * p0 * p0;
        pc.cb += pc.pb * p0;
        pc.p1 += 2.0 * pc.p2 * p0;
    }
    for (auto& p : shifted.pins) p -= p0;

    VerificationReport r;
    r.check_name = "shift_covariance";
    r.tolerance = 0.0;  // combined error bars enter the violation directly
    r.config_hash = hash_config({{"cfg", cfg.to_json()}, {"p0", p0}, {"seed", seed}});
    for (double th : thetas) {
        const EffectiveEstimate a = effective_at(shifted, th, seed, cfg);
        const EffectiveEstimate b = effective_at(prob, th + p0, seed, cfg);
        const double excess =
            std::abs(a.extrapolated - b.extrapolated) - (a.error_bar + b.error_bar);
        char loc[64];
        std::snprintf(loc, sizeof loc, "theta=%.6g p0=%.6g", th, p0);
        r.witnesses.emplace_back(loc, std::abs(a.extrapolated - b.extrapolated));
        r.worst_violation = std::max(r.worst_violation, excess);
    }
    r.finalize();
    return r;
}

VerificationReport check_min_formula(const EffectiveCurve& direct, const EffectiveCurve& composed,
                                     double tol) {
    if (direct.thetas.size() != composed.thetas.size())
        throw std::invalid_argument("check_min_formula: theta grids differ");
    VerificationReport r;
    r.check_name = "min_formula";
    r.tolerance = 0.0;
    r.config_hash = hash_config({{"n", direct.thetas.size()}, {"tol", tol}});
    for (std::size_t i = 0; i < direct.thetas.size(); ++i) {
        const double bars = direct.err(i) + composed.err(i);
        const double d = std::abs(direct.value(i) - composed.value(i));
        // agreement within combined bars, and the bars themselves within tol
        const double excess = std::max(d - bars, bars - tol);
        if (excess > r.worst_violation) {
            r.worst_violation = excess;
            char loc[64];
            std::snprintf(loc, sizeof loc, "theta=%.6g", direct.thetas[i]);
            r.witnesses = {{loc, d}, {"combined_bars", bars}};
        }
    }
    r.finalize();
    return r;
}

VerificationReport check_nonconvexity_witness(const EffectiveCurve& c) {
    VerificationReport r;
    r.check_name = "nonconvexity_witness";
    r.tolerance = 0.0;
    r.config_hash = hash_config({{"n", c.thetas.size()}, {"seeds", c.seed_count}});
    // The witness family must fail level-set convexity; the flag already
    // carries an error-bar guard.
    r.worst_violation = c.level_set_convex_flag ? 1.0 : 0.0;
    std::size_t argmax = 0;
    for (std::size_t i = 1; i < c.thetas.size(); ++i)
        if (c.value(i) > c.value(argmax)) argmax = i;
    char loc[64];
    std::snprintf(loc, sizeof loc, "interior_peak_theta=%.6g", c.thetas[argmax]);
    r.witnesses = {{loc, c.value(argmax)}};
    r.finalize();
    return r;
}

namespace {

// Bounded uniformly continuous datum: a few seeded cosine modes.
std::function<double(double)> random_uc_datum(std::uint64_t seed, std::uint64_t stream) {
    std::vector<double> amp(4), freq(4), phase(4);
    for (int k = 0; k < 4; ++k) {
        amp[k] = counter_uniform(seed, stream, 3 * k) - 0.5;
        freq[k] = 0.2 + 0.8 * counter_uniform(seed, stream, 3 * k + 1);
        phase[k] = 6.283185307179586 * counter_uniform(seed, stream, 3 * k + 2);
    }
    return [amp, freq, phase](double x) {
        double v = 0.0;
        for (int k = 0; k < 4; ++k) v += amp[k] * std::cos(6.283185307179586 * freq[k] * x + phase[k]);
        return v;
    };
}

ProblemSpec quadratic_problem() {
    ProblemSpec p;
    p.pieces = {Piece{}};  // p^2/2
    p.cls = ClassParams{2.0, 0.4, 1.0};
    return p;
}

// min{p^2/2 - b p, p^2/2 + b p}, pinned at 0 with value 0.
ProblemSpec b_family_problem(double b_const) {
    ProblemSpec p;
    Piece lower;
    lower.p1 = b_const;
    Piece upper;
    upper.p1 = -b_const;
    p.pieces = {lower, upper};
    p.pins = {0.0};
    p.cls = ClassParams{2.0, 0.25, 1.5};
    return p;
}

}  // namespace

std::vector<VerificationReport> run_suite(std::uint64_t seed, bool broken_flux) {
    std::vector<VerificationReport> out;

    const ProblemSpec quad = quadratic_problem();
    const ProblemSpec bfam = b_family_problem(1.0);
    const HamiltonianSpec h_quad = quad.hamiltonian(seed);
    const HamiltonianSpec h_bfam = bfam.hamiltonian(seed);

    SolveConfig sc;
    sc.dx = 1.0 / 128.0;
    sc.t_final = 1.0;
    sc.broken_flux = broken_flux;
    // shared grid for the pairwise checks regardless of the drawn data
    sc.grad_bound = 8.0;
    sc.half_width = 16.0;

    {
        auto g1 = random_uc_datum(seed, 10);
        auto g2 = random_uc_datum(seed, 11);
        GridSolution u1 = solve(h_bfam, nullptr, g1, sc);
        GridSolution u2 = solve(h_bfam, nullptr, g2, sc);
        out.push_back(check_contraction(u1, u2, 10.0 * u1.dt));
    }
    {
        auto g1 = random_uc_datum(seed, 12);
        auto g2 = [&](double x) { return g1(x) + 0.2; };
        SolveConfig oc = sc;
        oc.broken_flux = false;
        GridSolution u1 = solve(h_bfam, nullptr, g1, oc);
        GridSolution u2 = solve(h_bfam, nullptr, g2, oc);
        out.push_back(check_ordering(u1, u2, 1e-10));
    }
    {
        SolveConfig mc;
        mc.dx = 1.0 / 64.0;
        mc.half_width = 4.0;
        out.push_back(
            check_monotone_preservation(h_bfam, nullptr, [](double x) { return 0.5 * x; }, mc));
    }
    {
        SolveConfig rc;
        rc.dx = 1.0 / 128.0;
        out.push_back(check_sign_reduction(h_bfam, nullptr, 1.0, rc));
    }
    {
        SolveConfig tc;
        tc.dx = 1.0 / 128.0;
        std::vector<std::pair<double, double>> pairs;
        for (int k = 1; k <= 4; ++k) pairs.emplace_back(0.5, 0.5 + std::ldexp(1.0, -k));
        out.push_back(check_theta_continuity(h_quad, nullptr, pairs, tc, 2e-2));
    }
    {
        SolveConfig zc;
        zc.dx = 1.0 / 128.0;
        out.push_back(check_scaling_identity(h_bfam, nullptr, 0.75, 0.5, zc));
    }

    EffectiveConfig ec;
    ec.eps_ladder = {0.25, 0.125, 0.0625};
    ec.dx_over_eps = 1.0 / 16.0;
    {
        std::vector<double> thetas;
        for (int i = -4; i <= 4; ++i) thetas.push_back(0.25 * i);
        const EffectiveCurve curve = effective_curve(bfam, thetas, {seed}, ec);
        out.push_back(check_coercivity_sandwich(curve, 1e-3));

        EffectiveCurve lower_c, upper_c;
        {
            ProblemSpec lower = bfam, upper = bfam;
            lower.pieces = {bfam.pieces[0]};
            lower.pins = {};
            upper.pieces = {bfam.pieces[1]};
            upper.pins = {};
            lower_c = effective_curve(lower, thetas, {seed}, ec);
            upper_c = effective_curve(upper, thetas, {seed}, ec);
        }
        out.push_back(check_min_formula(curve, min_compose(lower_c, upper_c), 3e-2));
    }
    out.push_back(check_pin_values(bfam, seed, ec, 1e-6));
    out.push_back(check_shift_covariance(quad, 1.0, {-1.0, 0.0, 1.0}, seed, ec));
    {
        // Viscous witness family: min{p^2/2 - b p, p^2/2 + b p}, b in [a, 1/a].
        ProblemSpec wit = b_family_problem(0.0);
        wit.pieces[0].pb = 1.0;
        wit.pieces[1].pb = -1.0;
        wit.pieces[0].p1 = wit.pieces[1].p1 = 0.0;
        MediumSpec ms;
        ms.kind = FieldKind::RandomPhase;
        ms.mean = 1.1;
        ms.amplitudes = {0.4, 0.3};
        ms.frequencies = {0.618, 1.0};
        ms.clamp.enabled = true;
        ms.clamp.a = 0.5;
        wit.b_medium = ms;
        MediumSpec unit;
        unit.kind = FieldKind::Constant;
        unit.mean = 1.0;
        wit.sigma_medium = unit;
        wit.level_set_convex_only = true;
        std::vector<double> thetas;
        for (int i = -4; i <= 4; ++i) thetas.push_back(0.25 * i);
        const EffectiveCurve curve = effective_curve(wit, thetas, {seed}, ec);
        out.push_back(check_nonconvexity_witness(curve));
    }
    return out;
}

void write_reports_jsonl(const std::vector<VerificationReport>& reports, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("write_reports_jsonl: cannot open " + path);
    for (const auto& r : reports) {
        const std::string line = r.to_json().dump();
        std::fprintf(f, "%s\n", line.c_str());
    }
    std::fclose(f);
}

std::string summary_table(const std::vector<VerificationReport>& reports) {
    std::ostringstream os;
    os << "check                      status        worst        tol\n";
    for (const auto& r : reports) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "%-26s %-12s %10.3e %10.3e\n", r.check_name.c_str(),
                      to_string(r.status), r.worst_violation, r.tolerance);
        os << buf;
    }
    return os.str();
}

}  // namespace hjhom
