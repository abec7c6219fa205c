// SPDX-License-Identifier: Apache-2.0

#include "hjhom/effective.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace hjhom {

namespace {

constexpr std::uint64_t kSigmaSeedSalt = 0x5f3759df9e3779b9ULL;
constexpr double kErrorFloor = 1e-9;

}  // namespace

HamiltonianSpec ProblemSpec::hamiltonian(std::uint64_t seed) const {
    std::shared_ptr<const MediumSample> b;
    if (b_medium) b = std::make_shared<MediumSample>(sample_medium(*b_medium, seed));
    HamiltonianSpec h = build_pinned(pieces, pins, cls, b);
    h.level_set_convex_only = level_set_convex_only;
    return h;
}

std::shared_ptr<const MediumSample> ProblemSpec::sigma(std::uint64_t seed) const {
    if (!sigma_medium) return nullptr;
    return std::make_shared<MediumSample>(sample_medium(*sigma_medium, seed ^ kSigmaSeedSalt));
}

nlohmann::json ProblemSpec::to_json() const {
    nlohmann::json jp = nlohmann::json::array();
    for (const auto& p : pieces) jp.push_back(p.to_json());
    nlohmann::json j{{"pieces", jp},
                     {"pins", pins},
                     {"class", cls.to_json()},
                     {"level_set_convex_only", level_set_convex_only}};
    j["b_medium"] = b_medium ? b_medium->to_json() : nlohmann::json(nullptr);
    j["sigma_medium"] = sigma_medium ? sigma_medium->to_json() : nlohmann::json(nullptr);
    return j;
}

ProblemSpec ProblemSpec::from_json(const nlohmann::json& j) {
    ProblemSpec p;
    for (const auto& jp : j.at("pieces")) p.pieces.push_back(Piece::from_json(jp));
    p.pins = j.at("pins").get<std::vector<double>>();
    p.cls = ClassParams::from_json(j.at("class"));
    p.level_set_convex_only = j.value("level_set_convex_only", false);
    if (j.contains("b_medium") && !j["b_medium"].is_null())
        p.b_medium = MediumSpec::from_json(j["b_medium"]);
    if (j.contains("sigma_medium") && !j["sigma_medium"].is_null())
        p.sigma_medium = MediumSpec::from_json(j["sigma_medium"]);
    return p;
}

nlohmann::json EffectiveConfig::to_json() const {
    return {{"eps_ladder", eps_ladder},
            {"dx_over_eps", dx_over_eps},
            {"fixed_dx", fixed_dx},
            {"base", base.to_json()},
            {"refine_check", refine_check}};
}

EffectiveConfig EffectiveConfig::from_json(const nlohmann::json& j) {
    EffectiveConfig c;
    if (j.contains("eps_ladder")) c.eps_ladder = j["eps_ladder"].get<std::vector<double>>();
    c.dx_over_eps = j.value("dx_over_eps", c.dx_over_eps);
    c.fixed_dx = j.value("fixed_dx", c.fixed_dx);
    if (j.contains("base")) c.base = SolveConfig::from_json(j["base"]);
    c.refine_check = j.value("refine_check", c.refine_check);
    return c;
}

namespace {

// Least-squares fit v = c0 + c1*eps over the tail of the ladder; returns c0
// and the rms residual.
std::pair<double, double> richardson_fit(const std::vector<std::pair<double, double>>& pts) {
    const std::size_t m = std::min<std::size_t>(3, pts.size());
    const std::size_t off = pts.size() - m;
    if (m == 1) return {pts.back().second, 0.0};
    double se = 0, sv = 0, see = 0, sev = 0;
    for (std::size_t i = off; i < pts.size(); ++i) {
        se += pts[i].first;
        sv += pts[i].second;
        see += pts[i].first * pts[i].first;
        sev += pts[i].first * pts[i].second;
    }
    const double n = static_cast<double>(m);
    const double det = n * see - se * se;
    double c1 = 0.0, c0 = pts.back().second;
    if (std::abs(det) > 1e-300) {
        c1 = (n * sev - se * sv) / det;
        c0 = (sv - c1 * se) / n;
    }
    double rss = 0;
    for (std::size_t i = off; i < pts.size(); ++i) {
        const double r = pts[i].second - (c0 + c1 * pts[i].first);
        rss += r * r;
    }
    return {c0, std::sqrt(rss / n)};
}

void extrapolate(EffectiveEstimate& est) {
    const auto& pts = est.values_by_epsilon;
    auto [c0, res] = richardson_fit(pts);
    est.extrapolated = c0;
    est.error_bar = kErrorFloor + 2.0 * res;
    if (pts.size() >= 2) {
        // two-point Richardson as an independent probe of the limit
        const auto& [e1, v1] = pts[pts.size() - 2];
        const auto& [e2, v2] = pts.back();
        const double c0_2 = v2 + (v2 - v1) * e2 / (e1 - e2);
        est.error_bar += std::abs(c0 - c0_2);
        // keep the extrapolated value inside the hull of the last two ladder
        // values, padded by the error bar
        const double lo = std::min(v1, v2) - est.error_bar;
        const double hi = std::max(v1, v2) + est.error_bar;
        est.extrapolated = std::clamp(est.extrapolated, lo, hi);
    }
    if (pts.size() >= 3) {
        const double d1 = std::abs(pts[pts.size() - 2].second - pts[pts.size() - 3].second);
        const double d2 = std::abs(pts.back().second - pts[pts.size() - 2].second);
        if (d2 > 1.5 * d1 + 1e-12 && d2 > 64 * kErrorFloor) {
            est.converged = false;
            est.diagnostic = "no-convergence: ladder increments grow toward small epsilon";
            est.error_bar = std::max(est.error_bar, d2);
        }
    }
}

}  // namespace

EffectiveEstimate effective_at(const ProblemSpec& prob, double theta, std::uint64_t seed,
                               const EffectiveConfig& cfg) {
    if (cfg.eps_ladder.empty()) throw std::invalid_argument("effective_at: empty epsilon ladder");
    const HamiltonianSpec h = prob.hamiltonian(seed);
    const auto sig = prob.sigma(seed);

    EffectiveEstimate est;
    est.theta = theta;
    est.seed = seed;
    est.method = EstimatorMethod::ScalingLimit;

    for (double eps : cfg.eps_ladder) {
        SolveConfig sc = cfg.base;
        sc.epsilon = eps;
        sc.dx = cfg.fixed_dx > 0 ? cfg.fixed_dx : eps * cfg.dx_over_eps;
        sc.t_final = 1.0;
        GridSolution sol = solve_linear_datum(h, sig.get(), theta, sc);
        est.values_by_epsilon.emplace_back(eps, -sol.final_center());
    }
    extrapolate(est);

    if (cfg.refine_check) {
        SolveConfig sc = cfg.base;
        sc.epsilon = cfg.eps_ladder.back();
        sc.dx = 0.5 * (cfg.fixed_dx > 0 ? cfg.fixed_dx : sc.epsilon * cfg.dx_over_eps);
        sc.t_final = 1.0;
        GridSolution sol = solve_linear_datum(h, sig.get(), theta, sc);
        est.error_bar += std::abs(-sol.final_center() - est.values_by_epsilon.back().second);
    }
    return est;
}

EffectiveEstimate ergodic_estimate(const ProblemSpec& prob, double theta, std::uint64_t seed,
                                   double t_horizon, const EffectiveConfig& cfg) {
    if (!(t_horizon > 0)) throw std::invalid_argument("ergodic_estimate: t_horizon must be positive");
    const HamiltonianSpec h = prob.hamiltonian(seed);
    const HamiltonianSpec hs = shift_pin(h, theta);
    const auto sig = prob.sigma(seed);

    SolveConfig sc = cfg.base;
    sc.epsilon = 1.0;
    sc.dx = cfg.fixed_dx > 0 ? cfg.fixed_dx : cfg.dx_over_eps;
    sc.t_final = t_horizon;
    const double kappa = gradient_bound(hs, 0.0);
    sc.grad_bound = kappa;
    const double speed = hs.speed_bound(kappa);
    const double smax = sig ? sig->spec().max_abs_bound() : 0.0;
    sc.half_width = 1.3 * (speed * t_horizon + 4.0 * std::sqrt(smax * smax * t_horizon)) + 2.0;

    GridSolution sol = solve(hs, sig.get(), [](double) { return 0.0; }, sc);

    EffectiveEstimate est;
    est.theta = theta;
    est.seed = seed;
    est.method = EstimatorMethod::ErgodicAverage;
    // record -w(T_k,0)/T_k at dyadic horizons; 1/T_k plays the role of epsilon
    for (double frac : {0.25, 0.5, 1.0}) {
        const double tk = frac * t_horizon;
        est.values_by_epsilon.emplace_back(1.0 / tk, -sol.center_value(tk) / tk);
    }
    extrapolate(est);
    return est;
}

EnsembleStats ensemble_effective(const ProblemSpec& prob, double theta,
                                 const std::vector<std::uint64_t>& seeds,
                                 const EffectiveConfig& cfg) {
    if (seeds.empty()) throw std::invalid_argument("ensemble_effective: no seeds");
    EnsembleStats st;
    for (auto s : seeds) st.per_seed.push_back(effective_at(prob, theta, s, cfg));

    st.eps = cfg.eps_ladder;
    std::vector<double> extr;
    for (std::size_t k = 0; k < st.eps.size(); ++k) {
        std::vector<double> vals;
        for (const auto& e : st.per_seed) vals.push_back(e.values_by_epsilon[k].second);
        st.mean_by_eps.push_back(mean(vals));
        st.sd_by_eps.push_back(stddev(vals));
    }
    for (const auto& e : st.per_seed) extr.push_back(e.extrapolated);
    st.mean_extrapolated = mean(extr);
    st.sd_extrapolated = stddev(extr);
    st.sd_trend = kendall_decreasing_trend(st.sd_by_eps);
    return st;
}

namespace {

EffectiveEstimate combine_seeds(std::vector<EffectiveEstimate> per_seed) {
    if (per_seed.size() == 1) return per_seed.front();
    std::vector<double> vals;
    double eb = 0.0;
    bool conv = true;
    for (const auto& e : per_seed) {
        vals.push_back(e.extrapolated);
        eb = std::max(eb, e.error_bar);
        conv = conv && e.converged;
    }
    EffectiveEstimate out = per_seed.front();
    out.extrapolated = mean(vals);
    out.error_bar = std::max(eb, stddev(vals));
    out.converged = conv;
    return out;
}

}  // namespace

EffectiveCurve effective_curve(const ProblemSpec& prob, const std::vector<double>& thetas,
                               const std::vector<std::uint64_t>& seeds,
                               const EffectiveConfig& cfg) {
    if (thetas.empty()) throw std::invalid_argument("effective_curve: empty theta grid");
    if (seeds.empty()) throw std::invalid_argument("effective_curve: no seeds");
    EffectiveCurve c;
    c.thetas = thetas;
    c.seed_count = seeds.size();
    for (double th : thetas) {
        std::vector<EffectiveEstimate> per_seed;
        for (auto s : seeds) per_seed.push_back(effective_at(prob, th, s, cfg));
        c.estimates.push_back(combine_seeds(std::move(per_seed)));
        c.alpha_env.push_back(prob.cls.alpha(std::abs(th)));
        c.beta_env.push_back(prob.cls.beta(std::abs(th)));
    }

    const std::size_t n = thetas.size();
    // convexity: discrete second differences, guarded by stacked error bars
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double dl = thetas[i] - thetas[i - 1];
        const double dr = thetas[i + 1] - thetas[i];
        const double mid = (dr * c.value(i - 1) + dl * c.value(i + 1)) / (dl + dr);
        const double guard = 2.0 * (c.err(i - 1) + c.err(i) + c.err(i + 1));
        if (c.value(i) > mid + guard) c.convex_flag = false;
    }
    // quasiconvexity: an interior point above both flanks beats any level set
    for (std::size_t m = 1; m + 1 < n; ++m) {
        double left = c.value(0), right = c.value(m + 1);
        for (std::size_t i = 0; i < m; ++i) left = std::min(left, c.value(i));
        for (std::size_t i = m + 1; i < n; ++i) right = std::min(right, c.value(i));
        const double guard = 2.0 * c.err(m) + 2.0 * kErrorFloor;
        if (c.value(m) > left + guard && c.value(m) > right + guard)
            c.level_set_convex_flag = false;
    }
    if (!c.level_set_convex_flag) c.convex_flag = false;
    return c;
}

EffectiveCurve min_compose(const EffectiveCurve& a, const EffectiveCurve& b) {
    if (a.thetas.size() != b.thetas.size())
        throw std::invalid_argument("min_compose: theta grids differ in size");
    for (std::size_t i = 0; i < a.thetas.size(); ++i)
        if (std::abs(a.thetas[i] - b.thetas[i]) > 1e-12)
            throw std::invalid_argument("min_compose: theta grids differ");

    EffectiveCurve c = a;
    c.seed_count = std::max(a.seed_count, b.seed_count);
    for (std::size_t i = 0; i < a.thetas.size(); ++i) {
        const double va = a.value(i), vb = b.value(i);
        EffectiveEstimate& e = c.estimates[i];
        if (std::abs(va - vb) <= a.err(i) + b.err(i)) {
            // near a crossing either branch may win; take the worse bar
            e = va <= vb ? a.estimates[i] : b.estimates[i];
            e.error_bar = std::max(a.err(i), b.err(i));
        } else {
            e = va < vb ? a.estimates[i] : b.estimates[i];
        }
        c.alpha_env[i] = std::min(a.alpha_env[i], b.alpha_env[i]);
        c.beta_env[i] = std::max(a.beta_env[i], b.beta_env[i]);
    }
    c.convex_flag = false;  // unknown after composition; caller re-derives if needed
    c.level_set_convex_flag = a.level_set_convex_flag && b.level_set_convex_flag;
    return c;
}

void write_curve_csv(const EffectiveCurve& c, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("write_curve_csv: cannot open " + path);
    std::fprintf(f, "theta,h_eff,err,alpha_env,beta_env,seed_count\n");
    for (std::size_t i = 0; i < c.thetas.size(); ++i)
        std::fprintf(f, "%.17g,%.17g,%.17g,%.17g,%.17g,%zu\n", c.thetas[i], c.value(i), c.err(i),
                     c.alpha_env[i], c.beta_env[i], c.seed_count);
    std::fclose(f);
}

}  // namespace hjhom
