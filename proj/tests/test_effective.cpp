// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "hjhom/effective.hpp"
#include "hjhom/oracle.hpp"

using namespace hjhom;

namespace {

ProblemSpec quadratic_problem() {
    ProblemSpec p;
    p.pieces = {Piece{}};
    p.cls = ClassParams{2.0, 0.4, 1.0};
    return p;
}

ProblemSpec abs_problem() {
    ProblemSpec p;
    Piece lower;
    lower.p1 = 1.0;
    Piece upper;
    upper.p1 = -1.0;
    p.pieces = {lower, upper};
    p.pins = {0.0};
    p.cls = ClassParams{2.0, 0.25, 1.5};
    return p;
}

ProblemSpec random_b_problem() {
    ProblemSpec p = abs_problem();
    Piece lower;
    lower.pb = 1.0;
    Piece upper;
    upper.pb = -1.0;
    p.pieces = {lower, upper};
    MediumSpec ms;
    ms.kind = FieldKind::RandomPhase;
    ms.mean = 1.1;
    ms.amplitudes = {0.4, 0.3};
    ms.frequencies = {0.618, 1.0};
    ms.clamp.enabled = true;
    ms.clamp.a = 0.5;
    p.b_medium = ms;
    return p;
}

EffectiveConfig cheap_config() {
    EffectiveConfig c;
    c.eps_ladder = {0.25, 0.125, 0.0625};
    c.dx_over_eps = 1.0 / 16.0;
    return c;
}

}  // namespace

TEST_CASE("x-independent quadratic: effective value is theta^2/2 for every eps") {
    const EffectiveEstimate est = effective_at(quadratic_problem(), 1.0, 1, cheap_config());
    CHECK(est.extrapolated == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(est.converged);
    for (const auto& [eps, v] : est.values_by_epsilon)
        CHECK(v == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("theta = 0 on a zero-pinned family gives exactly 0") {
    for (auto prob : {abs_problem(), random_b_problem()}) {
        const EffectiveEstimate est = effective_at(prob, 0.0, 3, cheap_config());
        CHECK(std::abs(est.extrapolated) <= 1e-9);
    }
}

TEST_CASE("estimate invariants: ladder sorted, extrapolation inside padded hull") {
    const EffectiveEstimate est = effective_at(random_b_problem(), 0.7, 5, cheap_config());
    for (std::size_t i = 1; i < est.values_by_epsilon.size(); ++i)
        CHECK(est.values_by_epsilon[i].first < est.values_by_epsilon[i - 1].first);
    const double v1 = est.values_by_epsilon[est.values_by_epsilon.size() - 2].second;
    const double v2 = est.values_by_epsilon.back().second;
    CHECK(est.extrapolated >= std::min(v1, v2) - est.error_bar - 1e-15);
    CHECK(est.extrapolated <= std::max(v1, v2) + est.error_bar + 1e-15);
    CHECK(est.method == EstimatorMethod::ScalingLimit);
}

TEST_CASE("periodic cosine potential matches the cell-problem oracle at theta = 0") {
    ProblemSpec p;
    Piece osc;
    osc.vamp = 1.0;
    osc.vfreq = 1.0;
    p.pieces = {osc};
    p.cls = ClassParams{2.0, 0.4, 2.0 * std::numbers::pi_v<double> + 1.0};
    EffectiveConfig c;
    c.eps_ladder = {0.25, 0.125, 0.0625, 0.03125};
    c.dx_over_eps = 1.0 / 32.0;
    const EffectiveEstimate est = effective_at(p, 0.0, 1, c);
    const auto oracle = periodic_cell_effective(
        [](double x) { return std::cos(2.0 * std::numbers::pi_v<double> * x); }, 0.0);
    CHECK(std::abs(est.extrapolated - oracle.value) <= 2e-2);
}

TEST_CASE("ergodic estimate equals H(theta) for constant H and h_pin at pins") {
    EffectiveConfig c = cheap_config();
    const EffectiveEstimate cst = ergodic_estimate(quadratic_problem(), 1.0, 1, 4.0, c);
    CHECK(cst.extrapolated == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(cst.method == EstimatorMethod::ErgodicAverage);
    const EffectiveEstimate pin = ergodic_estimate(abs_problem(), 0.0, 1, 4.0, c);
    CHECK(std::abs(pin.extrapolated) <= 1e-9);
}

TEST_CASE("scaling-limit and ergodic estimators agree on the random family") {
    EffectiveConfig c = cheap_config();
    const double theta = 0.5;
    const EffectiveEstimate a = effective_at(random_b_problem(), theta, 7, c);
    const EffectiveEstimate b = ergodic_estimate(random_b_problem(), theta, 7, 16.0, c);
    CHECK(std::abs(a.extrapolated - b.extrapolated) <=
          a.error_bar + b.error_bar + 2e-2);
}

TEST_CASE("ensemble over a deterministic medium has zero across-seed variance") {
    const EnsembleStats st = ensemble_effective(abs_problem(), 0.7, {1, 2, 3}, cheap_config());
    for (double sd : st.sd_by_eps) CHECK(sd == doctest::Approx(0.0));
    CHECK(st.sd_extrapolated == doctest::Approx(0.0));
}

TEST_CASE("ensemble mean is consistent with single-seed extrapolations") {
    const EnsembleStats st =
        ensemble_effective(random_b_problem(), 1.0, {11, 12, 13, 14}, cheap_config());
    for (const auto& e : st.per_seed)
        CHECK(std::abs(e.extrapolated - st.mean_extrapolated) <=
              3.0 * st.sd_extrapolated + e.error_bar + 1e-2);
}

TEST_CASE("effective curve of the quadratic matches theta^2/2 and is convex") {
    std::vector<double> thetas;
    for (int i = -4; i <= 4; ++i) thetas.push_back(0.5 * i);
    const EffectiveCurve c = effective_curve(quadratic_problem(), thetas, {1}, cheap_config());
    CHECK(c.convex_flag);
    CHECK(c.level_set_convex_flag);
    for (std::size_t i = 0; i < thetas.size(); ++i) {
        CHECK(c.value(i) == doctest::Approx(0.5 * thetas[i] * thetas[i]).epsilon(1e-5));
        CHECK(c.value(i) >= c.alpha_env[i] - 1e-3);
        CHECK(c.value(i) <= c.beta_env[i] + 1e-3);
    }
}

TEST_CASE("min_compose: closed-form signed parabolas give p^2/2 - |p|") {
    std::vector<double> thetas;
    for (int i = -4; i <= 4; ++i) thetas.push_back(0.5 * i);
    ProblemSpec lower = abs_problem();
    lower.pieces = {lower.pieces[0]};
    lower.pins = {};
    ProblemSpec upper = abs_problem();
    upper.pieces = {upper.pieces[1]};
    upper.pins = {};
    const EffectiveCurve cm = effective_curve(lower, thetas, {1}, cheap_config());
    const EffectiveCurve cp = effective_curve(upper, thetas, {1}, cheap_config());
    const EffectiveCurve c = min_compose(cm, cp);
    for (std::size_t i = 0; i < thetas.size(); ++i) {
        const double want = 0.5 * thetas[i] * thetas[i] - std::abs(thetas[i]);
        CHECK(c.value(i) == doctest::Approx(want).epsilon(1e-5));
    }
    // idempotence
    const EffectiveCurve same = min_compose(cm, cm);
    for (std::size_t i = 0; i < thetas.size(); ++i) CHECK(same.value(i) == cm.value(i));
}

TEST_CASE("min_compose rejects mismatched grids") {
    const EffectiveCurve a = effective_curve(quadratic_problem(), {0.0, 1.0}, {1}, cheap_config());
    const EffectiveCurve b = effective_curve(quadratic_problem(), {0.0, 2.0}, {1}, cheap_config());
    CHECK_THROWS_AS(min_compose(a, b), std::invalid_argument);
}

TEST_CASE("curve CSV export writes the documented header") {
    const EffectiveCurve c = effective_curve(quadratic_problem(), {0.0, 1.0}, {1}, cheap_config());
    const std::string path = "effective_test_curve.csv";
    write_curve_csv(c, path);
    std::FILE* f = std::fopen(path.c_str(), "r");
    REQUIRE(f != nullptr);
    char line[128] = {0};
    REQUIRE(std::fgets(line, sizeof line, f) != nullptr);
    std::fclose(f);
    CHECK(std::string(line) == "theta,h_eff,err,alpha_env,beta_env,seed_count\n");
    std::remove(path.c_str());
}

TEST_CASE("ProblemSpec JSON round trip preserves estimates") {
    const ProblemSpec p = random_b_problem();
    const ProblemSpec back = ProblemSpec::from_json(p.to_json());
    const EffectiveEstimate a = effective_at(p, 0.5, 9, cheap_config());
    const EffectiveEstimate b = effective_at(back, 0.5, 9, cheap_config());
    CHECK(a.extrapolated == b.extrapolated);
}
