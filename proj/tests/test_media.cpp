// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "hjhom/media.hpp"
#include "hjhom/stats.hpp"

using namespace hjhom;

namespace {

MediumSpec random_phase_spec() {
    MediumSpec s;
    s.kind = FieldKind::RandomPhase;
    s.mean = 1.1;
    s.amplitudes = {0.4, 0.3};
    s.frequencies = {0.618, 1.0};
    s.clamp.enabled = true;
    s.clamp.a = 0.5;
    return s;
}

std::vector<double> probe_grid() {
    std::vector<double> xs;
    for (int i = -200; i <= 200; ++i) xs.push_back(0.05 * i);
    return xs;
}

}  // namespace

TEST_CASE("constant field evaluates to its mean everywhere") {
    MediumSpec s;
    s.kind = FieldKind::Constant;
    s.mean = 1.0;
    const MediumSample m = sample_medium(s, 7);
    for (double x : {-5.0, -0.3, 0.0, 0.3, 17.0}) {
        CHECK(m.value(x) == 1.0);
        CHECK(m.A(x) == 1.0);
    }
}

TEST_CASE("same (spec, seed) reproduces bit-identical evaluations") {
    const MediumSpec s = random_phase_spec();
    const MediumSample m1 = sample_medium(s, 42);
    const MediumSample m2 = sample_medium(s, 42);
    for (double x : {0.3, -1.7, 4.21}) CHECK(m1.value(x) == m2.value(x));
    const MediumSample m3 = sample_medium(s, 43);
    CHECK(m1.value(0.3) != m3.value(0.3));
}

TEST_CASE("invalid specs throw naming the offending field") {
    MediumSpec s = random_phase_spec();
    s.clamp.a = 1.5;
    CHECK_THROWS_AS(s.validate(), SpecError);
    MediumSpec p;
    p.kind = FieldKind::Periodic;
    p.period = -1.0;
    CHECK_THROWS_AS(p.validate(), SpecError);
    MediumSpec r = random_phase_spec();
    r.frequencies = {0.618};  // length mismatch with amplitudes
    CHECK_THROWS_AS(r.validate(), SpecError);
}

TEST_CASE("shift_medium realizes the shift group") {
    const MediumSample m = sample_medium(random_phase_spec(), 11);
    const MediumSample m0 = shift_medium(m, 0.0);
    const MediumSample my = shift_medium(m, 1.7);
    const MediumSample myc = shift_medium(my, -1.7);
    const MediumSample m12 = shift_medium(shift_medium(m, 0.4), 0.9);
    const MediumSample msum = shift_medium(m, 1.3);
    for (double x : {-2.0, -0.25, 0.0, 0.6, 3.14}) {
        CHECK(m0.value(x) == m.value(x));
        CHECK(my.value(x) == doctest::Approx(m.value(x + 1.7)).epsilon(1e-14));
        CHECK(myc.value(x) == doctest::Approx(m.value(x)).epsilon(1e-14));
        CHECK(m12.value(x) == doctest::Approx(msum.value(x)).epsilon(1e-14));
    }
}

TEST_CASE("periodic field shifted by its period is unchanged") {
    MediumSpec s;
    s.kind = FieldKind::Periodic;
    s.mean = 1.0;
    s.amplitudes = {0.3, 0.1};
    s.period = 1.0;
    const MediumSample m = sample_medium(s, 5);
    const MediumSample ms = shift_medium(m, 1.0);
    for (double x : {-1.1, 0.0, 0.37, 2.2})
        CHECK(ms.value(x) == doctest::Approx(m.value(x)).epsilon(1e-13));
}

TEST_CASE("validate_medium: constant sigma = 1 reports zero slope") {
    MediumSpec s;
    s.kind = FieldKind::Constant;
    s.mean = 1.0;
    const auto grid = probe_grid();
    const auto rep = validate_medium(sample_medium(s, 1), grid);
    CHECK(rep.passed());
    CHECK(rep.worst_violation == doctest::Approx(0.0));
}

TEST_CASE("validate_medium: clamped values stay in [a, 1/a]") {
    const MediumSpec s = random_phase_spec();
    const auto grid = probe_grid();
    for (std::uint64_t seed : {1, 2, 3}) {
        const MediumSample m = sample_medium(s, seed);
        const auto rep = validate_medium(m, grid);
        CHECK(rep.passed());
        for (double x : grid) {
            CHECK(m.value(x) >= s.clamp.lo() - 1e-12);
            CHECK(m.value(x) <= s.clamp.hi() + 1e-12);
        }
    }
}

TEST_CASE("sampled difference quotients respect the analytic Lipschitz bound") {
    const MediumSpec s = random_phase_spec();
    const double bound = s.lipschitz_bound();
    const double dx = 1e-4;
    for (std::uint64_t seed : {1, 9}) {
        const MediumSample m = sample_medium(s, seed);
        double worst = 0.0;
        for (int i = -2000; i < 2000; ++i) {
            const double x = 0.005 * i;
            worst = std::max(worst, std::abs(m.value(x + dx) - m.value(x)) / dx);
        }
        CHECK(worst <= bound * (1.0 + 1e-6));
    }
}

TEST_CASE("ensemble moments of b(x0) and b(x0 + y) agree (stationarity)") {
    const MediumSpec s = random_phase_spec();
    const int n = 10000;
    std::vector<double> a, b;
    for (int k = 0; k < n; ++k) {
        const MediumSample m = sample_medium(s, 1000 + k);
        a.push_back(m.value(0.0));
        b.push_back(m.value(5.7));
    }
    const double se = std::sqrt(variance(a) / n) + std::sqrt(variance(b) / n);
    CHECK(std::abs(mean(a) - mean(b)) <= 3.0 * se);
    CHECK(std::abs(variance(a) - variance(b)) <= 0.2 * (variance(a) + variance(b)));
}

TEST_CASE("distributional stationarity: two-sample KS across 1000 seeds") {
    const MediumSpec s = random_phase_spec();
    std::vector<double> a, b;
    for (int k = 0; k < 1000; ++k) {
        const MediumSample m = sample_medium(s, 50000 + k);
        a.push_back(m.value(0.0));
        b.push_back(m.value(3.9));
    }
    const KsResult ks = ks_two_sample(a, b);
    CHECK(ks.p_value > 0.01);
}

TEST_CASE("jittered-bumps field is in range and deterministic") {
    MediumSpec s;
    s.kind = FieldKind::JitteredBumps;
    s.mean = 1.0;
    s.bump_spacing = 1.0;
    s.bump_width = 0.3;
    s.bump_height = 0.5;
    s.jitter = 0.25;
    s.clamp.enabled = true;
    s.clamp.a = 0.5;
    const MediumSample m1 = sample_medium(s, 77);
    const MediumSample m2 = sample_medium(s, 77);
    for (int i = -40; i <= 40; ++i) {
        const double x = 0.25 * i;
        CHECK(m1.value(x) == m2.value(x));
        CHECK(m1.value(x) >= 0.5 - 1e-12);
        CHECK(m1.value(x) <= 2.0 + 1e-12);
    }
}

TEST_CASE("JSON round trip preserves the golden key layout") {
    const MediumSpec s = random_phase_spec();
    const nlohmann::json j = s.to_json();
    CHECK(j.contains("kind"));
    CHECK(j.contains("params"));
    CHECK(j.contains("clamp"));
    CHECK(j["clamp"][0].get<double>() == doctest::Approx(0.5));
    CHECK(j["clamp"][1].get<double>() == doctest::Approx(2.0));
    const MediumSpec back = MediumSpec::from_json(j);
    const MediumSample m1 = sample_medium(s, 3);
    const MediumSample m2 = sample_medium(back, 3);
    for (double x : {-1.0, 0.2, 2.5}) CHECK(m1.value(x) == m2.value(x));
}
