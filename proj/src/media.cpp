// SPDX-License-Identifier: Apache-2.0

#include "hjhom/media.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hjhom/rng.hpp"

namespace hjhom {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// C^2 bump profile supported on (-1, 1), value 1 at the center.
double bump_profile(double r) {
    const double r2 = r * r;
    if (r2 >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - r2));
}

// max |d/dr bump_profile| over (-1,1), evaluated numerically once.
constexpr double kBumpSlopeBound = 2.2;

// RNG stream ids per derived quantity.
constexpr std::uint64_t kStreamPhase = 1;
constexpr std::uint64_t kStreamGlobalShift = 2;
constexpr std::uint64_t kStreamJitter = 3;

}  // namespace

const char* to_string(FieldKind k) {
    switch (k) {
        case FieldKind::Constant: return "constant";
        case FieldKind::Periodic: return "periodic";
        case FieldKind::RandomPhase: return "random-phase";
        default: return "jittered-bumps";
    }
}

FieldKind field_kind_from_string(const std::string& s) {
    if (s == "constant") return FieldKind::Constant;
    if (s == "periodic") return FieldKind::Periodic;
    if (s == "random-phase") return FieldKind::RandomPhase;
    if (s == "jittered-bumps") return FieldKind::JitteredBumps;
    throw SpecError("medium: unknown kind '" + s + "'");
}

double ClampSpec::apply(double y) const {
    if (!enabled) return y;
    const double l = lo(), h = hi();
    const double m = 0.1 * (h - l);
    if (y > h - m) {
        const double c = h - m;
        return c + m * std::tanh((y - c) / m);
    }
    if (y < l + m) {
        const double c = l + m;
        return c + m * std::tanh((y - c) / m);
    }
    return y;
}

void MediumSpec::validate() const {
    if (clamp.enabled && !(clamp.a > 0.0 && clamp.a < 1.0))
        throw SpecError("medium: clamp.a must lie in (0,1)");
    switch (kind) {
        case FieldKind::Constant:
            break;
        case FieldKind::Periodic:
            if (!(period > 0.0)) throw SpecError("medium: period must be positive");
            if (amplitudes.empty()) throw SpecError("medium: periodic kind needs amplitudes");
            break;
        case FieldKind::RandomPhase:
            if (amplitudes.size() != frequencies.size() || amplitudes.empty())
                throw SpecError("medium: amplitudes/frequencies must be non-empty and equal-sized");
            for (double f : frequencies)
                if (!(f > 0.0)) throw SpecError("medium: frequencies must be positive");
            break;
        case FieldKind::JitteredBumps:
            if (!(bump_spacing > 0.0)) throw SpecError("medium: bump_spacing must be positive");
            if (!(bump_width > 0.0)) throw SpecError("medium: bump_width must be positive");
            if (!(jitter >= 0.0 && jitter <= 0.5))
                throw SpecError("medium: jitter must lie in [0, 0.5]");
            break;
    }
}

double MediumSpec::lipschitz_bound() const {
    double raw = 0.0;
    switch (kind) {
        case FieldKind::Constant:
            raw = 0.0;
            break;
        case FieldKind::Periodic:
            for (std::size_t k = 0; k < amplitudes.size(); ++k)
                raw += std::abs(amplitudes[k]) * kTwoPi * static_cast<double>(k + 1) / period;
            break;
        case FieldKind::RandomPhase:
            for (std::size_t k = 0; k < amplitudes.size(); ++k)
                raw += std::abs(amplitudes[k]) * kTwoPi * frequencies[k];
            break;
        case FieldKind::JitteredBumps: {
            const int overlap = 1 + 2 * static_cast<int>(std::floor(bump_width / bump_spacing + 1.0));
            raw = std::abs(bump_height) / bump_width * kBumpSlopeBound * overlap;
            break;
        }
    }
    return raw;  // the clamp is 1-Lipschitz
}

double MediumSpec::max_abs_bound() const {
    double dev = 0.0;
    switch (kind) {
        case FieldKind::Constant:
            dev = 0.0;
            break;
        case FieldKind::Periodic:
        case FieldKind::RandomPhase:
            for (double a : amplitudes) dev += std::abs(a);
            break;
        case FieldKind::JitteredBumps: {
            const int overlap = 1 + 2 * static_cast<int>(std::floor(bump_width / bump_spacing + 1.0));
            dev = std::abs(bump_height) * overlap;
            break;
        }
    }
    const double raw = std::abs(mean) + dev;
    return clamp.enabled ? std::min(raw, clamp.hi()) : raw;
}

nlohmann::json MediumSpec::to_json() const {
    nlohmann::json params;
    params["mean"] = mean;
    switch (kind) {
        case FieldKind::Constant:
            break;
        case FieldKind::Periodic:
            params["amplitudes"] = amplitudes;
            params["period"] = period;
            break;
        case FieldKind::RandomPhase:
            params["amplitudes"] = amplitudes;
            params["frequencies"] = frequencies;
            break;
        case FieldKind::JitteredBumps:
            params["bump_spacing"] = bump_spacing;
            params["bump_width"] = bump_width;
            params["bump_height"] = bump_height;
            params["jitter"] = jitter;
            break;
    }
    nlohmann::json j{{"kind", to_string(kind)}, {"params", params}};
    if (clamp.enabled)
        j["clamp"] = {clamp.a, 1.0 / clamp.a};
    else
        j["clamp"] = nullptr;
    return j;
}

MediumSpec MediumSpec::from_json(const nlohmann::json& j) {
    MediumSpec s;
    s.kind = field_kind_from_string(j.at("kind").get<std::string>());
    const auto& p = j.at("params");
    s.mean = p.value("mean", 1.0);
    s.amplitudes = p.value("amplitudes", std::vector<double>{});
    s.frequencies = p.value("frequencies", std::vector<double>{});
    s.period = p.value("period", 1.0);
    s.bump_spacing = p.value("bump_spacing", 1.0);
    s.bump_width = p.value("bump_width", 0.3);
    s.bump_height = p.value("bump_height", 0.5);
    s.jitter = p.value("jitter", 0.25);
    if (j.contains("clamp") && !j["clamp"].is_null()) {
        s.clamp.enabled = true;
        s.clamp.a = j["clamp"][0].get<double>();
    }
    s.validate();
    return s;
}

MediumSample::MediumSample(MediumSpec spec, std::uint64_t seed, double shift)
    : spec_(std::move(spec)), seed_(seed), shift_(shift) {
    spec_.validate();
    switch (spec_.kind) {
        case FieldKind::Constant:
            break;
        case FieldKind::Periodic:
            global_phase_ = counter_uniform(seed_, kStreamGlobalShift, 0) * spec_.period;
            break;
        case FieldKind::RandomPhase:
            phases_.resize(spec_.amplitudes.size());
            for (std::size_t k = 0; k < phases_.size(); ++k)
                phases_[k] = counter_uniform(seed_, kStreamPhase, k) * kTwoPi;
            break;
        case FieldKind::JitteredBumps:
            global_phase_ = counter_uniform(seed_, kStreamGlobalShift, 0) * spec_.bump_spacing;
            break;
    }
}

double MediumSample::value(double x) const {
    const double z = x + shift_;
    double v = spec_.mean;
    switch (spec_.kind) {
        case FieldKind::Constant:
            break;
        case FieldKind::Periodic: {
            const double y = z + global_phase_;
            for (std::size_t k = 0; k < spec_.amplitudes.size(); ++k)
                v += spec_.amplitudes[k] * std::cos(kTwoPi * static_cast<double>(k + 1) * y / spec_.period);
            break;
        }
        case FieldKind::RandomPhase:
            for (std::size_t k = 0; k < spec_.amplitudes.size(); ++k)
                v += spec_.amplitudes[k] * std::cos(kTwoPi * spec_.frequencies[k] * z + phases_[k]);
            break;
        case FieldKind::JitteredBumps: {
            const double y = z + global_phase_;
            const double sp = spec_.bump_spacing, w = spec_.bump_width;
            const long n_lo = static_cast<long>(std::floor((y - w - sp) / sp));
            const long n_hi = static_cast<long>(std::ceil((y + w + sp) / sp));
            for (long n = n_lo; n <= n_hi; ++n) {
                const double u = counter_uniform(seed_, kStreamJitter, static_cast<std::uint64_t>(n));
                const double site = static_cast<double>(n) * sp + (u - 0.5) * spec_.jitter * sp;
                v += spec_.bump_height * bump_profile((y - site) / w);
            }
            break;
        }
    }
    return spec_.clamp.apply(v);
}

std::string MediumSample::provenance() const {
    nlohmann::json j = spec_.to_json();
    j["seed"] = seed_;
    j["shift"] = shift_;
    return fnv1a_hex(j.dump());
}

MediumSample sample_medium(const MediumSpec& spec, std::uint64_t seed) {
    spec.validate();
    return MediumSample(spec, seed);
}

MediumSample shift_medium(const MediumSample& m, double y) {
    return MediumSample(m.spec(), m.seed(), m.shift() + y);
}

VerificationReport validate_medium(const MediumSample& m, std::span<const double> probe_grid) {
    VerificationReport rep;
    rep.check_name = "medium-invariants";
    rep.tolerance = 1e-9;
    rep.config_hash = m.provenance();

    double max_abs = 0.0, max_slope = 0.0, range_viol = 0.0;
    double prev_x = 0.0, prev_v = 0.0;
    bool have_prev = false;
    const auto& spec = m.spec();
    for (double x : probe_grid) {
        const double v = m.value(x);
        max_abs = std::max(max_abs, std::abs(v));
        if (spec.clamp.enabled)
            range_viol = std::max({range_viol, spec.clamp.lo() - v, v - spec.clamp.hi()});
        if (have_prev && x != prev_x)
            max_slope = std::max(max_slope, std::abs(v - prev_v) / std::abs(x - prev_x));
        prev_x = x;
        prev_v = v;
        have_prev = true;
    }
    rep.witnesses.emplace_back("max_abs", max_abs);
    rep.witnesses.emplace_back("max_slope", max_slope);
    rep.witnesses.emplace_back("range_violation", range_viol);
    rep.witnesses.emplace_back("lipschitz_bound", spec.lipschitz_bound());
    rep.witnesses.emplace_back("max_abs_bound", spec.max_abs_bound());
    const double slope_excess = std::max(0.0, max_slope - spec.lipschitz_bound());
    const double abs_excess = std::max(0.0, max_abs - spec.max_abs_bound());
    rep.worst_violation = std::max({range_viol, slope_excess, abs_excess, 0.0});
    rep.finalize();
    return rep;
}

}  // namespace hjhom
