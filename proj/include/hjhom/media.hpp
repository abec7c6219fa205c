// SPDX-License-Identifier: Apache-2.0
//
// Stationary one-dimensional coefficient fields with deterministic seeding.
//
// Real-shift stationarity is obtained by random-phase superposition
//   b(x) = c0 + sum_k a_k cos(2 pi f_k x + phi_k),   phi_k i.i.d. uniform,
// and, for the lattice-based kinds, by an additional uniform global shift.

#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "hjhom/report.hpp"

namespace hjhom {

enum class FieldKind { Constant, Periodic, RandomPhase, JitteredBumps };

const char* to_string(FieldKind k);
FieldKind field_kind_from_string(const std::string& s);

// Smooth saturation to [a, 1/a]: identity on the interior, C^2 tanh caps
// near the edges so the realized Lipschitz bound is preserved.
struct ClampSpec {
    bool enabled = false;
    double a = 0.5;  // range [a, 1/a], requires 0 < a < 1

    double apply(double y) const;
    double lo() const { return a; }
    double hi() const { return 1.0 / a; }
};

struct MediumSpec {
    FieldKind kind = FieldKind::Constant;
    double mean = 1.0;  // c0 / constant value

    // Periodic and RandomPhase: cosine modes. Periodic uses harmonics of
    // 1/period with deterministic phases plus a seed-drawn global shift;
    // RandomPhase uses the listed frequencies with i.i.d. uniform phases.
    std::vector<double> amplitudes;
    std::vector<double> frequencies;  // cycles per unit length (RandomPhase)
    double period = 1.0;

    // JitteredBumps: smooth compactly supported bumps on a jittered lattice.
    double bump_spacing = 1.0;
    double bump_width = 0.3;
    double bump_height = 0.5;
    double jitter = 0.25;  // fraction of spacing

    ClampSpec clamp;

    // Throws SpecError naming the offending field.
    void validate() const;

    // Analytic Lipschitz bound of the realized (clamped) field.
    double lipschitz_bound() const;
    // Bound on |field| (before clamping it also holds after clamping).
    double max_abs_bound() const;

    nlohmann::json to_json() const;
    static MediumSpec from_json(const nlohmann::json& j);
};

struct SpecError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A realized field omega. Immutable; evaluation is pure and thread-safe.
class MediumSample {
  public:
    MediumSample(MediumSpec spec, std::uint64_t seed, double shift = 0.0);

    double value(double x) const;
    // Diffusion convention: this sample is the root sigma, A = sigma^2.
    double A(double x) const {
        const double s = value(x);
        return s * s;
    }

    const MediumSpec& spec() const { return spec_; }
    std::uint64_t seed() const { return seed_; }
    double shift() const { return shift_; }
    std::string provenance() const;

  private:
    MediumSpec spec_;
    std::uint64_t seed_ = 0;
    double shift_ = 0.0;         // evaluation offset realizing tau_y
    double global_phase_ = 0.0;  // seed-drawn stationarizing shift
    std::vector<double> phases_;  // RandomPhase: one per mode
};

MediumSample sample_medium(const MediumSpec& spec, std::uint64_t seed);
MediumSample shift_medium(const MediumSample& m, double y);

// Measures |sigma| bound, finite-difference slopes and clamp-range
// violations on the probe grid.
VerificationReport validate_medium(const MediumSample& m, std::span<const double> probe_grid);

}  // namespace hjhom
