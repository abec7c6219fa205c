// SPDX-License-Identifier: Apache-2.0
//
// Pinned piecewise-convex Hamiltonians in min form:
//   H(x,p) = min_i H_i(x,p),
// where each piece is a convex quadratic in p whose coefficients may
// depend on a realized medium b(x). Pins are the crossing momenta where
// the selected piece changes and the value is independent of x.

#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "hjhom/media.hpp"
#include "hjhom/report.hpp"

namespace hjhom {

// Growth/coercivity class parameters: gamma > 1, alpha0, beta0 > 0.
struct ClassParams {
    double gamma = 2.0;
    double alpha0 = 0.4;
    double beta0 = 1.0;

    double alpha(double r) const;  // alpha0 r^gamma - 1/alpha0
    double beta(double r) const;   // beta0 (r^gamma + 1)
    void validate() const;

    nlohmann::json to_json() const;
    static ClassParams from_json(const nlohmann::json& j);
};

// One evaluable piece:
//   H_i(x,p) = p2 p^2 + (p1 + pb b(x)) p + c0 + cb b(x) + vamp cos(2 pi vfreq x)
struct Piece {
    double p2 = 0.5;
    double p1 = 0.0;
    double pb = 0.0;
    double c0 = 0.0;
    double cb = 0.0;
    double vamp = 0.0;
    double vfreq = 1.0;

    double eval(double x, double p, double b) const;
    double dp(double p, double b) const { return 2.0 * p2 * p + p1 + pb * b; }
    // Minimum over [lo, hi] (convex: vertex clamped to the interval).
    double min_on(double x, double lo, double hi, double b) const;

    nlohmann::json to_json() const;
    static Piece from_json(const nlohmann::json& j);
};

enum class XDependence { None, Periodic, StationaryRandom };

struct HamiltonianSpec {
    std::vector<Piece> pieces;          // one more piece than pins
    std::vector<double> pins;           // strictly increasing
    std::vector<double> pinned_values;  // h_i, validated x-independent
    ClassParams cls;
    XDependence x_dependence = XDependence::None;
    bool viscous_allowed = true;
    bool level_set_convex_only = false;
    std::shared_ptr<const MediumSample> medium;  // b field; null means b irrelevant

    double b_at(double x) const { return medium ? medium->value(x) : 0.0; }

    // Piece selection by pin interval. Continuous in p once validated.
    double eval(double x, double p) const;
    // Brute-force min over pieces; equals eval for validated specs.
    double eval_min(double x, double p) const;
    // One-sided p-derivative bound over |p| <= r, for CFL speed estimates.
    double speed_bound(double r) const;

    bool x_independent() const;
    std::size_t piece_index(double p) const;

    nlohmann::json to_json() const;
    static HamiltonianSpec from_json(const nlohmann::json& j,
                                     std::shared_ptr<const MediumSample> medium = nullptr);
};

// H = min{minus, plus}: minus selected below the pin, plus above it.
struct SplitPair {
    HamiltonianSpec minus;
    HamiltonianSpec plus;
    double pin = 0.0;
    double pinned_value = 0.0;
};

// Validates pin agreement (tolerance 1e-12 against x-variation), piece
// convexity, and that min-over-pieces coincides with interval selection.
// Throws SpecError on violation.
HamiltonianSpec build_pinned(std::vector<Piece> pieces, std::vector<double> pins,
                             ClassParams cls,
                             std::shared_ptr<const MediumSample> medium = nullptr);

SplitPair split_at_pin(const HamiltonianSpec& h, std::size_t pin_index);

// H~(x,p) = H(x, p + p0); pins translate by -p0.
HamiltonianSpec shift_pin(const HamiltonianSpec& h, double p0);

// Signed-margin report for the class bounds (i)-(iii) on a probe grid.
VerificationReport validate_class(const HamiltonianSpec& h, std::span<const double> xs,
                                  std::span<const double> ps);

}  // namespace hjhom
