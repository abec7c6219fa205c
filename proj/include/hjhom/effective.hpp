// SPDX-License-Identifier: Apache-2.0
//
// Effective Hamiltonian estimation: H_bar(theta) = lim_{eps->0} -u^eps_theta(1,0),
// with Richardson extrapolation along an epsilon ladder, an ergodic-average
// alternative, ensemble statistics over media seeds, and min composition.

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "hjhom/hamiltonian.hpp"
#include "hjhom/media.hpp"
#include "hjhom/solver.hpp"
#include "hjhom/stats.hpp"

namespace hjhom {

// A solvable problem: Hamiltonian shape plus the media laws it samples.
// Binding a seed realizes one omega.
struct ProblemSpec {
    std::vector<Piece> pieces;
    std::vector<double> pins;
    ClassParams cls;
    std::optional<MediumSpec> b_medium;      // referenced by pieces with pb/cb
    std::optional<MediumSpec> sigma_medium;  // diffusion root; nullopt => A == 0
    bool level_set_convex_only = false;

    HamiltonianSpec hamiltonian(std::uint64_t seed) const;
    std::shared_ptr<const MediumSample> sigma(std::uint64_t seed) const;

    nlohmann::json to_json() const;
    static ProblemSpec from_json(const nlohmann::json& j);
};

struct EffectiveConfig {
    std::vector<double> eps_ladder = {0.25, 0.125, 0.0625, 0.03125, 0.015625};
    double dx_over_eps = 1.0 / 32.0;  // dx tied to eps so oscillations stay resolved
    double fixed_dx = 0.0;            // > 0 overrides the tie
    SolveConfig base;                 // epsilon/dx overridden per ladder point
    bool refine_check = false;        // extra dx/2 solve at the finest eps

    nlohmann::json to_json() const;
    static EffectiveConfig from_json(const nlohmann::json& j);
};

enum class EstimatorMethod { ScalingLimit, ErgodicAverage };

struct EffectiveEstimate {
    double theta = 0.0;
    std::vector<std::pair<double, double>> values_by_epsilon;  // (eps, -u^eps(1,0))
    double extrapolated = 0.0;
    double error_bar = 0.0;
    std::uint64_t seed = 0;
    EstimatorMethod method = EstimatorMethod::ScalingLimit;
    bool converged = true;
    std::string diagnostic;  // "no-convergence" when the ladder misbehaves
};

EffectiveEstimate effective_at(const ProblemSpec& prob, double theta, std::uint64_t seed,
                               const EffectiveConfig& cfg);

// Unscaled run: w_theta solves the eps = 1 problem with Hamiltonian
// H(x, theta + .) and zero datum; returns -w_theta(T,0)/T.
EffectiveEstimate ergodic_estimate(const ProblemSpec& prob, double theta, std::uint64_t seed,
                                   double t_horizon, const EffectiveConfig& cfg);

struct EnsembleStats {
    std::vector<EffectiveEstimate> per_seed;
    std::vector<double> eps;
    std::vector<double> mean_by_eps;
    std::vector<double> sd_by_eps;
    KendallResult sd_trend;  // decreasing-sd trend along the ladder
    double mean_extrapolated = 0.0;
    double sd_extrapolated = 0.0;
};

EnsembleStats ensemble_effective(const ProblemSpec& prob, double theta,
                                 const std::vector<std::uint64_t>& seeds,
                                 const EffectiveConfig& cfg);

struct EffectiveCurve {
    std::vector<double> thetas;
    std::vector<EffectiveEstimate> estimates;
    std::vector<double> alpha_env, beta_env;  // coercivity envelopes on the grid
    bool convex_flag = true;
    bool level_set_convex_flag = true;
    std::size_t seed_count = 1;

    double value(std::size_t i) const { return estimates[i].extrapolated; }
    double err(std::size_t i) const { return estimates[i].error_bar; }
};

EffectiveCurve effective_curve(const ProblemSpec& prob, const std::vector<double>& thetas,
                               const std::vector<std::uint64_t>& seeds, const EffectiveConfig& cfg);

// Pointwise min with error bars propagated as the max of the two near crossings.
EffectiveCurve min_compose(const EffectiveCurve& a, const EffectiveCurve& b);

void write_curve_csv(const EffectiveCurve& c, const std::string& path);

}  // namespace hjhom
