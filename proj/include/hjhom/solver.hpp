// SPDX-License-Identifier: Apache-2.0
//
// Monotone finite-difference solver for
//   u_t - eps A(x/eps) u_xx + H(x/eps, u_x) = 0   on [-L, L],
// first order in time, Godunov (or local Lax-Friedrichs) flux for the
// Hamiltonian, implicit-explicit centered diffusion.

#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "json.hpp"

#include "hjhom/hamiltonian.hpp"
#include "hjhom/media.hpp"

namespace hjhom {

enum class Scheme { Godunov, LocalLaxFriedrichs };
enum class Boundary { GradientExtrapolation, FrozenLinear };
enum class DiffusionStepping { Explicit, Imex };

struct SolveConfig {
    double epsilon = 1.0;
    double half_width = 0.0;  // 0 => auto-sized from the gradient bound
    double dx = 1.0 / 256.0;
    double t_final = 1.0;
    double cfl_safety = 0.9;
    Scheme scheme = Scheme::Godunov;
    Boundary boundary = Boundary::GradientExtrapolation;
    DiffusionStepping diffusion = DiffusionStepping::Imex;
    int snapshots = 9;        // <= 0 stores every step (small grids only)
    bool parallel = true;     // OpenMP space loops vs serial reference kernel
    double grad_bound = 0.0;  // 0 => derived from the data and coercivity
    bool broken_flux = false; // fault injection: deliberately non-monotone flux

    nlohmann::json to_json() const;
    static SolveConfig from_json(const nlohmann::json& j);
};

struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct CflError : SolverError {
    using SolverError::SolverError;
};
struct BoundaryInfluenceError : SolverError {
    using SolverError::SolverError;
};

struct GridSolution {
    std::vector<double> xs;
    std::vector<double> times;                // snapshot times
    std::vector<std::vector<double>> values;  // one slice per snapshot time
    std::vector<double> center_times;         // u(t, 0) at every step
    std::vector<double> center_values;

    double dx = 0.0, dt = 0.0, epsilon = 1.0, half_width = 0.0;
    double influence_speed = 0.0;     // domain-of-influence speed bound
    double trusted_half_width = 0.0;  // |x| below this is boundary-clean at t_final
    double measured_lipschitz = 0.0;  // max slope over snapshots (condition (L) proxy)
    double growth_bound = 0.0;        // max |u(t,x) - u(0,x)| (K* proxy)

    double value(double t, double x) const;   // interpolated on snapshots
    double center_value(double t) const;      // interpolated on the step series
    double final_center() const { return center_values.back(); }
    const std::vector<double>& slice(std::size_t k) const { return values[k]; }
};

// Interval min/max numerical Hamiltonian; exact for quadratic pieces.
double godunov_flux(const HamiltonianSpec& h, double x, double p_minus, double p_plus);

// Coercivity-based a priori bound on |u_x| for Lipschitz data: the smallest
// R with min_x H(x, +-R) clearing max_{|p|<=lip_g} H by a unit margin.
double gradient_bound(const HamiltonianSpec& h, double lip_g);

GridSolution solve(const HamiltonianSpec& h, const MediumSample* sigma,
                   const std::function<double(double)>& g, const SolveConfig& cfg);

// Linear datum g(x) = theta x; fills grad_bound automatically.
GridSolution solve_linear_datum(const HamiltonianSpec& h, const MediumSample* sigma, double theta,
                                SolveConfig cfg);

void write_csv(const GridSolution& sol, const std::string& path);

}  // namespace hjhom
