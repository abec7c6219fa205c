// SPDX-License-Identifier: Apache-2.0
//
// Independent reference solutions for analytically tractable subcases.
// These deliberately share no code with the solver path.

#pragma once

#include <functional>
#include <string>

#include "hjhom/hamiltonian.hpp"

namespace hjhom {

struct OracleResult {
    double value = 0.0;
    std::string method;
    double tolerance = 0.0;  // achieved by internal refinement
};

struct OracleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using ScalarFn = std::function<double(double)>;

// Legendre transform of an x-independent convex H, evaluated numerically:
// L(q) = sup_p (p q - H(p)).
ScalarFn legendre_transform(const HamiltonianSpec& h, double p_radius = 64.0);

// Hopf-Lax: inf_y [ g(y) + t L((x - y)/t) ] for convex superlinear L.
OracleResult hopf_lax(const ScalarFn& g, const ScalarFn& lagrangian, double t, double x,
                      double y_radius = 64.0, double tol = 1e-8);

// Effective Hamiltonian of H(x,p) = p^2/2 + V(x) with 1-periodic V, A = 0:
// lambda with |theta| = integral_0^1 sqrt(2 (lambda - V)) dx for lambda >= max V,
// and lambda = max V on the flat piece.
OracleResult periodic_cell_effective(const ScalarFn& potential, double theta, double tol = 1e-8);

// x-independent H: the effective Hamiltonian is H itself.
OracleResult constant_coeff_effective(const HamiltonianSpec& h, double theta);

}  // namespace hjhom
