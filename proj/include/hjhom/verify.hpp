// SPDX-License-Identifier: Apache-2.0
//
// Executable property checks over solver and effective outputs: contraction,
// ordering, monotone preservation, sign reduction, theta continuity, the
// scaling identity, and curve-level claims (sandwich, pins, shift covariance,
// min formula, non-convexity witness).

#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "hjhom/effective.hpp"
#include "hjhom/report.hpp"
#include "hjhom/solver.hpp"

namespace hjhom {

// Sup-norm distance at each time slice nonincreasing up to scheme slack.
// Distances are measured on the common trusted region.
VerificationReport check_contraction(const GridSolution& u1, const GridSolution& u2,
                                     double slack);

// Ordered data stay ordered: u1 <= u2 + tol everywhere on the trusted region.
VerificationReport check_ordering(const GridSolution& u1, const GridSolution& u2, double tol);

VerificationReport check_monotone_preservation(const HamiltonianSpec& h,
                                               std::shared_ptr<const MediumSample> sigma,
                                               const std::function<double(double)>& g,
                                               const SolveConfig& cfg);

// theta >= 0 reduces to the upper piece, theta <= 0 to the lower one.
// Slack is 2x the grid-refinement delta measured on the same instance.
VerificationReport check_sign_reduction(const HamiltonianSpec& h,
                                        std::shared_ptr<const MediumSample> sigma, double theta,
                                        const SolveConfig& cfg);

// Empirical modulus of continuity in theta; pass when the fitted modulus
// extrapolates to 0 within tolerance.
VerificationReport check_theta_continuity(const HamiltonianSpec& h,
                                          std::shared_ptr<const MediumSample> sigma,
                                          const std::vector<std::pair<double, double>>& theta_pairs,
                                          const SolveConfig& cfg, double tol);

// u^eps_theta(t,x) == eps * u_theta(t/eps, x/eps) on the common region.
VerificationReport check_scaling_identity(const HamiltonianSpec& h,
                                          std::shared_ptr<const MediumSample> sigma, double theta,
                                          double eps, const SolveConfig& cfg);

// Curve-level checks.
VerificationReport check_coercivity_sandwich(const EffectiveCurve& c, double tol);
VerificationReport check_pin_values(const ProblemSpec& prob, std::uint64_t seed,
                                    const EffectiveConfig& cfg, double tol);
VerificationReport check_shift_covariance(const ProblemSpec& prob, double p0,
                                          const std::vector<double>& thetas, std::uint64_t seed,
                                          const EffectiveConfig& cfg);
VerificationReport check_min_formula(const EffectiveCurve& direct, const EffectiveCurve& composed,
                                     double tol);
VerificationReport check_nonconvexity_witness(const EffectiveCurve& c);

// Named default suite on small fixtures; deterministic given the seed.
std::vector<VerificationReport> run_suite(std::uint64_t seed, bool broken_flux = false);

void write_reports_jsonl(const std::vector<VerificationReport>& reports, const std::string& path);
std::string summary_table(const std::vector<VerificationReport>& reports);

}  // namespace hjhom
