#pragma once

#include <cstdint>
#include <vector>

#include "sectorflow/distribution.hpp"
#include "sectorflow/economy.hpp"
#include "sectorflow/grid.hpp"
#include "sectorflow/solver.hpp"

namespace sectorflow {

// Closed-form stationary distribution of the profit-seeking dynamics:
//   mobile:   mu ~ Atilde^{(sigma-1)/(1-eta(sigma-1))}
//   immobile: mu ~ [A0 L^beta]^{(sigma-1)/((beta-eta)(sigma-1)+1)}
FirmDistribution steady_state(const SectorProfiles& profiles, const ModelParams& params,
                              const CircleGrid& grid);

// Long-run aggregate consumption in closed form; agrees with running the
// short-run equilibrium at the steady state.
double equilibrium_consumption(const SectorProfiles& profiles, const ModelParams& params,
                               const CircleGrid& grid);

struct WelfareReport {
    int trials = 0;
    int violations = 0;
    double max_violation = 0.0; // most positive X(mu) - X(mu_eq), or its mirror
    double x_eq = 0.0;
    bool equilibrium_maximizes = true; // false when eta < beta-1 (X minimized)
};

// Draws `trials` random feasible densities and checks that the steady state
// attains the extremal consumption: maximal when eta > beta-1, minimal when
// eta < beta-1.
WelfareReport check_first_welfare(const SectorProfiles& profiles, const ModelParams& params,
                                  const CircleGrid& grid, int trials, std::uint64_t rng_seed);

// Long-run consumption loss from labour immobility,
//   dX = (int A0^{gA})^{1/gA} - (int [A0 L^beta]^{gB})^{1/gB},
// gA = (sigma-1)/(1-eta(sigma-1)), gB = (sigma-1)/(1+(beta-eta)(sigma-1)).
double efficiency_loss(const SectorProfiles& profiles, const ModelParams& params,
                       const CircleGrid& grid);

// L*(i) = A0^{gA} / int A0^{gA}: the allocation that drives the loss to zero.
std::vector<double> optimal_labor_allocation(const SectorProfiles& profiles,
                                             const ModelParams& params, const CircleGrid& grid);

struct ConvergenceFit {
    double C1 = 0.0;
    double C2 = 0.0;
    double r_squared = 0.0;
    double t_lo = 0.0;
    double t_hi = 0.0;
    int points = 0;
};

// Least-squares fit of log ||mu(t) - mu_eq|| over the middle 60% of the decay
// (measured in log-distance range, which drops the initial transient and the
// floating-point floor).
ConvergenceFit fit_convergence_rate(const Trajectory& traj);

// Cell-averaged discretization of the singular density C_a/i^a on (0,1/2],
// mirrored on (1/2,1); exact per-cell masses from the antiderivative.
FirmDistribution fixed_cost_example(double alpha, const CircleGrid& grid, const ModelParams& params);

// Smallest c0 for which the example density is stationary:
// c0 = (max_x d_x pi)^2 / 2, with the maximum attained at x = 1/2.
double fixed_cost_threshold(double alpha, const ModelParams& params);

// true iff max over faces of |d_i pi| <= sqrt(2 c0) + 1e-12.
bool stationarity_check(const FirmDistribution& mu, const SectorProfiles& profiles,
                        const ModelParams& params, const CircleGrid& grid);

} // namespace sectorflow
