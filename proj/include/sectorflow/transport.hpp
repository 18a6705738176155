#pragma once

#include <vector>

#include "sectorflow/distribution.hpp"
#include "sectorflow/economy.hpp"
#include "sectorflow/grid.hpp"

namespace sectorflow {

// One matched parcel of mass: source/target cell indices, the mass carried,
// and the signed displacement along the circle it travels.
struct PlanEntry {
    int source = 0;
    int target = 0;
    double mass = 0.0;
    double displacement = 0.0;
};

struct TransportPlan {
    double cost = 0.0; // sum mass * d(source,target)^2 under the arc metric
    std::vector<PlanEntry> entries;
    double shift = 0.0; // optimal quantile-level shift (monotone rearrangement)
};

// Exact quadratic-cost Wasserstein distance on the circle, computed by
// minimizing over the quantile-level shift of the cyclic monotone
// rearrangement; the objective is convex in the shift and is refined by
// golden-section search to 1e-12.
double w2_distance_circle(const FirmDistribution& mu, const FirmDistribution& nu, const CircleGrid& grid);

// Optimal plan of the same problem, with per-parcel masses and displacements.
TransportPlan optimal_plan_circle(const FirmDistribution& mu, const FirmDistribution& nu,
                                  const CircleGrid& grid);

// Minimum reallocation cost RC = d_W2^2 / 2.
double min_reallocation_cost(const FirmDistribution& mu, const FirmDistribution& nu,
                             const CircleGrid& grid);

// Test oracle: exact minimum-cost-flow solution of the dense transportation
// LP with cost d(i,j)^2. Independent of the quantile path. cells <= 32.
TransportPlan brute_force_ot(const FirmDistribution& mu, const FirmDistribution& nu,
                             const CircleGrid& grid);

struct JkoResult {
    FirmDistribution mu;
    bool converged = false;
    int iterations = 0;
    double objective = 0.0; // F(mu) - W2^2(mu, mu0)/(2 dt) at the result
};

// One proximal step mu(t+dt) ~ argmax { F(mu) - d_W2^2(mu, mu(t)) / (2 dt) },
// solved by mirror ascent on the simplex of cell masses with backtracking;
// the transport gradient comes from the Kantorovich potentials of the
// current optimal plan. Requires c0 = 0.
JkoResult jko_step(const FirmDistribution& mu, double dt, const SectorProfiles& profiles,
                   const ModelParams& params, const CircleGrid& grid, int max_iters = 500);

} // namespace sectorflow
