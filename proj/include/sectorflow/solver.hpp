#pragma once

#include <limits>
#include <vector>

#include "sectorflow/distribution.hpp"
#include "sectorflow/economy.hpp"
#include "sectorflow/errors.hpp"

namespace sectorflow {

struct SolverConfig {
    double cfl = 0.4;                      // stability safety factor
    double t_end = 2.0;
    double snapshot_every = 0.01;
    long max_steps = 50'000'000;
    double positivity_retry_shrink = 0.5;

    void validate() const {
        if (!(cfl > 0.0 && cfl <= 1.0)) throw config_error("SolverConfig: cfl must lie in (0,1]");
        if (!(t_end > 0.0)) throw config_error("SolverConfig: t_end must be positive");
        if (!(snapshot_every > 0.0)) throw config_error("SolverConfig: snapshot_every must be positive");
        if (max_steps <= 0) throw config_error("SolverConfig: max_steps must be positive");
        if (!(positivity_retry_shrink > 0.0 && positivity_retry_shrink < 1.0))
            throw config_error("SolverConfig: positivity_retry_shrink must lie in (0,1)");
    }
};

struct Trajectory {
    std::vector<double> times;
    std::vector<FirmDistribution> snapshots;
    std::vector<double> F_values;
    std::vector<double> X_values;
    std::vector<double> mass_error; // |h*sum(mu) - 1| at the recorded time
    std::vector<double> l2_to_eq;   // empty unless a reference was supplied
    std::vector<double> snapshot_dt; // last accepted dt before each record
    std::vector<double> dt_history;  // every accepted dt

    long steps = 0;
    long rejected_steps = 0;
    double min_step_dF = std::numeric_limits<double>::infinity();
    double max_step_mass_error = 0.0;
    double min_density = std::numeric_limits<double>::infinity();
    bool complete = true;
};

// Time integration hit max_steps; carries what was computed so far.
class timeout_error : public std::runtime_error {
public:
    timeout_error(const std::string& msg, Trajectory partial_)
        : std::runtime_error(msg), partial(std::move(partial_)) {}
    Trajectory partial;
};

// Positivity could not be restored by shrinking dt.
class step_rejected_error : public numeric_error {
public:
    explicit step_rejected_error(const std::string& msg) : numeric_error(msg) {}
};

// Firm velocity at the cell faces: v_{j+1/2} = (pi_{j+1} - pi_j)/h with
// periodic wrap. With a fixed reallocation cost c0 > 0, faces where
// |v| <= sqrt(2*c0) are zeroed (no move).
std::vector<double> velocity_field(const FirmDistribution& mu, const SectorProfiles& profiles,
                                   const ModelParams& params, const CircleGrid& grid);

// One conservative donor-cell update. Throws step_rejected_error when the
// update would push a cell to or below the positivity floor.
FirmDistribution step(const FirmDistribution& mu, const SectorProfiles& profiles,
                      const ModelParams& params, const CircleGrid& grid, double dt);

// cfl * min( h/max|v| , h^2/(2*D_max) ) with D_max = max_j |e| * pi_j, the
// coefficient of the diffusion the self-advection by d_i(pi) induces.
// Returns the snapshot interval when every face velocity vanishes.
double adaptive_dt(const FirmDistribution& mu, const SectorProfiles& profiles,
                   const ModelParams& params, const CircleGrid& grid, const SolverConfig& config);

inline double stability_dt(double h, double vmax, double dmax, double cfl) {
    double adv = vmax > 0.0 ? h / vmax : std::numeric_limits<double>::infinity();
    double dif = dmax > 0.0 ? h * h / (2.0 * dmax) : std::numeric_limits<double>::infinity();
    return cfl * std::min(adv, dif);
}

// Integrates mu0 to t_end with adaptive steps, positivity retry, and (for
// c0 = 0) a monotone-F guard. Snapshot times are hit exactly by clipping dt.
Trajectory simulate(const FirmDistribution& mu0, const SectorProfiles& profiles,
                    const ModelParams& params, const CircleGrid& grid, const SolverConfig& config,
                    const FirmDistribution* reference = nullptr);

// sqrt(h * sum (a-b)^2), the discrete L2 distance used across modules.
double l2_distance(const FirmDistribution& a, const FirmDistribution& b, const CircleGrid& grid);

} // namespace sectorflow
