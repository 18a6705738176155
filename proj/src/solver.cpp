#include "sectorflow/solver.hpp"

#include <cmath>

#include "sectorflow/kernels.hpp"

namespace sectorflow {

namespace {

constexpr double dt_floor = 1e-14;

// Shared buffers for one integration; everything sized to the grid once.
struct Workspace {
    std::vector<double> u;    // mu^e scratch
    std::vector<double> pi;
    std::vector<double> v;    // face velocities
    std::vector<double> phi;  // face fluxes
    explicit Workspace(int cells) : u(cells), pi(cells), v(cells), phi(cells) {}
};

double compute_faces(const EquilibriumModel& model, const double* pi, double* v, double c0) {
    const auto& k = kernels::active();
    const std::size_t N = static_cast<std::size_t>(model.grid().cells);
    k.face_velocity(pi, v, 1.0 / model.grid().h, N);
    if (c0 > 0.0) {
        std::size_t active = k.threshold_zero(v, std::sqrt(2.0 * c0), N);
        if (active == 0) return 0.0;
    }
    return k.max_abs(v, N);
}

} // namespace

std::vector<double> velocity_field(const FirmDistribution& mu, const SectorProfiles& profiles,
                                   const ModelParams& params, const CircleGrid& grid) {
    mu.validate(grid);
    EquilibriumModel model(profiles, params, grid);
    Workspace ws(grid.cells);
    model.core(mu.mu.data(), ws.u.data(), ws.pi.data());
    compute_faces(model, ws.pi.data(), ws.v.data(), params.c0);
    return ws.v;
}

FirmDistribution step(const FirmDistribution& mu, const SectorProfiles& profiles,
                      const ModelParams& params, const CircleGrid& grid, double dt) {
    if (!(dt > 0.0)) throw config_error("step: dt must be positive");
    mu.validate(grid);
    EquilibriumModel model(profiles, params, grid);
    Workspace ws(grid.cells);
    const auto& k = kernels::active();
    const std::size_t N = static_cast<std::size_t>(grid.cells);

    model.core(mu.mu.data(), ws.u.data(), ws.pi.data());
    compute_faces(model, ws.pi.data(), ws.v.data(), params.c0);
    k.upwind_flux(mu.mu.data(), ws.v.data(), ws.phi.data(), N);

    FirmDistribution out;
    out.mu.resize(N);
    double mn = k.flux_update(mu.mu.data(), ws.phi.data(), dt / grid.h, out.mu.data(), N);
    if (!std::isfinite(mn)) throw numeric_error("step: non-finite state");
    if (mn <= FirmDistribution::positivity_floor)
        throw step_rejected_error("step: positivity violated, shrink dt");
    return out;
}

double adaptive_dt(const FirmDistribution& mu, const SectorProfiles& profiles,
                   const ModelParams& params, const CircleGrid& grid, const SolverConfig& config) {
    config.validate();
    mu.validate(grid);
    EquilibriumModel model(profiles, params, grid);
    Workspace ws(grid.cells);
    const auto& k = kernels::active();
    model.core(mu.mu.data(), ws.u.data(), ws.pi.data());
    double vmax = compute_faces(model, ws.pi.data(), ws.v.data(), params.c0);
    if (vmax == 0.0) return config.snapshot_every;
    double dmax = std::fabs(model.mu_exponent()) *
                  k.max_val(ws.pi.data(), static_cast<std::size_t>(grid.cells));
    return stability_dt(grid.h, vmax, dmax, config.cfl);
}

double l2_distance(const FirmDistribution& a, const FirmDistribution& b, const CircleGrid& grid) {
    if (a.mu.size() != b.mu.size()) throw config_error("l2_distance: size mismatch");
    return std::sqrt(grid.h * kernels::active().l2_diff_sq(a.mu.data(), b.mu.data(), a.mu.size()));
}

Trajectory simulate(const FirmDistribution& mu0, const SectorProfiles& profiles,
                    const ModelParams& params, const CircleGrid& grid, const SolverConfig& config,
                    const FirmDistribution* reference) {
    config.validate();
    mu0.validate(grid);
    if (reference) reference->validate(grid);
    EquilibriumModel model(profiles, params, grid);
    const auto& k = kernels::active();
    const std::size_t N = static_cast<std::size_t>(grid.cells);
    const bool guard_F = params.c0 == 0.0;
    const double abs_e = std::fabs(model.mu_exponent());

    Workspace ws(grid.cells);
    std::vector<double> cur = mu0.mu;
    std::vector<double> next(N);

    Trajectory traj;
    auto record = [&](double t, const std::vector<double>& state, double F, double X, double dt_last) {
        traj.times.push_back(t);
        traj.snapshots.push_back(FirmDistribution{state});
        traj.F_values.push_back(F);
        traj.X_values.push_back(X);
        traj.mass_error.push_back(std::fabs(grid.h * k.sum(state.data(), N) - 1.0));
        traj.snapshot_dt.push_back(dt_last);
        if (reference)
            traj.l2_to_eq.push_back(std::sqrt(grid.h * k.l2_diff_sq(state.data(), reference->mu.data(), N)));
    };

    EquilibriumModel::Core core_cur = model.core(cur.data(), ws.u.data(), ws.pi.data());
    record(0.0, cur, core_cur.F, core_cur.X, 0.0);
    traj.min_density = k.min_val(cur.data(), N);

    double t = 0.0;
    double dt_last = 0.0;
    long snap_index = 1;
    double next_snap = std::min(config.snapshot_every, config.t_end);

    while (t < config.t_end - 1e-15 * config.t_end) {
        if (traj.steps >= config.max_steps) {
            traj.complete = false;
            throw timeout_error("simulate: max_steps exceeded", std::move(traj));
        }

        double vmax = compute_faces(model, ws.pi.data(), ws.v.data(), params.c0);

        if (vmax == 0.0) {
            // nothing moves (all faces frozen or exactly flat profits): jump
            t = next_snap;
        } else {
            double dmax = abs_e * k.max_val(ws.pi.data(), N);
            double dt = stability_dt(grid.h, vmax, dmax, config.cfl);
            bool clipped = dt >= next_snap - t;
            if (clipped) dt = next_snap - t;

            EquilibriumModel::Core core_next;
            while (true) {
                k.upwind_flux(cur.data(), ws.v.data(), ws.phi.data(), N);
                double mn = k.flux_update(cur.data(), ws.phi.data(), dt / grid.h, next.data(), N);
                if (!std::isfinite(mn)) throw numeric_error("simulate: non-finite state");
                bool ok = mn > FirmDistribution::positivity_floor;
                if (ok) {
                    core_next = model.core(next.data(), ws.u.data(), ws.pi.data());
                    if (guard_F && core_next.F < core_cur.F - 1e-10) ok = false;
                }
                if (ok) break;
                ++traj.rejected_steps;
                dt *= config.positivity_retry_shrink;
                clipped = false;
                if (dt < dt_floor)
                    throw stiffness_error("simulate: dt underflow while restoring positivity/monotonicity");
            }

            cur.swap(next);
            traj.min_step_dF = std::min(traj.min_step_dF, core_next.F - core_cur.F);
            core_cur = core_next;
            ++traj.steps;
            t = clipped ? next_snap : t + dt;
            dt_last = dt;
            traj.dt_history.push_back(dt);
            double merr = std::fabs(grid.h * k.sum(cur.data(), N) - 1.0);
            traj.max_step_mass_error = std::max(traj.max_step_mass_error, merr);
            traj.min_density = std::min(traj.min_density, k.min_val(cur.data(), N));
        }

        if (t >= next_snap - 1e-15) {
            record(next_snap, cur, core_cur.F, core_cur.X, dt_last);
            ++snap_index;
            next_snap = snap_index * config.snapshot_every;
            if (next_snap > config.t_end) next_snap = config.t_end;
        }
    }
    return traj;
}

} // namespace sectorflow
