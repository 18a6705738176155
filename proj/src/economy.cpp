#include "sectorflow/economy.hpp"

#include <cmath>

#include "sectorflow/errors.hpp"
#include "sectorflow/kernels.hpp"

namespace sectorflow {

double sector_integral(std::span<const double> f, const CircleGrid& grid) {
    if (static_cast<int>(f.size()) != grid.cells)
        throw config_error("sector_integral: size does not match grid");
    double s = 0.0;
    for (double v : f) {
        if (!std::isfinite(v)) throw numeric_error("sector_integral: non-finite integrand");
        s += v;
    }
    return s * grid.h;
}

std::vector<double> effective_technology(const SectorProfiles& profiles, const ModelParams& params) {
    if (params.variant != Variant::NonSymmetricPreferences) return profiles.A0;
    if (profiles.gamma.size() != profiles.A0.size())
        throw config_error("effective_technology: non-symmetric variant needs a gamma profile");
    const double ex = params.sigma / (params.sigma - 1.0);
    std::vector<double> a(profiles.A0.size());
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::pow(profiles.gamma[i], ex) * profiles.A0[i];
    return a;
}

// ---------------------------------------------------------------------------
// EquilibriumModel
// ---------------------------------------------------------------------------

EquilibriumModel::EquilibriumModel(const SectorProfiles& profiles, const ModelParams& params,
                                   const CircleGrid& grid)
    : grid_(grid), params_(params) {
    params_.validate();
    profiles.validate(grid, params);
    if (grid.cells < 8) throw config_error("EquilibriumModel: need at least 8 cells");
    if (std::fabs(params.n - grid.n) > 1e-12 * params.n)
        throw config_error("EquilibriumModel: params.n and grid circumference disagree");

    const double beta = params.beta;
    const double sigma = params.sigma;
    const double eta = params.eta;
    const int N = grid.cells;
    K_.resize(N);
    Cp_.resize(N);
    f_pref_ = (1.0 - beta) / (1.0 - beta + eta);

    if (params.mobile()) {
        const double rho = params.rho();
        const std::vector<double> Atil = effective_technology(profiles, params);
        for (int j = 0; j < N; ++j) {
            K_[j] = std::pow(Atil[j], (sigma - 1.0) / rho);
            Cp_[j] = std::pow(Atil[j], -1.0 / rho);
        }
        e_ = (eta * (sigma - 1.0) - 1.0) / rho;
        pe_ = -(1.0 - beta + eta) / rho;
        pz_ = -(1.0 - beta);
        x_exp_ = rho / (sigma - 1.0);
    } else {
        L_ = profiles.L;
        for (int j = 0; j < N; ++j) {
            const double base = profiles.A0[j] * std::pow(L_[j], beta);
            K_[j] = std::pow(base, (sigma - 1.0) / sigma);
            Cp_[j] = std::pow(base, -1.0 / sigma);
        }
        e_ = ((eta - beta) * (sigma - 1.0) - 1.0) / sigma;
        pe_ = -(1.0 + eta - beta) / sigma;
        pz_ = -1.0;
        x_exp_ = sigma / (sigma - 1.0);
    }
}

EquilibriumModel::Core EquilibriumModel::core(const double* mu, double* mu_pow_e, double* pi) const {
    const auto& k = kernels::active();
    const std::size_t N = static_cast<std::size_t>(grid_.cells);
    k.pow_field(mu, mu_pow_e, e_, N);
    const double Z = grid_.h * k.triple_sum(K_.data(), mu_pow_e, mu, N);
    if (!(Z > 0.0) || !std::isfinite(Z))
        throw numeric_error("short_run_equilibrium: normalizing integral not positive-finite");
    if (pi) k.mul3(K_.data(), mu_pow_e, (1.0 - params_.beta) / Z, pi, N);
    Core c;
    c.Z = Z;
    c.X = x_of_z(Z);
    c.F = f_of_z(Z);
    return c;
}

double EquilibriumModel::z_of(const double* mu, double* scratch) const {
    const auto& k = kernels::active();
    const std::size_t N = static_cast<std::size_t>(grid_.cells);
    k.pow_field(mu, scratch, e_, N);
    double Z = grid_.h * k.triple_sum(K_.data(), scratch, mu, N);
    if (!(Z > 0.0) || !std::isfinite(Z))
        throw numeric_error("z_integral: result not positive-finite");
    return Z;
}

double EquilibriumModel::x_of_z(double Z) const { return std::pow(Z, x_exp_); }

double EquilibriumModel::f_of_z(double Z) const { return f_pref_ * x_exp_ * std::log(Z); }

ShortRunEquilibrium EquilibriumModel::full(const FirmDistribution& mu) const {
    mu.validate(grid_);
    const int N = grid_.cells;
    ShortRunEquilibrium eq;
    eq.pi.resize(N);
    std::vector<double> u(N);
    const Core c = core(mu.mu.data(), u.data(), eq.pi.data());

    eq.P = std::pow(c.Z, -x_exp_);
    eq.X = c.X;

    eq.Y.resize(N);
    const double inv_b = 1.0 / (1.0 - params_.beta);
    for (int j = 0; j < N; ++j) eq.Y[j] = eq.pi[j] * mu.mu[j] * inv_b;

    // prices p = Cp * mu^{pe} * Z^{pz}, then per-firm quantities
    eq.p.resize(N);
    const double zp = std::pow(c.Z, pz_);
    for (int j = 0; j < N; ++j) eq.p[j] = Cp_[j] * std::pow(mu.mu[j], pe_) * zp;

    eq.w.resize(N);
    eq.Lused.resize(N);
    if (params_.mobile()) {
        for (int j = 0; j < N; ++j) {
            eq.Lused[j] = eq.Y[j];
            eq.w[j] = params_.beta;
        }
    } else {
        for (int j = 0; j < N; ++j) {
            eq.Lused[j] = L_[j];
            eq.w[j] = params_.beta * eq.Y[j] / L_[j];
        }
    }

    eq.l.resize(N);
    eq.q.resize(N);
    for (int j = 0; j < N; ++j) {
        eq.l[j] = eq.Lused[j] / mu.mu[j];
        eq.q[j] = eq.Y[j] / (eq.p[j] * mu.mu[j]);
    }

    eq.PiAgg = grid_.h * kernels::active().dot(eq.pi.data(), mu.mu.data(), static_cast<std::size_t>(N));

    for (int j = 0; j < N; ++j) {
        if (!std::isfinite(eq.p[j]) || !std::isfinite(eq.pi[j]) || !std::isfinite(eq.w[j]))
            throw numeric_error("short_run_equilibrium: non-finite field");
    }
    return eq;
}

// ---------------------------------------------------------------------------
// Free-function entry points
// ---------------------------------------------------------------------------

double z_integral(const FirmDistribution& mu, const SectorProfiles& profiles,
                  const ModelParams& params, const CircleGrid& grid) {
    mu.validate(grid);
    EquilibriumModel model(profiles, params, grid);
    std::vector<double> scratch(grid.cells);
    return model.z_of(mu.mu.data(), scratch.data());
}

ShortRunEquilibrium short_run_equilibrium(const FirmDistribution& mu, const SectorProfiles& profiles,
                                          const ModelParams& params, const CircleGrid& grid) {
    EquilibriumModel model(profiles, params, grid);
    return model.full(mu);
}

double functional_F(const FirmDistribution& mu, const SectorProfiles& profiles,
                    const ModelParams& params, const CircleGrid& grid) {
    mu.validate(grid);
    EquilibriumModel model(profiles, params, grid);
    std::vector<double> scratch(grid.cells);
    return model.f_of_z(model.z_of(mu.mu.data(), scratch.data()));
}

} // namespace sectorflow
