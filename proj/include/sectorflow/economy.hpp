#pragma once

#include <span>
#include <vector>

#include "sectorflow/distribution.hpp"
#include "sectorflow/grid.hpp"
#include "sectorflow/params.hpp"
#include "sectorflow/profiles.hpp"

namespace sectorflow {

// Midpoint quadrature h * sum(f) over the periodic grid. Exact for the
// discrete mass and spectrally accurate for smooth periodic integrands.
double sector_integral(std::span<const double> f, const CircleGrid& grid);

// Technology field entering the mobile-variant formulas. Identity for
// symmetric preferences; gamma^{sigma/(sigma-1)} * A0 for the non-symmetric
// variant, which maps that economy onto the baseline one.
std::vector<double> effective_technology(const SectorProfiles& profiles, const ModelParams& params);

// Market-clearing outcome given the current firm distribution.
struct ShortRunEquilibrium {
    std::vector<double> p;     // goods prices
    std::vector<double> w;     // wages (constant = beta under mobile labour)
    std::vector<double> pi;    // profit rate per firm
    std::vector<double> Y;     // sectoral production value
    std::vector<double> Lused; // sectoral employment
    std::vector<double> l;     // labour per firm, Lused/mu
    std::vector<double> q;     // physical output per firm, Y/(p*mu)
    double P = 0.0;            // price index
    double X = 0.0;            // aggregate consumption, 1/P
    double PiAgg = 0.0;        // aggregate profit rate, = 1-beta
};

// All equilibrium maps share the structure
//     pi(i) = (1-beta) * K(i) * mu(i)^e / Z,   Z = h * sum K * mu^{e+1},
// with variant-specific K, e, and price-index exponent. This precomputed form
// is what the time stepper evaluates once per step.
class EquilibriumModel {
public:
    EquilibriumModel(const SectorProfiles& profiles, const ModelParams& params, const CircleGrid& grid);

    const CircleGrid& grid() const { return grid_; }
    const ModelParams& params() const { return params_; }
    double mu_exponent() const { return e_; }

    // Fast path: fills pi (size cells) and the aggregates. mu_pow_e is scratch
    // of size cells and holds mu^e on return.
    struct Core {
        double Z = 0.0;
        double X = 0.0;
        double F = 0.0;
    };
    Core core(const double* mu, double* mu_pow_e, double* pi) const;

    double z_of(const double* mu, double* scratch) const;
    double x_of_z(double Z) const;
    double f_of_z(double Z) const;

    // Convenience wrappers building the full equilibrium object.
    ShortRunEquilibrium full(const FirmDistribution& mu) const;

private:
    CircleGrid grid_;
    ModelParams params_;
    std::vector<double> K_;       // pi kernel
    std::vector<double> Cp_;      // price kernel: p = Cp * mu^{pe} * Z^{pz}
    std::vector<double> L_;       // immobile labour endowment (empty if mobile)
    double e_ = 0.0;              // mu exponent in pi
    double pe_ = 0.0;             // mu exponent in p
    double pz_ = 0.0;             // Z exponent in p
    double x_exp_ = 0.0;          // X = Z^{x_exp}
    double f_pref_ = 0.0;         // F = f_pref * log X
};

// Normalizing integral in the profit denominator:
//   mobile:   Z = integral [Atilde * mu^{1-beta+eta}]^{(sigma-1)/rho}
//   immobile: Z = integral [A0 * L^beta * mu^{1+eta-beta}]^{(sigma-1)/sigma}
double z_integral(const FirmDistribution& mu, const SectorProfiles& profiles,
                  const ModelParams& params, const CircleGrid& grid);

ShortRunEquilibrium short_run_equilibrium(const FirmDistribution& mu, const SectorProfiles& profiles,
                                          const ModelParams& params, const CircleGrid& grid);

inline double aggregate_consumption(const ShortRunEquilibrium& eq) { return eq.X; }

// Gradient-flow functional F = ((1-beta)/(1-beta+eta)) * log X; reduces to
// log X when eta = 0.
double functional_F(const FirmDistribution& mu, const SectorProfiles& profiles,
                    const ModelParams& params, const CircleGrid& grid);

} // namespace sectorflow
