#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "sectorflow/distribution.hpp"
#include "sectorflow/grid.hpp"

namespace sectorflow {

// Deterministic standard normal draws; Box-Muller on top of mt19937_64 keeps
// the stream identical across standard libraries.
class NormalSampler {
public:
    explicit NormalSampler(std::uint64_t seed) : rng_(seed) {}

    double operator()() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = std::generate_canonical<double, 53>(rng_);
        double u2 = std::generate_canonical<double, 53>(rng_);
        while (u1 <= 1e-300) u1 = std::generate_canonical<double, 53>(rng_);
        double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * M_PI * u2);
        have_spare_ = true;
        return r * std::cos(2.0 * M_PI * u2);
    }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// Strictly positive smooth density: exponentiated random Fourier field over
// the first `harmonics` modes, normalized to unit mass. Coefficient scale
// decays as amplitude/k.
FirmDistribution random_fourier_density(const CircleGrid& grid, std::uint64_t seed,
                                        double amplitude = 0.35, int harmonics = 8);

// Positive field (not mass-normalized) with mean level 1, same construction.
std::vector<double> random_fourier_field(const CircleGrid& grid, std::uint64_t seed,
                                         double amplitude = 0.35, int harmonics = 8);

} // namespace sectorflow
