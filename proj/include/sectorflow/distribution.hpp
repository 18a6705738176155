#pragma once

#include <vector>

#include "sectorflow/grid.hpp"

namespace sectorflow {

// Strictly positive density over the grid cells with unit mass h*sum(mu) = 1.
// Values at or below the 1e-14 floor are rejected, not clamped: the dynamics
// keep strictly positive solutions, so a violation signals a solver bug.
struct FirmDistribution {
    std::vector<double> mu;

    static constexpr double positivity_floor = 1e-14;
    static constexpr double mass_tolerance = 1e-12;

    static FirmDistribution uniform(const CircleGrid& grid);

    // Scales the values to unit mass, then validates.
    static FirmDistribution normalized(std::vector<double> values, const CircleGrid& grid);

    // Takes the values as-is and validates mass within 1e-12.
    static FirmDistribution from_density(std::vector<double> values, const CircleGrid& grid);

    double mass(const CircleGrid& grid) const;
    void validate(const CircleGrid& grid) const;
};

} // namespace sectorflow
