#pragma once

#include <vector>

#include "sectorflow/grid.hpp"
#include "sectorflow/params.hpp"

namespace sectorflow {

// Exogenous per-sector fields. L is meaningful only for the immobile variant,
// gamma only for non-symmetric preferences; both stay empty otherwise.
struct SectorProfiles {
    std::vector<double> A0;
    std::vector<double> L;
    std::vector<double> gamma;

    void validate(const CircleGrid& grid, const ModelParams& params) const;
};

// Scales v to unit mass under midpoint quadrature: h * sum = 1.
std::vector<double> normalize_mass(std::vector<double> v, const CircleGrid& grid, double target = 1.0);

} // namespace sectorflow
