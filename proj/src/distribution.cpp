#include "sectorflow/distribution.hpp"

#include <cmath>

#include "sectorflow/errors.hpp"

namespace sectorflow {

FirmDistribution FirmDistribution::uniform(const CircleGrid& grid) {
    return FirmDistribution{std::vector<double>(grid.cells, 1.0 / grid.n)};
}

FirmDistribution FirmDistribution::normalized(std::vector<double> values, const CircleGrid& grid) {
    double mass = 0.0;
    for (double v : values) mass += v;
    mass *= grid.h;
    if (!(mass > 0.0) || !std::isfinite(mass))
        throw config_error("FirmDistribution: cannot normalize non-positive mass");
    for (double& v : values) v /= mass;
    FirmDistribution d{std::move(values)};
    d.validate(grid);
    return d;
}

FirmDistribution FirmDistribution::from_density(std::vector<double> values, const CircleGrid& grid) {
    FirmDistribution d{std::move(values)};
    d.validate(grid);
    return d;
}

double FirmDistribution::mass(const CircleGrid& grid) const {
    double s = 0.0;
    for (double v : mu) s += v;
    return s * grid.h;
}

void FirmDistribution::validate(const CircleGrid& grid) const {
    if (static_cast<int>(mu.size()) != grid.cells)
        throw config_error("FirmDistribution: size does not match grid");
    for (double v : mu) {
        if (!std::isfinite(v)) throw numeric_error("FirmDistribution: non-finite density value");
        if (v <= positivity_floor) throw config_error("FirmDistribution: density at or below positivity floor");
    }
    if (std::fabs(mass(grid) - 1.0) > mass_tolerance)
        throw config_error("FirmDistribution: mass deviates from 1 beyond tolerance");
}

} // namespace sectorflow
