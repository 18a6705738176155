#include "sectorflow/profiles.hpp"

#include <cmath>

#include "sectorflow/errors.hpp"

namespace sectorflow {

namespace {

void check_field(const std::vector<double>& f, int cells, const char* name) {
    if (static_cast<int>(f.size()) != cells)
        throw config_error(std::string("SectorProfiles: ") + name + " has wrong size");
    for (double v : f)
        if (!(v > 0.0) || !std::isfinite(v))
            throw config_error(std::string("SectorProfiles: ") + name + " must be strictly positive and finite");
}

} // namespace

void SectorProfiles::validate(const CircleGrid& grid, const ModelParams& params) const {
    check_field(A0, grid.cells, "A0");
    if (params.variant == Variant::ImmobileLabour) {
        check_field(L, grid.cells, "L");
        double mass = 0.0;
        for (double v : L) mass += v;
        mass *= grid.h;
        if (std::fabs(mass - 1.0) > 1e-8)
            throw config_error("SectorProfiles: L must have unit mass for the immobile variant");
    }
    if (params.variant == Variant::NonSymmetricPreferences) {
        check_field(gamma, grid.cells, "gamma");
        double mass = 0.0;
        for (double v : gamma) mass += v;
        mass *= grid.h;
        if (std::fabs(mass - params.n) > 1e-8)
            throw config_error("SectorProfiles: gamma must integrate to n for the non-symmetric variant");
    }
}

std::vector<double> normalize_mass(std::vector<double> v, const CircleGrid& grid, double target) {
    double mass = 0.0;
    for (double x : v) mass += x;
    mass *= grid.h;
    if (!(mass > 0.0) || !std::isfinite(mass))
        throw config_error("normalize_mass: field has non-positive or non-finite mass");
    double scale = target / mass;
    for (double& x : v) x *= scale;
    return v;
}

} // namespace sectorflow
