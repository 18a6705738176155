#pragma once

#include <cmath>
#include <vector>

#include "sectorflow/errors.hpp"

namespace sectorflow {

// Uniform periodic grid on the circle of circumference n. Cell j covers
// [j*h, (j+1)*h) with its value carried at the center (j+1/2)*h.
struct CircleGrid {
    int cells = 0;
    double n = 1.0;
    double h = 0.0;

    CircleGrid() = default;
    // Transport routines run on any grid with >= 2 cells; the PDE and
    // equilibrium maps additionally require >= 8 (checked there).
    CircleGrid(int cells_, double n_) : cells(cells_), n(n_), h(n_ / cells_) {
        if (cells < 2) throw config_error("CircleGrid: need at least 2 cells");
        if (!(n > 0.0) || !std::isfinite(n)) throw config_error("CircleGrid: circumference must be positive");
    }

    double center(int j) const { return (static_cast<double>(j) + 0.5) * h; }

    std::vector<double> centers() const {
        std::vector<double> c(cells);
        for (int j = 0; j < cells; ++j) c[j] = center(j);
        return c;
    }

    // Arc-length metric: min(|a-b|, n-|a-b|).
    double arc_distance(double a, double b) const {
        double d = std::fabs(a - b);
        d = std::fmod(d, n);
        return std::min(d, n - d);
    }

    int wrap(int j) const {
        int m = j % cells;
        return m < 0 ? m + cells : m;
    }

    bool operator==(const CircleGrid& o) const { return cells == o.cells && n == o.n; }
    bool operator!=(const CircleGrid& o) const { return !(*this == o); }
};

} // namespace sectorflow
