#include "sectorflow/random_fields.hpp"

#include <cmath>

namespace sectorflow {

std::vector<double> random_fourier_field(const CircleGrid& grid, std::uint64_t seed,
                                         double amplitude, int harmonics) {
    NormalSampler normal(seed);
    std::vector<double> a(harmonics), b(harmonics);
    for (int k = 0; k < harmonics; ++k) {
        double s = amplitude / (k + 1);
        a[k] = s * normal();
        b[k] = s * normal();
    }
    std::vector<double> f(grid.cells);
    for (int j = 0; j < grid.cells; ++j) {
        double x = grid.center(j) / grid.n;
        double g = 0.0;
        for (int k = 0; k < harmonics; ++k) {
            double w = 2.0 * M_PI * (k + 1) * x;
            g += a[k] * std::cos(w) + b[k] * std::sin(w);
        }
        f[j] = std::exp(g);
    }
    return f;
}

FirmDistribution random_fourier_density(const CircleGrid& grid, std::uint64_t seed,
                                        double amplitude, int harmonics) {
    return FirmDistribution::normalized(random_fourier_field(grid, seed, amplitude, harmonics), grid);
}

} // namespace sectorflow
