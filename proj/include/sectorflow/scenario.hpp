#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "sectorflow/distribution.hpp"
#include "sectorflow/profiles.hpp"
#include "sectorflow/solver.hpp"

namespace sectorflow {

// Flat key = value scenario document ('#' comments). Unknown keys are
// rejected by name. Profile fields take one of
//   constant:<v> | sin:<amp>,<phase>,<offset> | step:<v1>,<v2> | csv:<path>
// and mu0 additionally accepts uniform | inv_labor | random:<seed> |
// fixedcost:<alpha> | steady.
struct ScenarioConfig {
    std::string variant = "mobile";
    double beta = 0.86;
    double sigma = 1.3144;
    double eta = 0.0;
    double n = 1.0;
    double c0 = 0.0;
    int cells = 512;
    double t_end = 2.0;
    double snapshot_every = 0.01;
    double cfl = 0.4;
    long max_steps = 50'000'000;
    std::uint64_t seed = 1;
    std::string A0 = "constant:1";
    std::string L;
    std::string gamma;
    std::string mu0;
    std::string output_dir = "out";
    double alpha = 0.8;      // fixedcost subcommand
    double jko_dt = 1e-3;    // jko subcommand
    int jko_steps = 10;

    static ScenarioConfig from_file(const std::string& path);
    static ScenarioConfig from_string(const std::string& text);
};

// Materialized scenario. L is normalized to unit mass and gamma to mass n at
// build time, matching the invariants the equilibrium maps require.
struct Scenario {
    CircleGrid grid;
    ModelParams params;
    SectorProfiles profiles;
    FirmDistribution mu0;
    SolverConfig solver;
    std::uint64_t seed = 1;
};

std::vector<double> build_profile(const std::string& spec, const CircleGrid& grid);

Scenario build_scenario(const ScenarioConfig& cfg);

} // namespace sectorflow
