#include "sectorflow/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "sectorflow/csv.hpp"
#include "sectorflow/equilibrium.hpp"
#include "sectorflow/errors.hpp"
#include "sectorflow/random_fields.hpp"

namespace sectorflow {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double num(const std::string& key, const std::string& value) {
    char* end = nullptr;
    double v = std::strtod(value.c_str(), &end);
    if (!end || *end != '\0' || !std::isfinite(v))
        throw config_error("config: bad numeric value for key '" + key + "': " + value);
    return v;
}

std::vector<double> split_args(const std::string& key, const std::string& args, std::size_t count) {
    std::vector<double> out;
    std::stringstream ss(args);
    std::string part;
    while (std::getline(ss, part, ',')) out.push_back(num(key, trim(part)));
    if (out.size() != count)
        throw config_error("config: profile '" + key + "' expects " + std::to_string(count) + " arguments");
    return out;
}

} // namespace

ScenarioConfig ScenarioConfig::from_string(const std::string& text) {
    ScenarioConfig cfg;
    std::stringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error("config line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw config_error("config line " + std::to_string(lineno) + ": empty key or value");

        if (key == "variant") cfg.variant = value;
        else if (key == "beta") cfg.beta = num(key, value);
        else if (key == "sigma") cfg.sigma = num(key, value);
        else if (key == "eta") cfg.eta = num(key, value);
        else if (key == "n") cfg.n = num(key, value);
        else if (key == "c0") cfg.c0 = num(key, value);
        else if (key == "cells") cfg.cells = static_cast<int>(num(key, value));
        else if (key == "t_end") cfg.t_end = num(key, value);
        else if (key == "snapshot_every") cfg.snapshot_every = num(key, value);
        else if (key == "cfl") cfg.cfl = num(key, value);
        else if (key == "max_steps") cfg.max_steps = static_cast<long>(num(key, value));
        else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(num(key, value));
        else if (key == "A0") cfg.A0 = value;
        else if (key == "L") cfg.L = value;
        else if (key == "gamma") cfg.gamma = value;
        else if (key == "mu0") cfg.mu0 = value;
        else if (key == "output_dir") cfg.output_dir = value;
        else if (key == "alpha") cfg.alpha = num(key, value);
        else if (key == "jko_dt") cfg.jko_dt = num(key, value);
        else if (key == "jko_steps") cfg.jko_steps = static_cast<int>(num(key, value));
        else throw config_error("config: unknown key '" + key + "'");
    }
    return cfg;
}

ScenarioConfig ScenarioConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_string(ss.str());
}

std::vector<double> build_profile(const std::string& spec, const CircleGrid& grid) {
    std::size_t colon = spec.find(':');
    std::string kind = colon == std::string::npos ? spec : spec.substr(0, colon);
    std::string args = colon == std::string::npos ? "" : spec.substr(colon + 1);

    std::vector<double> f(grid.cells);
    if (kind == "constant") {
        double v = num(spec, args);
        for (double& x : f) x = v;
    } else if (kind == "sin") {
        auto a = split_args(spec, args, 3); // amp, phase, offset
        for (int j = 0; j < grid.cells; ++j) {
            double x = grid.center(j);
            f[j] = a[2] + a[0] * std::sin(2.0 * M_PI * (x - a[1]) / grid.n);
        }
    } else if (kind == "step") {
        auto a = split_args(spec, args, 2);
        for (int j = 0; j < grid.cells; ++j) f[j] = grid.center(j) < 0.5 * grid.n ? a[0] : a[1];
    } else if (kind == "csv") {
        CsvTable t = read_csv(args);
        int col = t.column("value");
        if (col < 0) throw config_error("profile csv needs a 'value' column: " + args);
        if (static_cast<int>(t.rows.size()) != grid.cells)
            throw config_error("profile csv row count does not match cells: " + args);
        for (int j = 0; j < grid.cells; ++j) f[j] = num("csv value", t.rows[j][static_cast<std::size_t>(col)]);
    } else {
        throw config_error("unknown profile spec '" + spec + "'");
    }
    return f;
}

Scenario build_scenario(const ScenarioConfig& cfg) {
    CircleGrid grid(cfg.cells, cfg.n);
    ModelParams params;
    params.variant = variant_from_string(cfg.variant);
    params.beta = cfg.beta;
    params.sigma = cfg.sigma;
    params.eta = cfg.eta;
    params.n = cfg.n;
    params.c0 = cfg.c0;
    params.validate();

    SectorProfiles profiles;
    profiles.A0 = build_profile(cfg.A0, grid);
    if (!cfg.L.empty()) profiles.L = normalize_mass(build_profile(cfg.L, grid), grid, 1.0);
    if (!cfg.gamma.empty()) profiles.gamma = normalize_mass(build_profile(cfg.gamma, grid), grid, cfg.n);
    if (params.variant == Variant::ImmobileLabour && profiles.L.empty())
        throw config_error("config: immobile variant needs an L profile");
    if (params.variant == Variant::NonSymmetricPreferences && profiles.gamma.empty())
        throw config_error("config: non-symmetric variant needs a gamma profile");
    profiles.validate(grid, params);

    Scenario sc{grid, params, profiles, FirmDistribution{}, SolverConfig{}, cfg.seed};
    sc.solver.cfl = cfg.cfl;
    sc.solver.t_end = cfg.t_end;
    sc.solver.snapshot_every = cfg.snapshot_every;
    sc.solver.max_steps = cfg.max_steps;
    sc.solver.validate();

    std::string m = cfg.mu0;
    if (m.empty()) m = params.variant == Variant::ImmobileLabour ? "inv_labor" : "uniform";
    if (m == "uniform") {
        sc.mu0 = FirmDistribution::uniform(grid);
    } else if (m == "inv_labor") {
        if (profiles.L.empty()) throw config_error("config: mu0 = inv_labor needs an L profile");
        std::vector<double> inv(grid.cells);
        for (int j = 0; j < grid.cells; ++j) inv[j] = 1.0 / profiles.L[j];
        sc.mu0 = FirmDistribution::normalized(std::move(inv), grid);
    } else if (m.rfind("random:", 0) == 0) {
        sc.mu0 = random_fourier_density(grid, static_cast<std::uint64_t>(num("mu0", m.substr(7))));
    } else if (m.rfind("fixedcost:", 0) == 0) {
        sc.mu0 = fixed_cost_example(num("mu0", m.substr(10)), grid, params);
    } else if (m == "steady") {
        sc.mu0 = steady_state(profiles, params, grid);
    } else {
        sc.mu0 = FirmDistribution::normalized(build_profile(m, grid), grid);
    }
    return sc;
}

} // namespace sectorflow
