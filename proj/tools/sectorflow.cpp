// sectorflow: batch front-end for the sectoral reallocation model.
// Subcommands: simulate | steady | jko | efficiency | fixedcost | calibrate | w2
// Exit codes: 0 success, 2 config error, 3 numeric error, 4 timeout.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <mutex>
#include <thread>

#include "sectorflow/calibration.hpp"
#include "sectorflow/csv.hpp"
#include "sectorflow/equilibrium.hpp"
#include "sectorflow/kernels.hpp"
#include "sectorflow/scenario.hpp"
#include "sectorflow/transport.hpp"

namespace fs = std::filesystem;
using namespace sectorflow;

namespace {

struct CommonOpts {
    std::vector<std::string> configs;
    std::string out;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int jobs = 1;
};

ScenarioConfig load_config(const std::string& path, const CommonOpts& opts, const std::string& out_dir) {
    ScenarioConfig cfg = ScenarioConfig::from_file(path);
    if (opts.seed_set) cfg.seed = opts.seed;
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    return cfg;
}

std::string stem_of(const std::string& path) { return fs::path(path).stem().string(); }

void write_header_comments(CsvWriter& w, const ScenarioConfig& cfg, const std::string& command) {
    w.comment("command=" + command + " variant=" + cfg.variant + " seed=" + std::to_string(cfg.seed));
    w.comment("kernels=" + std::string(kernels::active().name));
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

void run_simulate(const ScenarioConfig& cfg) {
    Scenario sc = build_scenario(cfg);
    fs::create_directories(cfg.output_dir);

    FirmDistribution ref = steady_state(sc.profiles, sc.params, sc.grid);
    Trajectory traj = simulate(sc.mu0, sc.profiles, sc.params, sc.grid, sc.solver, &ref);

    EquilibriumModel model(sc.profiles, sc.params, sc.grid);
    {
        CsvWriter w(cfg.output_dir + "/snapshots.csv", "sectorflow.snapshots.v1");
        write_header_comments(w, cfg, "simulate");
        w.header({"t", "i", "mu", "pi", "Y", "w", "labor_productivity"});
        for (std::size_t s = 0; s < traj.times.size(); ++s) {
            ShortRunEquilibrium eq = model.full(traj.snapshots[s]);
            for (int j = 0; j < sc.grid.cells; ++j)
                w.row({traj.times[s], sc.grid.center(j), traj.snapshots[s].mu[j], eq.pi[j], eq.Y[j],
                       eq.w[j], eq.Y[j] / eq.Lused[j]});
        }
    }
    {
        CsvWriter w(cfg.output_dir + "/summary.csv", "sectorflow.summary.v1");
        write_header_comments(w, cfg, "simulate");
        w.header({"t", "F", "X", "P", "mass_error", "l2_to_eq", "dt"});
        for (std::size_t s = 0; s < traj.times.size(); ++s)
            w.row({traj.times[s], traj.F_values[s], traj.X_values[s], 1.0 / traj.X_values[s],
                   traj.mass_error[s], traj.l2_to_eq[s], traj.snapshot_dt[s]});
    }
    {
        CsvWriter w(cfg.output_dir + "/convergence_fit.csv", "sectorflow.convergence_fit.v1");
        write_header_comments(w, cfg, "simulate");
        w.header({"C1", "C2", "r_squared", "t_lo", "t_hi", "points"});
        try {
            ConvergenceFit fit = fit_convergence_rate(traj);
            w.row({fit.C1, fit.C2, fit.r_squared, fit.t_lo, fit.t_hi, static_cast<double>(fit.points)});
        } catch (const degenerate_fit_error& e) {
            w.comment(std::string("degenerate: ") + e.what());
        }
    }
    std::cout << "simulate: " << traj.steps << " steps, final X=" << CsvWriter::format(traj.X_values.back())
              << ", max mass error=" << CsvWriter::format(traj.max_step_mass_error) << "\n";
}

// ---------------------------------------------------------------------------
// steady
// ---------------------------------------------------------------------------

void run_steady(const ScenarioConfig& cfg) {
    Scenario sc = build_scenario(cfg);
    fs::create_directories(cfg.output_dir);

    FirmDistribution eq_mu = steady_state(sc.profiles, sc.params, sc.grid);
    EquilibriumModel model(sc.profiles, sc.params, sc.grid);
    ShortRunEquilibrium eq = model.full(eq_mu);
    double x_closed = equilibrium_consumption(sc.profiles, sc.params, sc.grid);

    CsvWriter w(cfg.output_dir + "/steady.csv", "sectorflow.steady.v1");
    write_header_comments(w, cfg, "steady");
    w.header({"i", "mu_eq", "Y_eq", "labor_productivity_eq", "pi_eq", "w_eq"});
    for (int j = 0; j < sc.grid.cells; ++j)
        w.row({sc.grid.center(j), eq_mu.mu[j], eq.Y[j], eq.Y[j] / eq.Lused[j], eq.pi[j], eq.w[j]});

    CsvWriter ws(cfg.output_dir + "/steady_summary.csv", "sectorflow.steady_summary.v1");
    write_header_comments(ws, cfg, "steady");
    ws.header({"X_eq_closed_form", "X_eq_numeric", "PiAgg"});
    ws.row({x_closed, eq.X, eq.PiAgg});
    std::cout << "steady: X_eq=" << CsvWriter::format(x_closed) << "\n";
}

// ---------------------------------------------------------------------------
// jko
// ---------------------------------------------------------------------------

void run_jko(const ScenarioConfig& cfg) {
    Scenario sc = build_scenario(cfg);
    if (sc.params.c0 != 0.0) throw config_error("jko: requires c0 = 0");
    fs::create_directories(cfg.output_dir);

    const double horizon = cfg.jko_dt * cfg.jko_steps;
    SolverConfig pde_cfg = sc.solver;
    pde_cfg.t_end = horizon;
    pde_cfg.snapshot_every = cfg.jko_dt;
    Trajectory pde = simulate(sc.mu0, sc.profiles, sc.params, sc.grid, pde_cfg);

    CsvWriter w(cfg.output_dir + "/jko.csv", "sectorflow.jko.v1");
    write_header_comments(w, cfg, "jko");
    w.header({"k", "t", "F_jko", "X_jko", "w2_gap_to_pde", "converged"});

    EquilibriumModel model(sc.profiles, sc.params, sc.grid);
    std::vector<double> scratch(sc.grid.cells);
    FirmDistribution cur = sc.mu0;
    for (int k = 1; k <= cfg.jko_steps; ++k) {
        JkoResult res = jko_step(cur, cfg.jko_dt, sc.profiles, sc.params, sc.grid);
        cur = res.mu;
        double Z = model.z_of(cur.mu.data(), scratch.data());
        double gap = w2_distance_circle(cur, pde.snapshots[static_cast<std::size_t>(k)], sc.grid);
        w.row({static_cast<double>(k), k * cfg.jko_dt, model.f_of_z(Z), model.x_of_z(Z), gap,
               res.converged ? 1.0 : 0.0});
    }
    std::cout << "jko: " << cfg.jko_steps << " proximal steps at dt=" << cfg.jko_dt << "\n";
}

// ---------------------------------------------------------------------------
// efficiency
// ---------------------------------------------------------------------------

void run_efficiency(const ScenarioConfig& cfg) {
    ScenarioConfig icfg = cfg;
    icfg.variant = "immobile";
    Scenario imm = build_scenario(icfg);
    fs::create_directories(cfg.output_dir);

    ModelParams mob = imm.params;
    mob.variant = imm.params.eta == 0.0 ? Variant::MobileBaseline : Variant::MobileExternalities;
    mob.validate();

    Trajectory tr_imm = simulate(imm.mu0, imm.profiles, imm.params, imm.grid, imm.solver);
    Trajectory tr_mob = simulate(imm.mu0, imm.profiles, mob, imm.grid, imm.solver);

    double dx_eq = efficiency_loss(imm.profiles, imm.params, imm.grid);
    double x_eq_mob = equilibrium_consumption(imm.profiles, mob, imm.grid);
    double x_eq_imm = equilibrium_consumption(imm.profiles, imm.params, imm.grid);

    CsvWriter w(cfg.output_dir + "/efficiency.csv", "sectorflow.efficiency.v1");
    write_header_comments(w, cfg, "efficiency");
    w.header({"t", "X_mobile", "X_immobile", "gap"});
    double min_gap = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < tr_imm.times.size(); ++s) {
        double gap = tr_mob.X_values[s] - tr_imm.X_values[s];
        min_gap = std::min(min_gap, gap);
        w.row({tr_imm.times[s], tr_mob.X_values[s], tr_imm.X_values[s], gap});
    }

    CsvWriter ws(cfg.output_dir + "/efficiency_summary.csv", "sectorflow.efficiency_summary.v1");
    write_header_comments(ws, cfg, "efficiency");
    ws.header({"dX_eq", "X_eq_mobile", "X_eq_immobile", "min_gap_along_path"});
    ws.row({dx_eq, x_eq_mob, x_eq_imm, min_gap});
    std::cout << "efficiency: dX_eq=" << CsvWriter::format(dx_eq)
              << " min gap=" << CsvWriter::format(min_gap) << "\n";
}

// ---------------------------------------------------------------------------
// fixedcost
// ---------------------------------------------------------------------------

void run_fixedcost(const ScenarioConfig& cfg) {
    Scenario sc = build_scenario(cfg);
    fs::create_directories(cfg.output_dir);

    FirmDistribution mu = fixed_cost_example(cfg.alpha, sc.grid, sc.params);
    double c0_star = fixed_cost_threshold(cfg.alpha, sc.params);

    ModelParams at = sc.params;
    at.c0 = c0_star;
    ModelParams quarter = sc.params;
    quarter.c0 = 0.25 * c0_star;
    bool stat_at = stationarity_check(mu, sc.profiles, at, sc.grid);
    bool stat_quarter = stationarity_check(mu, sc.profiles, quarter, sc.grid);

    // grid estimate of the steepest profit slope for reference
    std::vector<double> v = velocity_field(mu, sc.profiles, sc.params, sc.grid);
    double grid_slope = 0.0;
    for (double x : v) grid_slope = std::max(grid_slope, std::fabs(x));

    CsvWriter w(cfg.output_dir + "/fixedcost_density.csv", "sectorflow.fixedcost_density.v1");
    write_header_comments(w, cfg, "fixedcost");
    w.header({"i", "mu"});
    for (int j = 0; j < sc.grid.cells; ++j) w.row({sc.grid.center(j), mu.mu[j]});

    CsvWriter ws(cfg.output_dir + "/fixedcost_summary.csv", "sectorflow.fixedcost_summary.v1");
    write_header_comments(ws, cfg, "fixedcost");
    ws.header({"alpha", "rho", "c0_threshold", "max_slope_formula", "max_slope_grid",
               "stationary_at_c0", "stationary_at_quarter"});
    ws.row({cfg.alpha, sc.params.rho(), c0_star, std::sqrt(2.0 * c0_star), grid_slope,
            stat_at ? 1.0 : 0.0, stat_quarter ? 1.0 : 0.0});
    std::cout << "fixedcost: c0_threshold=" << CsvWriter::format(c0_star) << " stationary_at_c0="
              << (stat_at ? "true" : "false") << " at_quarter=" << (stat_quarter ? "true" : "false")
              << "\n";
}

// ---------------------------------------------------------------------------
// calibrate
// ---------------------------------------------------------------------------

struct CalibrateOpts {
    std::string panel;
    std::string out = "out";
    double beta_override = -1.0;
    double bandwidth = 0.0;
    bool tweedie = false;
    double rho1 = 0.0, rho2 = 0.0, beta = 0.0;
    bool passthrough = false;
};

void run_calibrate(const CalibrateOpts& o) {
    fs::create_directories(o.out);

    if (o.passthrough) {
        EtaSigmaRecovery r = recover_eta_sigma(o.rho1, o.rho2, o.beta);
        CsvWriter w(o.out + "/recovered.csv", "sectorflow.recovered.v1");
        w.header({"name", "value"});
        w.raw_row({"rho1", CsvWriter::format(o.rho1)});
        w.raw_row({"rho2", CsvWriter::format(o.rho2)});
        w.raw_row({"beta", CsvWriter::format(o.beta)});
        w.raw_row({"eta", CsvWriter::format(r.eta)});
        w.raw_row({"sigma", CsvWriter::format(r.sigma)});
        w.raw_row({"eta_published_reference", "0.0222"});
        w.raw_row({"sigma_published_reference", "1.3144"});
        w.raw_row({"immobile_wellposed", r.immobile_wellposed ? "1" : "0"});
        std::cout << "calibrate: eta=" << CsvWriter::format(r.eta)
                  << " sigma=" << CsvWriter::format(r.sigma) << "\n";
        return;
    }

    SectorPanel panel = SectorPanel::from_csv(o.panel);
    CalibrationResult res = calibrate_panel(panel, o.beta_override, o.bandwidth);

    {
        CsvWriter w(o.out + "/nw_curve.csv", "sectorflow.nw_curve.v1");
        w.comment("dropped_rows=" + std::to_string(panel.dropped_rows));
        w.header({"x", "m_hat", "lo95", "hi95"});
        for (std::size_t i = 0; i < res.roe_curve.x.size(); ++i)
            w.row({res.roe_curve.x[i], res.roe_curve.m_hat[i], res.roe_curve.lo95[i], res.roe_curve.hi95[i]});
    }
    {
        CsvWriter w(o.out + "/fits.csv", "sectorflow.fits.v1");
        w.header({"model", "term", "estimate", "std_error"});
        const char* roe_terms[] = {"intercept", "roe_t0"};
        for (int k = 0; k < 2; ++k)
            w.raw_row({"roe_convergence", roe_terms[k], CsvWriter::format(res.roe_fit.coefficients[k]),
                       CsvWriter::format(res.roe_fit.std_errors[k])});
        const char* g_terms[] = {"intercept", "dlog_l", "dlog_roe"};
        for (int k = 0; k < 3; ++k)
            w.raw_row({"production_growth", g_terms[k], CsvWriter::format(res.growth_fit.coefficients[k]),
                       CsvWriter::format(res.growth_fit.std_errors[k])});
        w.raw_row({"roe_convergence", "r_squared", CsvWriter::format(res.roe_fit.r_squared), ""});
        w.raw_row({"roe_convergence", "residual_se", CsvWriter::format(res.roe_fit.residual_se), ""});
        w.raw_row({"roe_convergence", "n_obs", std::to_string(res.roe_fit.n_obs), ""});
        w.raw_row({"production_growth", "r_squared", CsvWriter::format(res.growth_fit.r_squared), ""});
        w.raw_row({"production_growth", "residual_se", CsvWriter::format(res.growth_fit.residual_se), ""});
        w.raw_row({"production_growth", "n_obs", std::to_string(res.growth_fit.n_obs), ""});
    }
    {
        CsvWriter w(o.out + "/recovered.csv", "sectorflow.recovered.v1");
        w.header({"name", "value"});
        w.raw_row({"pi_bar", CsvWriter::format(res.beta_rec.pi_bar)});
        w.raw_row({"beta", CsvWriter::format(res.beta_rec.beta)});
        w.raw_row({"rho1", CsvWriter::format(res.growth_fit.coefficients[1])});
        w.raw_row({"rho2", CsvWriter::format(res.growth_fit.coefficients[2])});
        w.raw_row({"eta", CsvWriter::format(res.eta_sigma.eta)});
        w.raw_row({"sigma", CsvWriter::format(res.eta_sigma.sigma)});
        w.raw_row({"eta_published_reference", "0.0222"});
        w.raw_row({"sigma_published_reference", "1.3144"});
        w.raw_row({"immobile_wellposed", res.eta_sigma.immobile_wellposed ? "1" : "0"});
        w.raw_row({"dropped_rows", std::to_string(panel.dropped_rows)});
    }

    if (o.tweedie) {
        double beta = o.beta_override > 0 ? o.beta_override : res.beta_rec.beta;
        double sigma = res.eta_sigma.sigma;
        double eta = res.eta_sigma.eta;
        double D = (eta - beta) * (sigma - 1.0) - 1.0;
        std::vector<double> z;
        std::vector<std::string> ids;
        for (const auto& r : panel.rows) {
            if (r.roe_t1 <= 0) continue;
            double zi = (sigma / D) * std::log(r.roe_t1 / (1.0 - beta)) +
                        (beta * (1.0 - sigma) / D) * std::log(r.l_t1);
            z.push_back(zi);
            ids.push_back(r.sector_id);
        }
        TweedieConfig tc;
        tc.beta = beta;
        tc.sigma = sigma;
        tc.eta = eta;
        tc.bandwidth = o.bandwidth;
        TweedieFit tf = tweedie_estimate_mu(z, tc);
        CsvWriter w(o.out + "/tweedie.csv", "sectorflow.tweedie.v1");
        w.comment("a_bar=" + CsvWriter::format(tf.a_bar) + " sigma_a2=" + CsvWriter::format(tf.sigma_a2) +
                  " m_A=" + CsvWriter::format(tf.m_A) + " sigma_A2=" + CsvWriter::format(tf.sigma_A2));
        w.header({"sector_id", "z", "mu_estimate"});
        for (std::size_t i = 0; i < z.size(); ++i)
            w.raw_row({ids[i], CsvWriter::format(z[i]), CsvWriter::format(tf.mu[i])});
    }
    std::cout << "calibrate: beta=" << CsvWriter::format(res.beta_rec.beta)
              << " sigma=" << CsvWriter::format(res.eta_sigma.sigma)
              << " eta=" << CsvWriter::format(res.eta_sigma.eta) << "\n";
}

// ---------------------------------------------------------------------------
// w2
// ---------------------------------------------------------------------------

std::vector<double> read_density_csv(const std::string& path) {
    CsvTable t = read_csv(path);
    int col = t.column("mu");
    if (col < 0) col = t.column("value");
    if (col < 0) throw config_error("density CSV needs a 'mu' or 'value' column: " + path);
    std::vector<double> v;
    for (const auto& r : t.rows) v.push_back(std::stod(r[static_cast<std::size_t>(col)]));
    return v;
}

void run_w2(const std::string& a, const std::string& b, double n) {
    std::vector<double> va = read_density_csv(a);
    std::vector<double> vb = read_density_csv(b);
    if (va.size() != vb.size()) throw config_error("w2: densities have different cell counts");
    CircleGrid grid(static_cast<int>(va.size()), n);
    FirmDistribution da = FirmDistribution::normalized(std::move(va), grid);
    FirmDistribution db = FirmDistribution::normalized(std::move(vb), grid);
    std::cout << CsvWriter::format(w2_distance_circle(da, db, grid)) << "\n";
}

// ---------------------------------------------------------------------------
// scenario dispatch with --jobs
// ---------------------------------------------------------------------------

void run_scenarios(const CommonOpts& opts, void (*fn)(const ScenarioConfig&)) {
    if (opts.configs.empty()) throw config_error("no --config given");
    std::vector<std::string> errors;
    std::mutex mtx;
    auto work = [&](const std::string& path) {
        std::string out_dir;
        if (!opts.out.empty())
            out_dir = opts.configs.size() == 1 ? opts.out : opts.out + "/" + stem_of(path);
        try {
            fn(load_config(path, opts, out_dir));
        } catch (const std::exception& e) {
            std::lock_guard<std::mutex> lk(mtx);
            errors.push_back(path + ": " + e.what());
            throw;
        }
    };
    if (opts.jobs <= 1 || opts.configs.size() == 1) {
        for (const auto& c : opts.configs) work(c);
    } else {
        std::vector<std::thread> pool;
        std::atomic<std::size_t> next{0};
        std::exception_ptr first_error = nullptr;
        std::mutex emtx;
        int k = std::min<int>(opts.jobs, static_cast<int>(opts.configs.size()));
        for (int i = 0; i < k; ++i)
            pool.emplace_back([&] {
                for (;;) {
                    std::size_t idx = next.fetch_add(1);
                    if (idx >= opts.configs.size()) return;
                    try {
                        work(opts.configs[idx]);
                    } catch (...) {
                        std::lock_guard<std::mutex> lk(emtx);
                        if (!first_error) first_error = std::current_exception();
                    }
                }
            });
        for (auto& t : pool) t.join();
        if (first_error) std::rethrow_exception(first_error);
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"sectorflow: firm reallocation as a Wasserstein gradient flow"};
    app.require_subcommand(1);

    std::string kernels_choice = "auto";
    app.add_option("--kernels", kernels_choice, "kernel backend: auto|scalar|avx2");

    CommonOpts opts;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opts.configs, "scenario config file(s)")->required();
        sub->add_option("--out", opts.out, "output directory (overrides config)");
        auto* s = sub->add_option("--seed", opts.seed, "seed override");
        s->each([&](const std::string&) { opts.seed_set = true; });
        sub->add_option("--jobs", opts.jobs, "run configs in parallel");
    };

    CLI::App* c_sim = app.add_subcommand("simulate", "integrate the reallocation dynamics");
    add_common(c_sim);
    CLI::App* c_steady = app.add_subcommand("steady", "emit the long-run equilibrium");
    add_common(c_steady);
    CLI::App* c_jko = app.add_subcommand("jko", "proximal-scheme trajectory vs the PDE");
    add_common(c_jko);
    CLI::App* c_eff = app.add_subcommand("efficiency", "mobile vs immobile consumption gap");
    add_common(c_eff);
    CLI::App* c_fc = app.add_subcommand("fixedcost", "fixed-cost example equilibrium and threshold");
    add_common(c_fc);

    CalibrateOpts cal;
    CLI::App* c_cal = app.add_subcommand("calibrate", "empirical pipeline on a sector panel");
    c_cal->add_option("--panel", cal.panel, "panel CSV path");
    c_cal->add_option("--out", cal.out, "output directory");
    c_cal->add_option("--beta", cal.beta_override, "override beta");
    c_cal->add_option("--bandwidth", cal.bandwidth, "kernel bandwidth (0 = Silverman)");
    c_cal->add_flag("--tweedie", cal.tweedie, "run the density deconvolution");
    c_cal->add_option("--rho1", cal.rho1, "pass-through production-growth labour elasticity");
    c_cal->add_option("--rho2", cal.rho2, "pass-through production-growth profit elasticity");
    c_cal->add_option("--beta-passthrough", cal.beta, "pass-through beta");

    std::string w2_a, w2_b;
    double w2_n = 1.0;
    CLI::App* c_w2 = app.add_subcommand("w2", "Wasserstein-2 distance between two CSV densities");
    c_w2->add_option("--a", w2_a, "first density CSV")->required();
    c_w2->add_option("--b", w2_b, "second density CSV")->required();
    c_w2->add_option("--n", w2_n, "circle circumference");

    CLI11_PARSE(app, argc, argv);

    try {
        kernels::set_backend(kernels_choice);
        if (c_sim->parsed()) run_scenarios(opts, run_simulate);
        else if (c_steady->parsed()) run_scenarios(opts, run_steady);
        else if (c_jko->parsed()) run_scenarios(opts, run_jko);
        else if (c_eff->parsed()) run_scenarios(opts, run_efficiency);
        else if (c_fc->parsed()) run_scenarios(opts, run_fixedcost);
        else if (c_cal->parsed()) {
            cal.passthrough = cal.rho1 != 0.0 || cal.rho2 != 0.0;
            if (cal.passthrough && cal.beta == 0.0)
                throw config_error("calibrate pass-through needs --beta-passthrough");
            if (!cal.passthrough && cal.panel.empty())
                throw config_error("calibrate needs --panel (or --rho1/--rho2/--beta-passthrough)");
            run_calibrate(cal);
        } else if (c_w2->parsed()) {
            run_w2(w2_a, w2_b, w2_n);
        }
    } catch (const timeout_error& e) {
        std::cerr << "timeout: " << e.what() << "\n";
        return 4;
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const numeric_error& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
