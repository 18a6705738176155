#pragma once

#include <string>
#include <vector>

#include "sectorflow/errors.hpp"

namespace sectorflow {

// ---------------------------------------------------------------------------
// Sector panel
// ---------------------------------------------------------------------------

struct SectorRow {
    std::string sector_id;
    double roe_t0 = 0, roe_t1 = 0;
    double labprod_t0 = 0, labprod_t1 = 0;
    double y_t0 = 0, y_t1 = 0;
    double l_t0 = 0, l_t1 = 0;
};

struct SectorPanel {
    std::vector<SectorRow> rows;
    int dropped_rows = 0; // rows with missing/invalid fields, dropped on ingestion

    // Header must contain exactly the SectorRow field names (any order).
    static SectorPanel from_csv(const std::string& path);
};

// ---------------------------------------------------------------------------
// Regression machinery
// ---------------------------------------------------------------------------

struct RegressionFit {
    std::vector<double> coefficients;
    std::vector<double> std_errors; // classical (non-robust)
    double r_squared = 0.0;
    double residual_se = 0.0;
    int n_obs = 0;
};

// Least squares on a design given as columns (intercept column included by
// the caller). Throws collinearity_error on rank deficiency.
RegressionFit ols(const std::vector<std::vector<double>>& columns, const std::vector<double>& y);

struct NWFit {
    std::vector<double> x;     // evaluation grid (200 points)
    std::vector<double> m_hat;
    std::vector<double> lo95;
    std::vector<double> hi95;
    double bandwidth = 0.0;
};

// Gaussian-kernel locally-constant regression with pointwise 95% bands from
// the plug-in asymptotic variance. bandwidth <= 0 selects the Silverman rule
// 1.06 * sd(x) * n^{-1/5}.
NWFit nadaraya_watson(const std::vector<double>& x, const std::vector<double>& y,
                      double bandwidth = 0.0, int grid_points = 200);

// ---------------------------------------------------------------------------
// Structural recoveries
// ---------------------------------------------------------------------------

struct BetaRecovery {
    double pi_bar = 0.0; // = intercept / (-slope)
    double beta = 0.0;   // = 1 - pi_bar
};

BetaRecovery recover_beta(double intercept, double slope);
BetaRecovery recover_beta(const RegressionFit& fit);

struct EtaSigmaRecovery {
    double eta = 0.0;   // beta*(1 + rho2/rho1) - 1
    double sigma = 0.0; // 1 + rho1/(beta*(1+rho2) - rho1)
    bool immobile_wellposed = false;
};

EtaSigmaRecovery recover_eta_sigma(double rho1, double rho2, double beta);

// ---------------------------------------------------------------------------
// Tweedie deconvolution of the firm density from z = log mu + a, a Gaussian.
// ---------------------------------------------------------------------------

struct TweedieConfig {
    double bandwidth = 0.0;  // KDE bandwidth; <= 0 selects Silverman
    double n_total = 1.0;    // length of the sector space (mass target)
    // exponent algebra kappa = (sigma-1)/((eta-beta)(sigma-1) - 1)
    double beta = 0.86;
    double sigma = 1.3144;
    double eta = 0.0222;
    double sigma_a2_fixed = -1.0; // >= 0: skip the noise-variance estimation
};

struct TweedieFit {
    std::vector<double> mu; // positive, (n_total/N) * sum(mu) = 1
    double a_bar = 0.0;
    double sigma_a2 = 0.0;
    double m_A = 0.0;
    double sigma_A2 = 0.0;
    double noise_share = 0.0; // sigma_a2 / var(z)
};

// Posterior-mean density estimate E[mu|z] = exp(E[y|z] + var(y|z)/2) with
// E[y|z] = z - a_bar + sigma_a2 * (log f)'(z) and a Gaussian KDE for f.
// The noise variance comes from the second-difference (high-frequency)
// moment of z across adjacent sectors, which is what separates the smooth
// log-density signal from the white technology noise; a_bar then follows
// from the unit-mass constraint. Requires at least 50 observations ordered
// by position on the sector circle.
TweedieFit tweedie_estimate_mu(const std::vector<double>& z, const TweedieConfig& config);

// ---------------------------------------------------------------------------
// Panel pipeline outputs (shared by the CLI)
// ---------------------------------------------------------------------------

struct CalibrationResult {
    NWFit roe_curve;
    RegressionFit roe_fit;        // droe ~ 1 + roe_t0
    BetaRecovery beta_rec;
    RegressionFit growth_fit;     // dlog y ~ 1 + dlog l + dlog roe
    EtaSigmaRecovery eta_sigma;
    int convergence_obs = 0;
    int growth_obs = 0;
};

CalibrationResult calibrate_panel(const SectorPanel& panel, double beta_override = -1.0,
                                  double bandwidth = 0.0);

} // namespace sectorflow
