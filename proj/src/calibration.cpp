#include "sectorflow/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sectorflow/csv.hpp"

namespace sectorflow {

namespace {

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double var_of(const std::vector<double>& v) {
    double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size() - 1);
}

bool parse_field(const std::string& s, double& out) {
    if (s.empty() || s == "NA" || s == "na" || s == "nan" || s == "NaN") return false;
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end && *end == '\0' && std::isfinite(out);
}

} // namespace

// ---------------------------------------------------------------------------
// Sector panel ingestion
// ---------------------------------------------------------------------------

SectorPanel SectorPanel::from_csv(const std::string& path) {
    CsvTable t = read_csv(path);
    const char* names[] = {"sector_id", "roe_t0",    "roe_t1", "labprod_t0", "labprod_t1",
                           "y_t0",      "y_t1",      "l_t0",   "l_t1"};
    int idx[9];
    for (int k = 0; k < 9; ++k) {
        idx[k] = t.column(names[k]);
        if (idx[k] < 0) throw config_error(std::string("panel CSV missing column '") + names[k] + "'");
    }
    SectorPanel p;
    for (const auto& r : t.rows) {
        if (r.size() < t.header.size()) {
            ++p.dropped_rows;
            continue;
        }
        SectorRow row;
        row.sector_id = r[static_cast<std::size_t>(idx[0])];
        double* slots[8] = {&row.roe_t0, &row.roe_t1, &row.labprod_t0, &row.labprod_t1,
                            &row.y_t0,   &row.y_t1,   &row.l_t0,       &row.l_t1};
        bool ok = !row.sector_id.empty();
        for (int k = 0; k < 8 && ok; ++k) ok = parse_field(r[static_cast<std::size_t>(idx[k + 1])], *slots[k]);
        if (ok) {
            // declared-positive fields
            ok = row.labprod_t0 > 0 && row.labprod_t1 > 0 && row.y_t0 > 0 && row.y_t1 > 0 &&
                 row.l_t0 > 0 && row.l_t1 > 0;
        }
        if (ok)
            p.rows.push_back(std::move(row));
        else
            ++p.dropped_rows;
    }
    for (std::size_t i = 0; i < p.rows.size(); ++i)
        for (std::size_t j = i + 1; j < p.rows.size(); ++j)
            if (p.rows[i].sector_id == p.rows[j].sector_id)
                throw config_error("panel CSV: duplicate sector_id '" + p.rows[i].sector_id + "'");
    return p;
}

// ---------------------------------------------------------------------------
// OLS via modified Gram-Schmidt QR
// ---------------------------------------------------------------------------

RegressionFit ols(const std::vector<std::vector<double>>& columns, const std::vector<double>& y) {
    const int p = static_cast<int>(columns.size());
    const int n = static_cast<int>(y.size());
    if (p == 0 || n == 0) throw config_error("ols: empty design");
    for (const auto& c : columns)
        if (static_cast<int>(c.size()) != n) throw config_error("ols: ragged design");
    if (n <= p) throw config_error("ols: need more observations than coefficients");

    // QR by modified Gram-Schmidt
    std::vector<std::vector<double>> Q(columns.begin(), columns.end());
    std::vector<std::vector<double>> R(p, std::vector<double>(p, 0.0));
    for (int k = 0; k < p; ++k) {
        double col_norm = std::sqrt(std::inner_product(columns[k].begin(), columns[k].end(),
                                                       columns[k].begin(), 0.0));
        for (int i = 0; i < k; ++i) {
            double r = std::inner_product(Q[i].begin(), Q[i].end(), Q[k].begin(), 0.0);
            R[i][k] = r;
            for (int t = 0; t < n; ++t) Q[k][t] -= r * Q[i][t];
        }
        double nk = std::sqrt(std::inner_product(Q[k].begin(), Q[k].end(), Q[k].begin(), 0.0));
        if (nk <= 1e-10 * std::max(1.0, col_norm))
            throw collinearity_error("ols: design is rank-deficient");
        R[k][k] = nk;
        for (int t = 0; t < n; ++t) Q[k][t] /= nk;
    }

    // beta = R^{-1} Q'y
    std::vector<double> qty(p);
    for (int k = 0; k < p; ++k) qty[k] = std::inner_product(Q[k].begin(), Q[k].end(), y.begin(), 0.0);
    std::vector<double> beta(p);
    for (int k = p - 1; k >= 0; --k) {
        double s = qty[k];
        for (int j = k + 1; j < p; ++j) s -= R[k][j] * beta[j];
        beta[k] = s / R[k][k];
    }

    RegressionFit fit;
    fit.coefficients = beta;
    fit.n_obs = n;

    double rss = 0.0;
    for (int t = 0; t < n; ++t) {
        double pred = 0.0;
        for (int k = 0; k < p; ++k) pred += columns[k][t] * beta[k];
        double r = y[t] - pred;
        rss += r * r;
    }
    double sigma2 = rss / (n - p);
    fit.residual_se = std::sqrt(sigma2);

    // (X'X)^{-1} = R^{-1} R^{-T}
    std::vector<std::vector<double>> Rinv(p, std::vector<double>(p, 0.0));
    for (int k = 0; k < p; ++k) {
        Rinv[k][k] = 1.0 / R[k][k];
        for (int i = k - 1; i >= 0; --i) {
            double s = 0.0;
            for (int j = i + 1; j <= k; ++j) s += R[i][j] * Rinv[j][k];
            Rinv[i][k] = -s / R[i][i];
        }
    }
    fit.std_errors.resize(p);
    for (int i = 0; i < p; ++i) {
        double s = 0.0;
        for (int j = i; j < p; ++j) s += Rinv[i][j] * Rinv[i][j];
        fit.std_errors[i] = std::sqrt(sigma2 * s);
    }

    double ybar = mean_of(y);
    double tss = 0.0;
    for (double v : y) tss += (v - ybar) * (v - ybar);
    fit.r_squared = tss > 0.0 ? 1.0 - rss / tss : 0.0;
    return fit;
}

// ---------------------------------------------------------------------------
// Nadaraya-Watson
// ---------------------------------------------------------------------------

NWFit nadaraya_watson(const std::vector<double>& x, const std::vector<double>& y,
                      double bandwidth, int grid_points) {
    const int n = static_cast<int>(x.size());
    if (n != static_cast<int>(y.size())) throw config_error("nadaraya_watson: size mismatch");
    if (n < 10) throw config_error("nadaraya_watson: need at least 10 points");

    double sd = std::sqrt(var_of(x));
    if (!(sd > 0.0)) throw degenerate_fit_error("nadaraya_watson: zero variance in x");
    double b = bandwidth > 0.0 ? bandwidth : 1.06 * sd * std::pow(static_cast<double>(n), -0.2);

    NWFit fit;
    fit.bandwidth = b;
    double xmin = *std::min_element(x.begin(), x.end());
    double xmax = *std::max_element(x.begin(), x.end());
    fit.x.resize(grid_points);
    fit.m_hat.resize(grid_points);
    fit.lo95.resize(grid_points);
    fit.hi95.resize(grid_points);

    std::vector<double> w(n);
    // residual variance against the fit at the data points
    double sigma2 = 0.0;
    {
        for (int i = 0; i < n; ++i) {
            double num = 0.0, den = 0.0;
            for (int j = 0; j < n; ++j) {
                double u = (x[i] - x[j]) / b;
                double k = std::exp(-0.5 * u * u);
                num += k * y[j];
                den += k;
            }
            double r = y[i] - num / den;
            sigma2 += r * r;
        }
        sigma2 /= n;
    }

    for (int g = 0; g < grid_points; ++g) {
        double xg = grid_points == 1 ? xmin : xmin + (xmax - xmin) * g / (grid_points - 1);
        double den = 0.0;
        for (int j = 0; j < n; ++j) {
            double u = (xg - x[j]) / b;
            w[j] = std::exp(-0.5 * u * u);
            den += w[j];
        }
        double m = 0.0, w2 = 0.0;
        for (int j = 0; j < n; ++j) {
            double wj = w[j] / den;
            m += wj * y[j];
            w2 += wj * wj;
        }
        double half = 1.96 * std::sqrt(sigma2 * w2);
        fit.x[g] = xg;
        fit.m_hat[g] = m;
        fit.lo95[g] = m - half;
        fit.hi95[g] = m + half;
    }
    return fit;
}

// ---------------------------------------------------------------------------
// Structural recoveries
// ---------------------------------------------------------------------------

BetaRecovery recover_beta(double intercept, double slope) {
    if (!(slope < 0.0))
        throw no_convergence_error("recover_beta: convergence model requires a negative slope");
    BetaRecovery r;
    r.pi_bar = intercept / (-slope);
    r.beta = 1.0 - r.pi_bar;
    return r;
}

BetaRecovery recover_beta(const RegressionFit& fit) {
    if (fit.coefficients.size() != 2)
        throw config_error("recover_beta: expected (intercept, slope) fit");
    return recover_beta(fit.coefficients[0], fit.coefficients[1]);
}

EtaSigmaRecovery recover_eta_sigma(double rho1, double rho2, double beta) {
    if (rho1 == 0.0) throw numeric_error("recover_eta_sigma: rho1 must be nonzero");
    double den = beta * (1.0 + rho2) - rho1;
    if (std::fabs(den) < 1e-300)
        throw numeric_error("recover_eta_sigma: beta*(1+rho2) - rho1 vanishes");
    EtaSigmaRecovery r;
    r.eta = beta * (1.0 + rho2 / rho1) - 1.0;
    r.sigma = 1.0 + rho1 / den;
    r.immobile_wellposed = r.sigma > 0.0 && r.sigma != 1.0 &&
                           (r.eta - beta) * (r.sigma - 1.0) - 1.0 < 0.0;
    return r;
}

// ---------------------------------------------------------------------------
// Tweedie deconvolution
// ---------------------------------------------------------------------------

TweedieFit tweedie_estimate_mu(const std::vector<double>& z, const TweedieConfig& config) {
    const int N = static_cast<int>(z.size());
    if (N < 50) throw config_error("tweedie_estimate_mu: need at least 50 observations");
    for (double v : z)
        if (!std::isfinite(v)) throw numeric_error("tweedie_estimate_mu: non-finite observation");

    const double vz = var_of(z);
    if (!(vz > 0.0)) throw unidentified_error("tweedie_estimate_mu: degenerate z sample");

    // Noise variance from the circular second-difference moment: the smooth
    // log-density contributes O(h^2) while white noise contributes 6*sigma^2.
    double sigma_a2;
    if (config.sigma_a2_fixed >= 0.0) {
        sigma_a2 = config.sigma_a2_fixed;
    } else {
        double s = 0.0;
        for (int i = 0; i < N; ++i) {
            double d2 = z[(i + 1) % N] - 2.0 * z[i] + z[(i + N - 1) % N];
            s += d2 * d2;
        }
        sigma_a2 = s / (6.0 * N);
        if (sigma_a2 > 0.999 * vz) {
            if (sigma_a2 > 1.25 * vz)
                throw unidentified_error(
                    "tweedie_estimate_mu: high-frequency moment exceeds total variance; "
                    "no smooth-signal/white-noise split exists");
            sigma_a2 = 0.999 * vz;
        }
    }

    // Gaussian KDE of the marginal of z and its first two log-derivatives.
    double sd = std::sqrt(vz);
    double b = config.bandwidth > 0.0 ? config.bandwidth
                                      : 1.06 * sd * std::pow(static_cast<double>(N), -0.2);
    std::vector<double> score(N), curv(N);
    for (int i = 0; i < N; ++i) {
        double f = 0.0, f1 = 0.0, f2 = 0.0;
        for (int j = 0; j < N; ++j) {
            double u = (z[i] - z[j]) / b;
            double k = std::exp(-0.5 * u * u);
            f += k;
            f1 += -u * k;
            f2 += (u * u - 1.0) * k;
        }
        f1 /= b;
        f2 /= (b * b);
        score[i] = f1 / f;
        curv[i] = f2 / f - score[i] * score[i];
    }

    // Posterior means and variances; a_bar from the unit-mass constraint.
    std::vector<double> yhat(N), vpost(N);
    double log_mass = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < N; ++i) {
        yhat[i] = z[i] + sigma_a2 * score[i]; // a_bar applied below
        vpost[i] = std::max(0.0, sigma_a2 * (1.0 + sigma_a2 * curv[i]));
    }
    // log of (n/N) * sum exp(yhat + v/2), computed stably
    double mx = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < N; ++i) mx = std::max(mx, yhat[i] + 0.5 * vpost[i]);
    double acc = 0.0;
    for (int i = 0; i < N; ++i) acc += std::exp(yhat[i] + 0.5 * vpost[i] - mx);
    log_mass = mx + std::log(acc * config.n_total / N);
    const double a_bar = log_mass; // unit mass <=> subtracting a_bar from yhat

    TweedieFit fit;
    fit.sigma_a2 = sigma_a2;
    fit.a_bar = a_bar;
    fit.noise_share = sigma_a2 / vz;
    fit.mu.resize(N);
    double total = 0.0;
    for (int i = 0; i < N; ++i) {
        fit.mu[i] = std::exp(yhat[i] - a_bar + 0.5 * vpost[i]);
        total += fit.mu[i];
    }
    // exact renormalization against rounding
    double scale = static_cast<double>(N) / (config.n_total * total);
    for (double& v : fit.mu) v *= scale;

    // Back out the technology-noise primitives via the exponent algebra.
    const double kappa = (config.sigma - 1.0) /
                         ((config.eta - config.beta) * (config.sigma - 1.0) - 1.0);
    if (std::fabs(kappa) < 1e-300) throw numeric_error("tweedie_estimate_mu: kappa vanishes");
    fit.sigma_A2 = sigma_a2 / (kappa * kappa);
    double mxp = -std::numeric_limits<double>::infinity();
    std::vector<double> resid(N);
    for (int i = 0; i < N; ++i) {
        resid[i] = (z[i] - (yhat[i] - a_bar)) / kappa;
        mxp = std::max(mxp, resid[i]);
    }
    double accp = 0.0;
    for (int i = 0; i < N; ++i) accp += std::exp(resid[i] - mxp);
    double logP = mxp + std::log(accp * config.n_total / N);
    fit.m_A = a_bar / kappa - logP;
    return fit;
}

// ---------------------------------------------------------------------------
// Panel pipeline
// ---------------------------------------------------------------------------

CalibrationResult calibrate_panel(const SectorPanel& panel, double beta_override, double bandwidth) {
    CalibrationResult res;

    // ROE convergence: delta ROE on initial ROE
    std::vector<double> roe0, droe;
    for (const auto& r : panel.rows) {
        roe0.push_back(r.roe_t0);
        droe.push_back(r.roe_t1 - r.roe_t0);
    }
    if (static_cast<int>(roe0.size()) < 10)
        throw config_error("calibrate_panel: fewer than 10 usable rows for the convergence model");
    res.convergence_obs = static_cast<int>(roe0.size());
    res.roe_curve = nadaraya_watson(roe0, droe, bandwidth);
    res.roe_fit = ols({std::vector<double>(roe0.size(), 1.0), roe0}, droe);
    res.beta_rec = recover_beta(res.roe_fit);

    // Production growth: dlog y on dlog l and dlog roe (needs positive ROE)
    std::vector<double> dy, dl, dr;
    for (const auto& r : panel.rows) {
        if (r.roe_t0 > 0 && r.roe_t1 > 0) {
            dy.push_back(std::log(r.y_t1 / r.y_t0));
            dl.push_back(std::log(r.l_t1 / r.l_t0));
            dr.push_back(std::log(r.roe_t1 / r.roe_t0));
        }
    }
    if (static_cast<int>(dy.size()) < 10)
        throw config_error("calibrate_panel: fewer than 10 usable rows for the growth model");
    res.growth_obs = static_cast<int>(dy.size());
    res.growth_fit = ols({std::vector<double>(dy.size(), 1.0), dl, dr}, dy);

    double beta = beta_override > 0.0 ? beta_override : res.beta_rec.beta;
    res.eta_sigma = recover_eta_sigma(res.growth_fit.coefficients[1], res.growth_fit.coefficients[2], beta);
    return res;
}

} // namespace sectorflow
