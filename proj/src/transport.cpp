#include "sectorflow/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sectorflow/errors.hpp"

namespace sectorflow {

namespace {

// ---------------------------------------------------------------------------
// Quantile machinery. Atoms sit at cell centers; cumulative masses are
// normalized to end exactly at 1 so the two quantile walks stay in lockstep.
// ---------------------------------------------------------------------------

struct Atoms {
    std::vector<double> cum; // normalized cumulative masses, cum.back() == 1
    std::vector<double> pos; // cell centers
    double n = 1.0;          // circumference
};

Atoms make_atoms(const FirmDistribution& d, const CircleGrid& grid) {
    Atoms a;
    a.n = grid.n;
    const int N = grid.cells;
    a.cum.resize(N);
    a.pos.resize(N);
    double total = 0.0;
    for (int j = 0; j < N; ++j) total += d.mu[j];
    double run = 0.0;
    for (int j = 0; j < N; ++j) {
        run += d.mu[j];
        a.cum[j] = run / total;
        a.pos[j] = grid.center(j);
    }
    a.cum[N - 1] = 1.0;
    return a;
}

// Unrolled cumulative of atom index b in Z: full cycles carry mass 1 and
// length n.
inline double cum_at(const Atoms& a, long b) {
    long N = static_cast<long>(a.cum.size());
    long q = b >= 0 ? b / N : -((-b + N - 1) / N);
    long r = b - q * N;
    return static_cast<double>(q) + a.cum[static_cast<std::size_t>(r)];
}

inline double pos_at(const Atoms& a, long b) {
    long N = static_cast<long>(a.cum.size());
    long q = b >= 0 ? b / N : -((-b + N - 1) / N);
    long r = b - q * N;
    return static_cast<double>(q) * a.n + a.pos[static_cast<std::size_t>(r)];
}

inline int index_at(const Atoms& a, long b) {
    long N = static_cast<long>(a.cum.size());
    long r = b % N;
    return static_cast<int>(r < 0 ? r + N : r);
}

// Segment of the monotone coupling at shift s: mass `len` moves from atom a
// to (unrolled) atom b.
struct Segment {
    int a;
    long b;
    double len;
    double delta; // pos_mu - pos_nu along the unrolled line
};

// Quadratic transport cost of the shift-s monotone rearrangement. Optionally
// records the full segment list (including zero-length segments, which keep
// the support chain connected for the potential sweep).
double shift_cost(const Atoms& A, const Atoms& B, double s, std::vector<Segment>* segs) {
    if (segs) segs->clear();
    // first nu atom covering quantile levels just above -s
    long b = static_cast<long>(std::floor(-s)) * static_cast<long>(B.cum.size()) - 2;
    while (cum_at(B, b) <= -s) ++b;
    int a = 0;
    double t = 0.0;
    double cost = 0.0;
    const double one = 1.0;
    while (t < one) {
        double ta = A.cum[static_cast<std::size_t>(a)];
        double tb = cum_at(B, b) + s;
        double tn = std::min(std::min(ta, tb), one);
        double len = tn - t;
        double delta = A.pos[static_cast<std::size_t>(a)] - pos_at(B, b);
        if (len > 0.0) cost += len * delta * delta;
        if (segs) segs->push_back({a, b, len > 0.0 ? len : 0.0, delta});
        if (tn >= one) break;
        // advance one pointer per iteration so consecutive segments always
        // share a source or a target
        if (ta <= tb) {
            if (a + 1 < static_cast<int>(A.cum.size())) ++a;
            else break;
        } else {
            ++b;
        }
        t = tn;
    }
    return cost;
}

double golden_min_shift(const Atoms& A, const Atoms& B, double lo, double hi) {
    const double gr = 0.6180339887498949;
    double a = lo, bb = hi;
    double x1 = bb - gr * (bb - a);
    double x2 = a + gr * (bb - a);
    double f1 = shift_cost(A, B, x1, nullptr);
    double f2 = shift_cost(A, B, x2, nullptr);
    while (bb - a > 1e-12) {
        if (f1 <= f2) {
            bb = x2;
            x2 = x1;
            f2 = f1;
            x1 = bb - gr * (bb - a);
            f1 = shift_cost(A, B, x1, nullptr);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (bb - a);
            f2 = shift_cost(A, B, x2, nullptr);
        }
    }
    return 0.5 * (a + bb);
}

double best_shift(const Atoms& A, const Atoms& B) {
    double s = golden_min_shift(A, B, -1.25, 1.25);
    // s = 0 handles mu == nu exactly and costs one extra evaluation
    if (shift_cost(A, B, 0.0, nullptr) <= shift_cost(A, B, s, nullptr)) return 0.0;
    return s;
}

void check_pair(const FirmDistribution& mu, const FirmDistribution& nu, const CircleGrid& grid) {
    mu.validate(grid);
    nu.validate(grid);
    if (mu.mu.size() != nu.mu.size()) throw config_error("transport: distributions on mismatched grids");
}

} // namespace

double w2_distance_circle(const FirmDistribution& mu, const FirmDistribution& nu,
                          const CircleGrid& grid) {
    check_pair(mu, nu, grid);
    Atoms A = make_atoms(mu, grid);
    Atoms B = make_atoms(nu, grid);
    double s = best_shift(A, B);
    return std::sqrt(std::max(0.0, shift_cost(A, B, s, nullptr)));
}

TransportPlan optimal_plan_circle(const FirmDistribution& mu, const FirmDistribution& nu,
                                  const CircleGrid& grid) {
    check_pair(mu, nu, grid);
    Atoms A = make_atoms(mu, grid);
    Atoms B = make_atoms(nu, grid);
    double s = best_shift(A, B);
    std::vector<Segment> segs;
    shift_cost(A, B, s, &segs);
    TransportPlan plan;
    plan.shift = s;
    double cost = 0.0;
    for (const Segment& sg : segs) {
        if (sg.len <= 0.0) continue;
        int tgt = index_at(B, sg.b);
        double d = grid.arc_distance(A.pos[static_cast<std::size_t>(sg.a)], B.pos[static_cast<std::size_t>(tgt)]);
        cost += sg.len * d * d;
        plan.entries.push_back({sg.a, tgt, sg.len, sg.delta});
    }
    plan.cost = cost;
    return plan;
}

double min_reallocation_cost(const FirmDistribution& mu, const FirmDistribution& nu,
                             const CircleGrid& grid) {
    double d = w2_distance_circle(mu, nu, grid);
    return 0.5 * d * d;
}

// ---------------------------------------------------------------------------
// Brute-force LP oracle: successive shortest paths on the dense bipartite
// transportation graph, Bellman-Ford for the (possibly negative) residual
// costs. Exact at these sizes; independent of the quantile path above.
// ---------------------------------------------------------------------------

TransportPlan brute_force_ot(const FirmDistribution& mu, const FirmDistribution& nu,
                             const CircleGrid& grid) {
    check_pair(mu, nu, grid);
    const int N = grid.cells;
    if (N > 32) throw size_error("brute_force_ot: grid too large (max 32 cells)");

    std::vector<double> supply(N), demand(N);
    double stot = 0.0, dtot = 0.0;
    for (int i = 0; i < N; ++i) {
        supply[i] = mu.mu[i] * grid.h;
        demand[i] = nu.mu[i] * grid.h;
        stot += supply[i];
        dtot += demand[i];
    }
    for (int i = 0; i < N; ++i) demand[i] *= stot / dtot; // balance exactly

    std::vector<double> cost(static_cast<std::size_t>(N) * N);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            double d = grid.arc_distance(grid.center(i), grid.center(j));
            cost[static_cast<std::size_t>(i) * N + j] = d * d;
        }

    std::vector<double> flow(static_cast<std::size_t>(N) * N, 0.0);
    const double eps = 1e-15;
    const int max_rounds = 64 * N * N;

    for (int round = 0; round < max_rounds; ++round) {
        double remaining = 0.0;
        for (int i = 0; i < N; ++i) remaining += supply[i];
        if (remaining <= eps * std::max(1.0, stot)) break;

        // Bellman-Ford over nodes: 0..N-1 sources, N..2N-1 sinks
        const double inf = std::numeric_limits<double>::infinity();
        std::vector<double> dist(2 * N, inf);
        std::vector<int> parent(2 * N, -1);
        for (int i = 0; i < N; ++i)
            if (supply[i] > eps) dist[i] = 0.0;
        for (int it = 0; it < 2 * N; ++it) {
            bool changed = false;
            for (int i = 0; i < N; ++i) {
                for (int j = 0; j < N; ++j) {
                    double c = cost[static_cast<std::size_t>(i) * N + j];
                    if (dist[i] < inf && dist[i] + c < dist[N + j] - 1e-18) {
                        dist[N + j] = dist[i] + c;
                        parent[N + j] = i;
                        changed = true;
                    }
                    if (flow[static_cast<std::size_t>(i) * N + j] > eps && dist[N + j] < inf &&
                        dist[N + j] - c < dist[i] - 1e-18) {
                        dist[i] = dist[N + j] - c;
                        parent[i] = N + j;
                        changed = true;
                    }
                }
            }
            if (!changed) break;
        }

        int best = -1;
        double bestd = inf;
        for (int j = 0; j < N; ++j)
            if (demand[j] > eps && dist[N + j] < bestd) {
                bestd = dist[N + j];
                best = N + j;
            }
        if (best < 0) throw numeric_error("brute_force_ot: no augmenting path");

        // bottleneck along the path
        double bn = demand[best - N];
        for (int node = best; parent[node] >= 0;) {
            int p = parent[node];
            if (node >= N) {
                // forward arc p -> node, uncapacitated
            } else {
                bn = std::min(bn, flow[static_cast<std::size_t>(node) * N + (p - N)]);
            }
            node = p;
            if (parent[node] < 0 && node < N) bn = std::min(bn, supply[node]);
        }

        for (int node = best; parent[node] >= 0;) {
            int p = parent[node];
            if (node >= N)
                flow[static_cast<std::size_t>(p) * N + (node - N)] += bn;
            else
                flow[static_cast<std::size_t>(node) * N + (p - N)] -= bn;
            node = p;
            if (parent[node] < 0 && node < N) supply[node] -= bn;
        }
        demand[best - N] -= bn;
    }

    TransportPlan plan;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            double f = flow[static_cast<std::size_t>(i) * N + j];
            if (f > eps) {
                double d = grid.arc_distance(grid.center(i), grid.center(j));
                plan.cost += f * d * d;
                plan.entries.push_back({i, j, f, d});
            }
        }
    return plan;
}

// ---------------------------------------------------------------------------
// JKO proximal step
// ---------------------------------------------------------------------------

namespace {

// Target position at quantile level u, with ties between adjacent atoms
// averaged. Averaging selects the centered subgradient at kinks (in
// particular, the gradient vanishes when the two measures coincide).
double target_position(const Atoms& B, double u) {
    long b = static_cast<long>(std::floor(u)) * static_cast<long>(B.cum.size()) - 2;
    while (cum_at(B, b) < u) ++b;
    double cb = cum_at(B, b);
    if (std::fabs(cb - u) <= 1e-13 * (1.0 + std::fabs(u)))
        return 0.5 * (pos_at(B, b) + pos_at(B, b + 1));
    return pos_at(B, b);
}

// Gradient of W2^2(mu, nu) with respect to the cell masses of mu, holding nu
// and the optimal shift fixed (envelope theorem). Raising mass m_j moves
// every quantile boundary above atom j, each contributing the jump of the
// squared displacement across it:
//   dD/dm_j = sum_{k >= j} (x_k - B(M_k))^2 - (x_{k+1} - B(M_k))^2,
// with B the shifted nu-quantile. Defined relative to the last atom, which
// is all the simplex geometry needs.
std::vector<double> transport_gradient(const Atoms& A, const Atoms& B, double s) {
    const int N = static_cast<int>(A.cum.size());
    std::vector<double> u(static_cast<std::size_t>(N), 0.0);
    double acc = 0.0;
    for (int k = N - 2; k >= 0; --k) {
        double Bk = target_position(B, A.cum[static_cast<std::size_t>(k)] - s);
        double dk = A.pos[static_cast<std::size_t>(k)] - Bk;
        double dk1 = A.pos[static_cast<std::size_t>(k + 1)] - Bk;
        acc += dk * dk - dk1 * dk1;
        u[static_cast<std::size_t>(k)] = acc;
    }
    return u;
}

} // namespace

JkoResult jko_step(const FirmDistribution& mu, double dt, const SectorProfiles& profiles,
                   const ModelParams& params, const CircleGrid& grid, int max_iters) {
    if (!(dt > 0.0)) throw config_error("jko_step: dt must be positive");
    if (params.c0 != 0.0)
        throw config_error("jko_step: proximal characterization requires c0 = 0");
    mu.validate(grid);
    EquilibriumModel model(profiles, params, grid);

    const int N = grid.cells;
    const Atoms anchor = make_atoms(mu, grid);

    std::vector<double> scratch(N), pi(N);
    auto objective = [&](const std::vector<double>& dens) {
        EquilibriumModel::Core c = model.core(dens.data(), scratch.data(), nullptr);
        FirmDistribution d{dens};
        Atoms cur = make_atoms(d, grid);
        double s = best_shift(cur, anchor);
        double w2sq = shift_cost(cur, anchor, s, nullptr);
        return c.F - w2sq / (2.0 * dt);
    };

    std::vector<double> cur = mu.mu;
    double G = objective(cur);
    const double G0 = G;
    std::vector<double> best = cur;
    double G_best = G;

    double tau = dt;
    bool converged = false;
    int iter = 0;
    std::vector<double> cand(N), grad(N);

    for (; iter < max_iters; ++iter) {
        // ascent direction: pi - (dW2^2/dm)/(2 dt)
        model.core(cur.data(), scratch.data(), pi.data());
        FirmDistribution dcur{cur};
        Atoms acur = make_atoms(dcur, grid);
        std::vector<double> u = transport_gradient(acur, anchor, best_shift(acur, anchor));
        double gmax = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < N; ++j) {
            grad[j] = pi[j] - u[static_cast<std::size_t>(j)] / (2.0 * dt);
            gmax = std::max(gmax, grad[j]);
        }

        bool accepted = false;
        double G_new = G;
        for (int bt = 0; bt < 60; ++bt) {
            double mass = 0.0;
            for (int j = 0; j < N; ++j) {
                cand[j] = cur[j] * std::exp(tau * (grad[j] - gmax));
                mass += cand[j];
            }
            mass *= grid.h;
            for (int j = 0; j < N; ++j) cand[j] /= mass;
            double Gc = objective(cand);
            if (Gc > G) {
                G_new = Gc;
                accepted = true;
                break;
            }
            tau *= 0.5;
        }
        if (!accepted) {
            // no improving step at any line-search scale: stationary
            converged = true;
            break;
        }

        double gain = G_new - G;
        cur.swap(cand);
        G = G_new;
        if (G > G_best) {
            G_best = G;
            best = cur;
        }
        tau *= 1.25;
        if (gain < 1e-12) {
            converged = true;
            ++iter;
            break;
        }
    }

    JkoResult res;
    res.mu = FirmDistribution::normalized(std::move(best), grid);
    res.converged = converged;
    res.iterations = iter;
    res.objective = G_best;
    (void)G0;
    return res;
}

} // namespace sectorflow
