#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "scurve/contour.hpp"
#include "scurve/errors.hpp"
#include "scurve/measure.hpp"

namespace scurve {

struct EquilibriumOptions {
    int max_iter = 30000;
    bool remesh = true;
    double support_threshold = 0.0;     // 0 -> 1e-10 / n
    double energy_floor = -1e8;         // below this the discrete problem is declared unbounded
    double field_floor = 0.0;           // if < 0: mass piling up where Re V < field_floor => unbounded
    std::vector<double>* energy_trace = nullptr;  // per-iteration energies, for diagnostics
};

struct EquilibriumResult {
    DiscreteMeasure mu;
    double l = 0.0;
    double el_residual_supp = 0.0;
    double el_residual_off = 0.0;
    int iterations = 0;
    double energy = 0.0;
    std::vector<bool> active;  // weight above the support threshold
};

namespace detail {

/// Euclidean projection onto the probability simplex.
inline void project_simplex(std::vector<double>& w) {
    const std::size_t n = w.size();
    std::vector<double> u = w;
    std::sort(u.begin(), u.end(), std::greater<double>());
    double cum = 0.0, theta = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        cum += u[k];
        double t = (cum - 1.0) / static_cast<double>(k + 1);
        if (u[k] - t > 0.0) theta = t;
    }
    for (auto& x : w) x = std::max(0.0, x - theta);
}

/// Interaction matrix: K_ij = log 1/|x_i - x_j| off the diagonal and the segment
/// self term 1 - log(seg_i / 2) on it, so that E = w'Kw + c'w.
struct EnergyKernel {
    std::size_t n = 0;
    std::vector<double> K;
    std::vector<double> c;

    EnergyKernel(const Mesh& mesh, const ComplexPolynomial& V) : n(mesh.size()), K(n * n), c(n) {
        for (std::size_t i = 0; i < n; ++i) {
            K[i * n + i] = 1.0 - std::log(0.5 * mesh.seg[i]);
            c[i] = V(mesh.points[i]).real();
            for (std::size_t j = i + 1; j < n; ++j) {
                double d = std::abs(mesh.points[i] - mesh.points[j]);
                if (d < 1e-300) throw SingularEvaluationError("equilibrium: coincident mesh nodes");
                double v = -std::log(d);
                K[i * n + j] = v;
                K[j * n + i] = v;
            }
        }
    }

    void gradient(const std::vector<double>& w, std::vector<double>& g) const {
        for (std::size_t i = 0; i < n; ++i) {
            const double* row = &K[i * n];
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) acc += row[j] * w[j];
            g[i] = 2.0 * acc + c[i];
        }
    }

    double energy(const std::vector<double>& w, const std::vector<double>& g) const {
        double wg = 0.0, wc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            wg += w[i] * g[i];
            wc += w[i] * c[i];
        }
        return 0.5 * (wg + wc);
    }
};

struct KktReport {
    double supp = 0.0;
    double off = 0.0;
    double l = 0.0;
};

inline KktReport kkt_residuals(const std::vector<double>& w, const std::vector<double>& g,
                               double threshold) {
    KktReport r;
    double mass = 0.0, mean = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i)
        if (w[i] > threshold) {
            mass += w[i];
            mean += w[i] * g[i];
        }
    mean /= std::max(mass, 1e-300);
    r.l = 0.5 * mean;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (w[i] > threshold)
            r.supp = std::max(r.supp, 0.5 * std::abs(g[i] - mean));
        else
            r.off = std::max(r.off, 0.5 * std::max(0.0, mean - g[i]));
    }
    return r;
}

/// Gaussian elimination with partial pivoting; A is n x n row-major, b length n.
/// Returns false when a pivot collapses.
inline bool solve_dense(std::vector<double>& A, std::vector<double>& b, std::size_t n) {
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(A[r * n + col]) > std::abs(A[piv * n + col])) piv = r;
        if (std::abs(A[piv * n + col]) < 1e-300) return false;
        if (piv != col) {
            for (std::size_t k = 0; k < n; ++k) std::swap(A[piv * n + k], A[col * n + k]);
            std::swap(b[piv], b[col]);
        }
        double d = A[col * n + col];
        for (std::size_t r = col + 1; r < n; ++r) {
            double f = A[r * n + col] / d;
            if (f == 0.0) continue;
            for (std::size_t k = col; k < n; ++k) A[r * n + k] -= f * A[col * n + k];
            b[r] -= f * b[col];
        }
    }
    for (std::size_t r = n; r-- > 0;) {
        double acc = b[r];
        for (std::size_t k = r + 1; k < n; ++k) acc -= A[r * n + k] * b[k];
        b[r] = acc / A[r * n + r];
    }
    return true;
}

/// Equality-constrained solve on the current active set: stationarity
/// 2 K_AA w_A + c_A = nu 1, sum w_A = 1. Negative components get deactivated,
/// strict off-support violators reactivated, until the KKT system is clean.
/// This is the high-accuracy polishing phase; projected gradient alone cannot
/// certify progress once energy differences drop under rounding noise.
inline bool active_set_refine(const EnergyKernel& kernel, std::vector<double>& w,
                              std::vector<double>& g, double tol, double threshold) {
    const std::size_t n = kernel.n;
    std::vector<bool> active(n);
    for (std::size_t i = 0; i < n; ++i) active[i] = w[i] > threshold;
    for (int round = 0; round < 80; ++round) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < n; ++i)
            if (active[i]) idx.push_back(i);
        if (idx.size() < 2) return false;
        const std::size_t m = idx.size() + 1;
        std::vector<double> A(m * m, 0.0), b(m, 0.0);
        for (std::size_t r = 0; r < idx.size(); ++r) {
            for (std::size_t k = 0; k < idx.size(); ++k)
                A[r * m + k] = 2.0 * kernel.K[idx[r] * n + idx[k]];
            A[r * m + idx.size()] = -1.0;
            b[r] = -kernel.c[idx[r]];
            A[idx.size() * m + r] = 1.0;
        }
        b[idx.size()] = 1.0;
        if (!solve_dense(A, b, m)) return false;

        bool dropped = false;
        for (std::size_t r = 0; r < idx.size(); ++r)
            if (b[r] <= 0.0) {
                active[idx[r]] = false;
                dropped = true;
            }
        if (dropped) continue;

        std::fill(w.begin(), w.end(), 0.0);
        for (std::size_t r = 0; r < idx.size(); ++r) w[idx[r]] = b[r];
        kernel.gradient(w, g);
        const double nu = b[idx.size()];
        double worst = 0.0;
        std::size_t worst_i = n;
        for (std::size_t i = 0; i < n; ++i) {
            if (active[i]) continue;
            double violation = nu - g[i];
            if (violation > worst) {
                worst = violation;
                worst_i = i;
            }
        }
        if (worst_i == n || worst <= 0.5 * tol) return true;
        active[worst_i] = true;
    }
    return false;
}

}  // namespace detail

/// Minimize the discrete weighted energy over the probability simplex on a fixed
/// mesh. Projected gradient with Barzilai-Borwein steps; steps that fail to
/// decrease the energy are halved until they do, so the energy sequence is
/// non-increasing. Throws ConvergenceError when the iteration budget runs out.
inline EquilibriumResult solve_on_mesh(const Mesh& mesh, const ComplexPolynomial& V, double tol,
                                       const EquilibriumOptions& opts = {},
                                       std::span<const double> warm_start = {}) {
    const std::size_t n = mesh.size();
    if (n < 2) throw ValidationError("equilibrium: mesh too small");
    const double threshold =
        opts.support_threshold > 0.0 ? opts.support_threshold : 1e-10 / static_cast<double>(n);

    detail::EnergyKernel kernel(mesh, V);

    std::vector<double> w(n, 1.0 / static_cast<double>(n));
    if (!warm_start.empty()) {
        if (warm_start.size() != n) throw ValidationError("equilibrium: warm start size mismatch");
        w.assign(warm_start.begin(), warm_start.end());
        detail::project_simplex(w);
    }

    std::vector<double> g(n), w_new(n), g_new(n);
    kernel.gradient(w, g);
    double energy = kernel.energy(w, g);
    if (opts.energy_trace) opts.energy_trace->push_back(energy);

    double gmax = 1e-12;
    for (double v : g) gmax = std::max(gmax, std::abs(v));
    double alpha = 1.0 / gmax;

    // Phase 1: projected gradient with BB steps, monotone up to rounding noise.
    // Energy differences near the optimum sink below double rounding, so this
    // phase only targets a moderate residual; the active-set phase finishes.
    const double pg_tol = std::max(tol, 1e-6);
    detail::KktReport kkt;
    int iter = 0;
    for (; iter < opts.max_iter; ++iter) {
        kkt = detail::kkt_residuals(w, g, threshold);
        if (kkt.supp <= pg_tol && kkt.off <= pg_tol) break;

        bool accepted = false;
        double step = alpha;
        for (int bt = 0; bt < 60 && !accepted; ++bt) {
            for (std::size_t i = 0; i < n; ++i) w_new[i] = w[i] - step * g[i];
            detail::project_simplex(w_new);
            kernel.gradient(w_new, g_new);
            double energy_new = kernel.energy(w_new, g_new);
            if (energy_new <= energy + 1e-14 * (1.0 + std::abs(energy))) {
                // Barzilai-Borwein step for the next iteration
                double ss = 0.0, sy = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    double s = w_new[i] - w[i];
                    ss += s * s;
                    sy += s * (g_new[i] - g[i]);
                }
                alpha = (sy > 1e-300) ? std::clamp(ss / sy, 1e-14, 1e6) : step * 2.0;
                w.swap(w_new);
                g.swap(g_new);
                energy = energy_new;
                accepted = true;
            } else {
                step *= 0.5;
            }
        }
        if (opts.energy_trace) opts.energy_trace->push_back(energy);
        if (!accepted) break;  // progress no longer certifiable at this scale

        if (energy < opts.energy_floor)
            throw UnboundedEnergyError("equilibrium: energy fell through the floor");
        if (opts.field_floor < 0.0) {
            double escaped = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                if (kernel.c[i] < opts.field_floor) escaped += w[i];
            if (escaped > 0.25)
                throw UnboundedEnergyError("equilibrium: mass escaping into the deep-field region");
        }
    }

    // Phase 2: active-set polish to the requested tolerance.
    kkt = detail::kkt_residuals(w, g, threshold);
    if (kkt.supp > tol || kkt.off > tol) {
        detail::active_set_refine(kernel, w, g, tol, threshold);
        energy = kernel.energy(w, g);
        if (opts.energy_trace) opts.energy_trace->push_back(energy);
    }

    kkt = detail::kkt_residuals(w, g, threshold);
    if (kkt.supp > tol || kkt.off > tol)
        throw ConvergenceError("equilibrium: iteration budget exhausted", kkt.supp, kkt.off, iter);

    EquilibriumResult res;
    res.mu.points = mesh.points;
    res.mu.weights = w;
    res.mu.seg_lengths = mesh.seg;
    res.mu.tangents = mesh.tangents;
    res.l = kkt.l;
    res.el_residual_supp = kkt.supp;
    res.el_residual_off = kkt.off;
    res.iterations = iter;
    res.energy = energy;
    res.active.resize(n);
    for (std::size_t i = 0; i < n; ++i) res.active[i] = w[i] > threshold;
    return res;
}

/// One adaptive refinement: double the node density wherever the first pass put
/// weights above the 90th percentile, keeping the per-arc node counts.
inline Mesh remesh_by_weight(const Contour& contour, const Mesh& mesh,
                             const std::vector<double>& weights) {
    std::vector<double> positive;
    for (double w : weights)
        if (w > 0.0) positive.push_back(w);
    if (positive.empty()) return mesh;
    std::size_t idx = positive.size() - 1 - positive.size() / 10;
    std::nth_element(positive.begin(), positive.begin() + static_cast<std::ptrdiff_t>(idx),
                     positive.end());
    const double p90 = positive[idx];

    Mesh out;
    for (std::size_t arc = 0; arc < contour.arcs.size(); ++arc) {
        std::vector<std::size_t> nodes;
        for (std::size_t k = 0; k < mesh.size(); ++k)
            if (mesh.arc_of[k] == static_cast<int>(arc)) nodes.push_back(k);
        if (nodes.empty()) continue;
        // piecewise-constant density along the arc: 2 in heavy cells, 1 elsewhere
        std::vector<double> cell_len, cell_density;
        for (std::size_t k : nodes) {
            cell_len.push_back(mesh.seg[k]);
            cell_density.push_back(weights[k] >= p90 ? 2.0 : 1.0);
        }
        double total_mass = 0.0;
        for (std::size_t c = 0; c < cell_len.size(); ++c) total_mass += cell_len[c] * cell_density[c];
        const std::size_t count = nodes.size();
        double quantum = total_mass / static_cast<double>(count);
        // walk cells, dropping a node at the midpoint of every density quantum
        double acc = 0.0, s = 0.0;
        std::size_t c = 0;
        double into_cell = 0.0;
        std::vector<double> edges{0.0};
        while (edges.size() <= count && c < cell_len.size()) {
            double room = (cell_len[c] - into_cell) * cell_density[c];
            double need = quantum - acc;
            if (room >= need) {
                into_cell += need / cell_density[c];
                s += need / cell_density[c];
                edges.push_back(s);
                acc = 0.0;
            } else {
                acc += room;
                s += cell_len[c] - into_cell;
                into_cell = 0.0;
                ++c;
            }
        }
        while (edges.size() <= count) edges.push_back(contour.arc_length(arc));
        edges.back() = contour.arc_length(arc);
        for (std::size_t m = 0; m + 1 < edges.size(); ++m) {
            auto [z, tan] = detail::polyline_at(contour.arcs[arc], 0.5 * (edges[m] + edges[m + 1]));
            out.points.push_back(z);
            out.seg.push_back(edges[m + 1] - edges[m]);
            out.tangents.push_back(tan);
            out.arc_of.push_back(static_cast<int>(arc));
        }
    }
    return out;
}

/// Equilibrium measure of a fixed contour: discretize into n arclength cells,
/// solve, and (optionally) refine the mesh once where the weights concentrate.
inline EquilibriumResult solve_equilibrium(const Contour& contour, const ComplexPolynomial& V, int n,
                                           double tol, const EquilibriumOptions& opts = {}) {
    contour.validate_structure();
    if (n < 50) throw ValidationError("equilibrium: need n >= 50");
    Mesh mesh = discretize(contour, n);
    EquilibriumResult res = solve_on_mesh(mesh, V, tol, opts);
    if (opts.remesh) {
        Mesh refined = remesh_by_weight(contour, mesh, res.mu.weights);
        res = solve_on_mesh(refined, V, tol, opts);
    }
    return res;
}

struct ElReport {
    double supp = 0.0;
    double off = 0.0;
};

/// Re-checks the variational conditions on a probe refinement (2x nodes) that is
/// independent of the solver internals: the potential is evaluated in smeared
/// form, so probes on the support are fine.
inline ElReport check_euler_lagrange(const EquilibriumResult& res, const Contour& contour,
                                     const ComplexPolynomial& V) {
    Mesh probes = discretize(contour, static_cast<int>(2 * res.mu.size()));
    std::vector<cplx> support_nodes;
    std::vector<double> support_seg;
    for (std::size_t i = 0; i < res.mu.size(); ++i)
        if (res.active[i]) {
            support_nodes.push_back(res.mu.points[i]);
            support_seg.push_back(res.mu.seg_lengths[i]);
        }
    ElReport rep;
    for (std::size_t k = 0; k < probes.size(); ++k) {
        cplx z = probes.points[k];
        double g = smeared_potential(res.mu, z) + 0.5 * V(z).real();
        double dist = std::numeric_limits<double>::infinity();
        double near_seg = 0.0;
        for (std::size_t i = 0; i < support_nodes.size(); ++i) {
            double d = std::abs(z - support_nodes[i]);
            if (d < dist) {
                dist = d;
                near_seg = support_seg[i];
            }
        }
        bool on_support = dist <= 1.2 * std::max(near_seg, probes.seg[k]);
        if (on_support)
            rep.supp = std::max(rep.supp, std::abs(g - res.l));
        else
            rep.off = std::max(rep.off, std::max(0.0, res.l - g));
    }
    return rep;
}

}  // namespace scurve
