#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "scurve/complex_poly.hpp"
#include "scurve/errors.hpp"

namespace scurve {

struct RootCluster {
    cplx root;
    int multiplicity = 1;
};

struct RootOptions {
    double tol = 1e-10;
    int max_iter = 300;
    int restarts = 4;
    std::uint64_t seed = 0x5eedbeefULL;
    double cluster_factor = 8.0;  // radius = cluster_factor * tol^(1/m)
};

namespace detail {

// |p|(|z|) with absolute coefficients, used as the residual scale at z.
inline double residual_scale(const ComplexPolynomial& p, cplx z) {
    double az = std::abs(z);
    double s = 0.0, pw = 1.0;
    for (cplx c : p.coeffs()) {
        s += std::abs(c) * pw;
        pw *= az;
    }
    return std::max(s, 1e-300);
}

// Simultaneous Aberth-Ehrlich sweep; returns max relative correction size.
inline double aberth_sweep(const ComplexPolynomial& p, std::vector<cplx>& z) {
    const std::size_t n = z.size();
    double worst = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        auto [pv, pd] = p.eval_with_derivative(z[k]);
        if (pv == cplx{0.0, 0.0}) continue;
        cplx newton = (pd != cplx{0.0, 0.0}) ? pv / pd : cplx{1.0, 0.0};
        cplx repulse{0.0, 0.0};
        for (std::size_t j = 0; j < n; ++j) {
            if (j == k) continue;
            cplx d = z[k] - z[j];
            if (std::abs(d) < 1e-300) d = cplx{1e-300, 0.0};
            repulse += 1.0 / d;
        }
        cplx denom = 1.0 - newton * repulse;
        cplx w = (std::abs(denom) > 1e-300) ? newton / denom : newton;
        z[k] -= w;
        worst = std::max(worst, std::abs(w) / (1.0 + std::abs(z[k])));
    }
    return worst;
}

}  // namespace detail

/// All roots of p with multiplicities. Near-coincident iterates are merged into
/// one root with summed multiplicity; the merge radius grows with the candidate
/// multiplicity m as cluster_factor * tol^(1/m), so an m-fold zero smeared over a
/// tol^(1/m)-sized cloud still collapses to a single entry. Throws
/// RootFindingError (with the best iterate) if the iteration does not settle.
inline std::vector<RootCluster> roots(const ComplexPolynomial& p, const RootOptions& opts = {}) {
    if (p.degree() < 1) throw ValidationError("roots: polynomial must have degree >= 1");

    // Peel off exact zero roots so the iteration only sees a nonzero constant term.
    std::vector<cplx> c = p.coeffs();
    int zeros_at_origin = 0;
    while (c.size() > 1 && c.front() == cplx{0.0, 0.0}) {
        c.erase(c.begin());
        ++zeros_at_origin;
    }
    std::vector<RootCluster> result;
    if (zeros_at_origin > 0) result.push_back({cplx{0.0, 0.0}, zeros_at_origin});

    const int deg = static_cast<int>(c.size()) - 1;
    std::vector<cplx> iterates;
    if (deg >= 1) {
        ComplexPolynomial q{std::vector<cplx>(c)};
        // Cauchy bound for the initial circle.
        double bound = 0.0;
        for (int k = 0; k < deg; ++k) bound = std::max(bound, std::abs(c[k] / c.back()));
        double radius = 1.0 + bound;

        std::mt19937_64 rng(opts.seed);
        std::uniform_real_distribution<double> unit(-1.0, 1.0);

        bool converged = false;
        double best_residual = std::numeric_limits<double>::infinity();
        std::vector<cplx> best;
        for (int attempt = 0; attempt <= opts.restarts && !converged; ++attempt) {
            iterates.resize(deg);
            for (int k = 0; k < deg; ++k) {
                double a = 2.0 * std::numbers::pi * (k + 0.25) / deg + 0.42;
                cplx jitter = attempt == 0 ? cplx{0.0, 0.0}
                                           : cplx{unit(rng), unit(rng)} * (0.3 * radius);
                iterates[k] = radius * std::polar(1.0, a) + jitter;
            }
            for (int it = 0; it < opts.max_iter; ++it) {
                double worst = detail::aberth_sweep(q, iterates);
                if (worst < 1e-14) break;
            }
            double res = 0.0;
            for (cplx z : iterates) res = std::max(res, std::abs(q(z)) / detail::residual_scale(q, z));
            if (res < best_residual) {
                best_residual = res;
                best = iterates;
            }
            converged = res <= opts.tol;
        }
        if (!converged) {
            best.insert(best.end(), zeros_at_origin, cplx{0.0, 0.0});
            throw RootFindingError("roots: iteration failed to converge", best);
        }
        for (cplx z : iterates) result.push_back({z, 1});
    }

    // Multiplicity clustering: largest candidate multiplicity first, since the
    // merge radius tol^(1/m) shrinks as m does.
    int total = 0;
    for (const auto& r : result) total += r.multiplicity;
    for (int m = total; m >= 2; --m) {
        double radius = opts.cluster_factor * std::pow(opts.tol, 1.0 / m);
        bool merged = true;
        while (merged) {
            merged = false;
            for (std::size_t i = 0; i < result.size() && !merged; ++i) {
                for (std::size_t j = i + 1; j < result.size() && !merged; ++j) {
                    double scale = std::max({1.0, std::abs(result[i].root), std::abs(result[j].root)});
                    if (result[i].multiplicity + result[j].multiplicity < m) continue;
                    if (std::abs(result[i].root - result[j].root) > radius * scale) continue;
                    int mi = result[i].multiplicity, mj = result[j].multiplicity;
                    result[i].root = (result[i].root * double(mi) + result[j].root * double(mj)) /
                                     double(mi + mj);
                    result[i].multiplicity = mi + mj;
                    result.erase(result.begin() + static_cast<std::ptrdiff_t>(j));
                    merged = true;
                }
            }
        }
    }

    // Polish simple roots with a couple of Newton steps.
    for (auto& r : result) {
        if (r.multiplicity != 1) continue;
        for (int it = 0; it < 3; ++it) {
            auto [pv, pd] = p.eval_with_derivative(r.root);
            if (std::abs(pd) < 1e-300) break;
            cplx step = pv / pd;
            if (std::abs(step) > 0.5 * (1.0 + std::abs(r.root))) break;
            r.root -= step;
        }
    }

    std::sort(result.begin(), result.end(), [](const RootCluster& a, const RootCluster& b) {
        if (a.root.real() != b.root.real()) return a.root.real() < b.root.real();
        return a.root.imag() < b.root.imag();
    });
    return result;
}

inline std::vector<RootCluster> roots(const ComplexPolynomial& p, double tol) {
    RootOptions opts;
    opts.tol = tol;
    return roots(p, opts);
}

}  // namespace scurve
