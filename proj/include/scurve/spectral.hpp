#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "scurve/complex_poly.hpp"
#include "scurve/equilibrium.hpp"
#include "scurve/measure.hpp"

namespace scurve {

/// Spectral polynomial from the measure's moments:
/// R(z) = (V'(z)/2)^2 - P(z), where P is the polynomial part of the divided
/// difference integral: with V'(z) = sum_j c_j z^j and moments m_k, the z^b
/// coefficient of P is sum_{j > b} c_j m_{j-1-b}. Exact in the moments; for a
/// probability measure deg(R - (V'/2)^2) = deg V - 2 with leading coefficient
/// minus that of V'.
inline ComplexPolynomial r_from_measure(const DiscreteMeasure& mu, const ComplexPolynomial& V) {
    const ComplexPolynomial dV = V.derivative();
    const int dn = dV.degree();
    if (dn < 1) throw ValidationError("r_from_measure: field degree must be >= 2");

    std::vector<cplx> moments(static_cast<std::size_t>(dn), cplx{0.0, 0.0});
    for (std::size_t i = 0; i < mu.size(); ++i) {
        cplx pw{1.0, 0.0};
        for (int k = 0; k < dn; ++k) {
            moments[static_cast<std::size_t>(k)] += mu.weights[i] * pw;
            pw *= mu.points[i];
        }
    }

    std::vector<cplx> p(static_cast<std::size_t>(dn), cplx{0.0, 0.0});
    for (int b = 0; b < dn; ++b)
        for (int j = b + 1; j <= dn; ++j)
            p[static_cast<std::size_t>(b)] += dV.coeff(j) * moments[static_cast<std::size_t>(j - 1 - b)];

    ComplexPolynomial half_dv = dV * cplx{0.5, 0.0};
    return half_dv * half_dv - ComplexPolynomial(std::move(p));
}

/// One connected run of active support nodes, in contour order.
struct SupportArc {
    std::vector<int> nodes;
    double mass = 0.0;
    double omega = 0.0;
    double omega_std = 0.0;
    bool omega_valid = false;
};

/// Split the active support of a converged solve into arcs: maximal runs of
/// consecutive active nodes within a contour arc; runs whose ends almost touch
/// (junctions, remesh seams) are merged.
inline std::vector<SupportArc> support_arcs(const EquilibriumResult& res, const Mesh& mesh) {
    std::vector<SupportArc> arcs;
    SupportArc current;
    auto flush = [&]() {
        if (!current.nodes.empty()) arcs.push_back(std::move(current));
        current = SupportArc{};
    };
    for (std::size_t i = 0; i < mesh.size(); ++i) {
        bool same_run = !current.nodes.empty() &&
                        mesh.arc_of[i] == mesh.arc_of[static_cast<std::size_t>(current.nodes.back())] &&
                        static_cast<std::size_t>(current.nodes.back()) + 1 == i;
        if (!res.active[i]) {
            flush();
            continue;
        }
        if (!same_run) flush();
        current.nodes.push_back(static_cast<int>(i));
        current.mass += res.mu.weights[i];
    }
    flush();

    // Merge runs whose ends nearly coincide (arc junctions); contour arcs can
    // meet in any head/tail combination, so chains get reversed as needed.
    auto close = [&](int i, int j) {
        double link = 2.5 * std::max(mesh.seg[static_cast<std::size_t>(i)],
                                     mesh.seg[static_cast<std::size_t>(j)]);
        return std::abs(mesh.points[static_cast<std::size_t>(i)] -
                        mesh.points[static_cast<std::size_t>(j)]) < link;
    };
    bool merged = true;
    while (merged) {
        merged = false;
        for (std::size_t a = 0; a < arcs.size() && !merged; ++a)
            for (std::size_t b = a + 1; b < arcs.size() && !merged; ++b) {
                auto& na = arcs[a].nodes;
                auto& nb = arcs[b].nodes;
                if (close(na.back(), nb.front())) {
                    // head-to-tail, keep order
                } else if (close(na.back(), nb.back())) {
                    std::reverse(nb.begin(), nb.end());
                } else if (close(na.front(), nb.front())) {
                    std::reverse(na.begin(), na.end());
                } else if (close(na.front(), nb.back())) {
                    std::swap(na, nb);
                } else {
                    continue;
                }
                na.insert(na.end(), nb.begin(), nb.end());
                arcs[a].mass += arcs[b].mass;
                arcs.erase(arcs.begin() + static_cast<std::ptrdiff_t>(b));
                merged = true;
            }
    }
    return arcs;
}

/// Per-arc mean of U + phi/2 over interior nodes, with its standard deviation as
/// a flatness diagnostic. Arcs with fewer than 3 interior nodes stay unset.
inline void omega_constants(const DiscreteMeasure& mu, const ComplexPolynomial& V,
                            std::vector<SupportArc>& arcs) {
    for (auto& arc : arcs) {
        if (arc.nodes.size() < 5) {
            arc.omega_valid = false;
            continue;
        }
        double sum = 0.0, sq = 0.0;
        int count = 0;
        for (std::size_t k = 1; k + 1 < arc.nodes.size(); ++k) {
            cplx z = mu.points[static_cast<std::size_t>(arc.nodes[k])];
            double g = smeared_potential(mu, z) + 0.5 * V(z).real();
            sum += g;
            sq += g * g;
            ++count;
        }
        arc.omega = sum / count;
        arc.omega_std = std::sqrt(std::max(0.0, sq / count - arc.omega * arc.omega));
        arc.omega_valid = true;
    }
}

/// Mismatch of the two one-sided normal derivatives of U + phi/2 across the
/// support: max over interior nodes of |G(z + s n) - G(z - s n)| / s, with the
/// offset s a few node spacings. Corner nodes (tangent turning > 30 degrees)
/// are skipped.
inline double s_residual(const DiscreteMeasure& mu, const ComplexPolynomial& V,
                         const std::vector<SupportArc>& arcs, double step = 0.0) {
    if (step <= 0.0) {
        std::vector<double> segs;
        for (const auto& arc : arcs)
            for (int i : arc.nodes) segs.push_back(mu.seg_lengths[static_cast<std::size_t>(i)]);
        if (segs.empty()) return 0.0;
        std::nth_element(segs.begin(), segs.begin() + static_cast<std::ptrdiff_t>(segs.size() / 2),
                         segs.end());
        step = 3.0 * segs[segs.size() / 2];
    }
    double worst = 0.0;
    for (const auto& arc : arcs) {
        for (std::size_t k = 1; k + 1 < arc.nodes.size(); ++k) {
            auto idx = static_cast<std::size_t>(arc.nodes[k]);
            cplx t_prev = mu.tangents[static_cast<std::size_t>(arc.nodes[k - 1])];
            cplx t_next = mu.tangents[static_cast<std::size_t>(arc.nodes[k + 1])];
            if (std::abs(std::arg(t_next * std::conj(t_prev))) > std::numbers::pi / 6.0)
                continue;  // corner: normal ill-defined
            cplx normal = cplx{0.0, 1.0} * mu.tangents[idx];
            cplx zp = mu.points[idx] + step * normal;
            cplx zm = mu.points[idx] - step * normal;
            double gp = smeared_potential(mu, zp) + 0.5 * V(zp).real();
            double gm = smeared_potential(mu, zm) + 0.5 * V(zm).real();
            worst = std::max(worst, std::abs(gp - gm) / step);
        }
    }
    return worst;
}

/// Normal and tangential unit bumps at every stride-th mesh node.
inline std::vector<PerturbationField> criticality_basis(const Mesh& mesh, int stride = 4,
                                                        double bandwidth_spacings = 6.0) {
    std::vector<PerturbationField> basis;
    for (std::size_t i = 0; i < mesh.size(); i += static_cast<std::size_t>(stride)) {
        for (cplx dir : {mesh.tangents[i], cplx{0.0, 1.0} * mesh.tangents[i]}) {
            PerturbationField h;
            h.centers = {mesh.points[i]};
            h.amplitudes = {dir};
            h.bandwidth = bandwidth_spacings * mesh.seg[i];
            basis.push_back(std::move(h));
        }
    }
    return basis;
}

/// Largest energy drift over the basis, normalized by the field sup-norm.
inline double criticality_residual(const DiscreteMeasure& mu, const ComplexPolynomial& V,
                                   const std::vector<PerturbationField>& basis) {
    double worst = 0.0;
    for (const auto& h : basis)
        worst = std::max(worst, std::abs(energy_derivative(mu, V, h)) / h.sup_norm_bound());
    return worst;
}

struct AlgebraicReport {
    double value = 0.0;
    int probes_used = 0;
    int probes_rejected = 0;
};

/// Checks (C^mu + V'/2)^2 = R at probe points away from the support; probes
/// closer than 5 node spacings are rejected.
inline AlgebraicReport algebraic_residual(const DiscreteMeasure& mu, const ComplexPolynomial& V,
                                          const ComplexPolynomial& R, std::span<const cplx> probes) {
    std::vector<double> segs = mu.seg_lengths;
    std::nth_element(segs.begin(), segs.begin() + static_cast<std::ptrdiff_t>(segs.size() / 2),
                     segs.end());
    const double keepout = 5.0 * segs[segs.size() / 2];
    const ComplexPolynomial dV = V.derivative();
    AlgebraicReport rep;
    for (cplx z : probes) {
        double dist = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < mu.size(); ++i)
            if (mu.weights[i] > 0.0) dist = std::min(dist, std::abs(z - mu.points[i]));
        if (dist < keepout) {
            ++rep.probes_rejected;
            continue;
        }
        cplx lhs = cauchy_transform(mu, z) + 0.5 * dV(z);
        cplx rv = R(z);
        rep.value = std::max(rep.value, std::abs(lhs * lhs - rv) / (1.0 + std::abs(rv)));
        ++rep.probes_used;
    }
    return rep;
}

}  // namespace scurve
