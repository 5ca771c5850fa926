#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include <json.hpp>

#include "scurve/complex_poly.hpp"
#include "scurve/errors.hpp"

namespace scurve {

/// Probability measure supported on finitely many contour nodes. Each node
/// carries the local arclength cell it represents (seg_lengths) and the unit
/// tangent of the contour there; both feed the self-energy term and the
/// arclength stretch under pushforward.
struct DiscreteMeasure {
    std::vector<cplx> points;
    std::vector<double> weights;
    std::vector<double> seg_lengths;
    std::vector<cplx> tangents;

    std::size_t size() const { return points.size(); }

    void validate() const {
        if (points.empty()) throw ValidationError("measure: empty support");
        if (weights.size() != points.size() || seg_lengths.size() != points.size() ||
            tangents.size() != points.size())
            throw ValidationError("measure: field lengths differ");
        double sum = 0.0;
        for (double w : weights) {
            if (!(w >= 0.0)) throw ValidationError("measure: negative weight");
            sum += w;
        }
        if (std::abs(sum - 1.0) > 1e-12) throw ValidationError("measure: weights must sum to 1");
        for (std::size_t i = 0; i < points.size(); ++i)
            for (std::size_t j = i + 1; j < points.size(); ++j)
                if (points[i] == points[j]) throw ValidationError("measure: coincident support nodes");
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["points"] = nlohmann::json::array();
        for (cplx p : points) j["points"].push_back({p.real(), p.imag()});
        j["weights"] = weights;
        j["seg"] = seg_lengths;
        j["tan"] = nlohmann::json::array();
        for (cplx t : tangents) j["tan"].push_back({t.real(), t.imag()});
        return j;
    }

    static DiscreteMeasure from_json(const nlohmann::json& j) {
        DiscreteMeasure m;
        if (!j.contains("points") || !j.contains("weights") || !j.contains("seg"))
            throw ValidationError("measure JSON: points/weights/seg required");
        for (const auto& e : j["points"]) m.points.push_back({e[0].get<double>(), e[1].get<double>()});
        m.weights = j["weights"].get<std::vector<double>>();
        m.seg_lengths = j["seg"].get<std::vector<double>>();
        if (j.contains("tan"))
            for (const auto& e : j["tan"]) m.tangents.push_back({e[0].get<double>(), e[1].get<double>()});
        else
            m.tangents.assign(m.points.size(), cplx{1.0, 0.0});
        return m;
    }
};

namespace detail {

/// Potential at z of a unit charge spread uniformly over the straight segment of
/// length len centered at p with direction tan. Finite everywhere, including on
/// the segment itself; reduces to 1 - log(len/2) at the center.
inline double segment_potential(cplx z, cplx p, cplx tan, double len) {
    const cplx u = (z - p) * std::conj(tan) + 0.5 * len;
    auto xlogx = [](cplx v) -> cplx {
        if (std::abs(v) < 1e-300) return {0.0, 0.0};
        return v * std::log(v);
    };
    return -(xlogx(u) - xlogx(u - len)).real() / len + 1.0;
}

}  // namespace detail

/// Point-charge logarithmic potential: sum of w_i * log 1/|z - x_i|.
inline double log_potential(const DiscreteMeasure& mu, cplx z) {
    double u = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        double d = std::abs(z - mu.points[i]);
        if (d < 1e-300) throw SingularEvaluationError("log_potential: evaluation on a support node");
        u -= mu.weights[i] * std::log(d);
    }
    return u;
}

/// Potential with each node smeared uniformly over its arclength cell. Agrees
/// with log_potential away from the support but stays finite on it, which makes
/// it the right probe for variational conditions on and near the support.
inline double smeared_potential(const DiscreteMeasure& mu, cplx z) {
    double u = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i)
        u += mu.weights[i] *
             detail::segment_potential(z, mu.points[i], mu.tangents[i], mu.seg_lengths[i]);
    return u;
}

/// Discrete weighted energy: pairwise point-charge interaction, plus the
/// per-node self term w^2 * (1 - log(seg/2)) (the segment potential evaluated at
/// its own center), plus the external field term.
inline double weighted_energy(const DiscreteMeasure& mu, const ComplexPolynomial& V) {
    double e = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        for (std::size_t j = i + 1; j < mu.size(); ++j) {
            double d = std::abs(mu.points[i] - mu.points[j]);
            if (d < 1e-300) throw SingularEvaluationError("weighted_energy: coincident nodes");
            e -= 2.0 * mu.weights[i] * mu.weights[j] * std::log(d);
        }
        e += mu.weights[i] * mu.weights[i] * (1.0 - std::log(0.5 * mu.seg_lengths[i]));
        e += mu.weights[i] * V(mu.points[i]).real();
    }
    return e;
}

/// Cauchy transform: sum of w_i / (x_i - z).
inline cplx cauchy_transform(const DiscreteMeasure& mu, cplx z) {
    cplx c{0.0, 0.0};
    for (std::size_t i = 0; i < mu.size(); ++i) {
        cplx d = mu.points[i] - z;
        if (std::abs(d) < 1e-300)
            throw SingularEvaluationError("cauchy_transform: evaluation on a support node");
        c += mu.weights[i] / d;
    }
    return c;
}

/// Smooth compactly supported displacement field: a sum of radial C^2 bumps,
/// h(z) = sum_k amplitudes[k] * bump(|z - centers[k]| / bandwidth), where the
/// bump profile is 1 on [0, b], a quintic on [b, 3b], and 0 beyond 3b.
struct PerturbationField {
    std::vector<cplx> centers;
    std::vector<cplx> amplitudes;
    double bandwidth = 1.0;

    static double bump(double r, double b) {
        if (r <= b) return 1.0;
        if (r >= 3.0 * b) return 0.0;
        double s = 3.0 * b - r;
        return s * s * s * (2.0 * b * b - 3.0 * b * r + 3.0 * r * r) / (16.0 * b * b * b * b * b);
    }

    static double bump_slope(double r, double b) {
        if (r <= b || r >= 3.0 * b) return 0.0;
        double s = 3.0 * b - r;
        double b5 = 16.0 * b * b * b * b * b;
        return (-3.0 * s * s * (2.0 * b * b - 3.0 * b * r + 3.0 * r * r) +
                s * s * s * (6.0 * r - 3.0 * b)) /
               b5;
    }

    cplx operator()(cplx z) const {
        cplx h{0.0, 0.0};
        for (std::size_t k = 0; k < centers.size(); ++k)
            h += amplitudes[k] * bump(std::abs(z - centers[k]), bandwidth);
        return h;
    }

    /// Divided-difference diagonal along the unit direction u:
    /// lim_{t->0} (h(z + t u) - h(z)) / (t u).
    cplx directional_slope(cplx z, cplx u) const {
        cplx d{0.0, 0.0};
        for (std::size_t k = 0; k < centers.size(); ++k) {
            cplx rel = z - centers[k];
            double r = std::abs(rel);
            if (r < 1e-300) continue;
            double g = bump_slope(r, bandwidth);
            if (g == 0.0) continue;
            d += amplitudes[k] * g * ((u * std::conj(rel)).real() / r);
        }
        return d * std::conj(u);
    }

    double support_radius() const { return 3.0 * bandwidth; }

    /// Upper bound on sup |h|; exact for a single bump.
    double sup_norm_bound() const {
        double s = 0.0;
        for (cplx a : amplitudes) s += std::abs(a);
        return s;
    }

    /// Upper bound on the Lipschitz constant of h.
    double lipschitz_bound() const {
        return sup_norm_bound() * (15.0 / 16.0) / bandwidth;
    }
};

/// Image of mu under z -> z + t h(z): points move, weights are carried along,
/// arclength cells stretch by |1 + t h'| with h' the tangential slope.
inline DiscreteMeasure pushforward(const DiscreteMeasure& mu, const PerturbationField& h, double t) {
    if (std::abs(t) * h.lipschitz_bound() >= 1.0)
        throw StepTooLargeError("pushforward: |t| * Lip(h) >= 1");
    DiscreteMeasure out = mu;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        out.points[i] = mu.points[i] + t * h(mu.points[i]);
        cplx stretch = 1.0 + t * h.directional_slope(mu.points[i], mu.tangents[i]);
        if (std::abs(stretch) < 1e-2)
            throw StepTooLargeError("pushforward: local stretch collapsed");
        out.seg_lengths[i] = mu.seg_lengths[i] * std::abs(stretch);
        out.tangents[i] = mu.tangents[i] * stretch / std::abs(stretch);
    }
    return out;
}

/// Derivative of the discrete weighted energy along the deformation h:
/// -Re( sum_{i != j} w_i w_j (h_i - h_j)/(x_i - x_j)
///      + sum_i w_i^2 h'(x_i)  -  sum_i w_i V'(x_i) h(x_i) ),
/// with the diagonal h' taken along the node tangent. This is the exact t-derivative
/// of weighted_energy(pushforward(mu, h, t), V) at t = 0.
inline double energy_derivative(const DiscreteMeasure& mu, const ComplexPolynomial& V,
                                const PerturbationField& h) {
    const std::size_t n = mu.size();
    std::vector<cplx> hv(n);
    for (std::size_t i = 0; i < n; ++i) hv[i] = h(mu.points[i]);

    double pair_term = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            cplx kernel = (hv[i] - hv[j]) / (mu.points[i] - mu.points[j]);
            pair_term += 2.0 * mu.weights[i] * mu.weights[j] * kernel.real();
        }

    double diag_term = 0.0;
    double field_term = 0.0;
    const ComplexPolynomial dV = V.derivative();
    for (std::size_t i = 0; i < n; ++i) {
        diag_term += mu.weights[i] * mu.weights[i] *
                     h.directional_slope(mu.points[i], mu.tangents[i]).real();
        field_term += mu.weights[i] * (dV(mu.points[i]) * hv[i]).real();
    }
    return -(pair_term + diag_term) + field_term;
}

}  // namespace scurve
