#pragma once

#include <cmath>
#include <optional>
#include <span>

#include "scurve/complex_poly.hpp"
#include "scurve/errors.hpp"

namespace scurve {

/// Chordal distance on the Riemann sphere (diameter-1 model):
/// |z - w| / (sqrt(1+|z|^2) * sqrt(1+|w|^2)).
inline double chordal_distance(cplx z, cplx w) {
    return std::abs(z - w) / (std::sqrt(1.0 + std::norm(z)) * std::sqrt(1.0 + std::norm(w)));
}

inline double chordal_distance_to_infinity(cplx z) {
    return 1.0 / std::sqrt(1.0 + std::norm(z));
}

/// Overload treating std::nullopt as the point at infinity.
inline double chordal_distance(std::optional<cplx> z, std::optional<cplx> w) {
    if (z && w) return chordal_distance(*z, *w);
    if (!z && !w) return 0.0;
    return chordal_distance_to_infinity(z ? *z : *w);
}

/// Hausdorff distance between two finite point clouds in the chordal metric:
/// the larger of the two directed sup-inf distances.
inline double hausdorff_distance(std::span<const cplx> a, std::span<const cplx> b) {
    if (a.empty() || b.empty()) throw ValidationError("hausdorff_distance: empty point cloud");
    double h = 0.0;
    for (cplx x : a) {
        double d = std::numeric_limits<double>::infinity();
        for (cplx y : b) d = std::min(d, chordal_distance(x, y));
        h = std::max(h, d);
    }
    for (cplx y : b) {
        double d = std::numeric_limits<double>::infinity();
        for (cplx x : a) d = std::min(d, chordal_distance(x, y));
        h = std::max(h, d);
    }
    return h;
}

/// Same two-sided sup-inf construction in the plain Euclidean metric; used for
/// bounded sets where node spacings are the natural scale.
inline double euclidean_hausdorff(std::span<const cplx> a, std::span<const cplx> b) {
    if (a.empty() || b.empty()) throw ValidationError("euclidean_hausdorff: empty point cloud");
    double h = 0.0;
    for (cplx x : a) {
        double d = std::numeric_limits<double>::infinity();
        for (cplx y : b) d = std::min(d, std::abs(x - y));
        h = std::max(h, d);
    }
    for (cplx y : b) {
        double d = std::numeric_limits<double>::infinity();
        for (cplx x : a) d = std::min(d, std::abs(x - y));
        h = std::max(h, d);
    }
    return h;
}

}  // namespace scurve
