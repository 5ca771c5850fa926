#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "scurve/complex_poly.hpp"
#include "scurve/errors.hpp"

namespace scurve {

/// Normalize an angle to [0, 2*pi).
inline double normalize_angle(double a) {
    const double two_pi = 2.0 * std::numbers::pi;
    a = std::fmod(a, two_pi);
    if (a < 0.0) a += two_pi;
    if (a >= two_pi) a -= two_pi;  // fmod can land exactly on 2*pi after the shift
    return a;
}

/// Smallest absolute difference between two angles modulo 2*pi.
inline double angle_distance(double a, double b) {
    const double two_pi = 2.0 * std::numbers::pi;
    double d = std::fmod(std::abs(a - b), two_pi);
    return std::min(d, two_pi - d);
}

/// The N growth directions of the external field Re V, V of degree N with leading
/// coefficient a0: theta_j = -arg(a0)/N + 2*pi*(j-1)/N for j = 1..N. The field
/// tends to +infinity along each ray arg z = theta_j; each sector has angular
/// half-width pi/(2N). Sector j (1-based) has its axis at angles()[j-1].
struct SectorSet {
    int count = 0;
    std::vector<double> angles;  // normalized to [0, 2*pi)
    double half_width = 0.0;

    double angle(int j) const {  // 1-based sector index
        if (j < 1 || j > count) throw ValidationError("sector index out of range");
        return angles[static_cast<std::size_t>(j - 1)];
    }
};

inline SectorSet sectors(const ComplexPolynomial& V) {
    const int n = V.degree();
    if (n < 2) throw ValidationError("sectors: external field must have degree >= 2");
    SectorSet s;
    s.count = n;
    s.half_width = std::numbers::pi / (2.0 * n);
    double base = -std::arg(V.leading()) / n;
    s.angles.reserve(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j)
        s.angles.push_back(normalize_angle(base + 2.0 * std::numbers::pi * j / n));
    return s;
}

}  // namespace scurve
