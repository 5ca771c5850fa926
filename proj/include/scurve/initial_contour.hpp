#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "scurve/contour.hpp"
#include "scurve/forbidden.hpp"
#include "scurve/partition.hpp"
#include "scurve/sectors.hpp"

namespace scurve {

namespace detail {

inline std::vector<cplx> chord_nodes(cplx a, cplx b, int count) {
    std::vector<cplx> nodes;
    for (int k = 0; k <= count; ++k)
        nodes.push_back(a + (b - a) * (static_cast<double>(k) / count));
    return nodes;
}

inline std::vector<cplx> circle_arc_nodes(double radius, double a0, double a1, bool shorter) {
    double delta = normalize_angle(a1 - a0);
    if (shorter == (delta > std::numbers::pi)) delta -= 2.0 * std::numbers::pi;
    int count = std::max(4, static_cast<int>(std::ceil(std::abs(delta) / 0.08)));
    std::vector<cplx> nodes;
    for (int k = 0; k <= count; ++k)
        nodes.push_back(std::polar(radius, a0 + delta * k / count));
    return nodes;
}

inline bool polyline_avoids(const std::vector<cplx>& nodes, const ForbiddenRegion* forbidden) {
    if (!forbidden) return true;
    for (cplx z : nodes)
        if (forbidden->contains(z)) return false;
    return true;
}

}  // namespace detail

/// One contour component per multi-sector block: rays along the block's sector
/// axes, truncated at r_trunc, with feet on the circle |z| = r_join joined by
/// straight chords. A chord that dips into the forbidden region is replaced by
/// a detour along the join circle; if both circle sides are blocked too, the
/// configuration is rejected.
inline Contour initial_contour(const NoncrossingPartition& partition, const SectorSet& secs,
                               double r_join, double r_trunc,
                               const ForbiddenRegion* forbidden = nullptr) {
    if (r_join <= 0.0 || r_trunc <= r_join)
        throw ConfigurationError("initial contour: need 0 < r_join < r_trunc");

    Contour contour;
    int component = 0;
    for (const auto& block : partition.p0()) {
        std::vector<double> angles;
        for (int j : block) angles.push_back(secs.angle(j));
        std::vector<std::size_t> order(angles.size());
        for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return angles[a] < angles[b]; });

        for (std::size_t k = 0; k < order.size(); ++k) {
            double th = angles[order[k]];
            int sector = block[order[k]];
            std::vector<cplx> ray{std::polar(r_join, th), std::polar(r_trunc, th)};
            contour.arcs.push_back(std::move(ray));
            contour.components.push_back(component);
            contour.rays.push_back({static_cast<int>(contour.arcs.size()) - 1, true, sector});
        }
        for (std::size_t k = 0; k + 1 < order.size(); ++k) {
            double a0 = angles[order[k]], a1 = angles[order[k + 1]];
            cplx foot0 = std::polar(r_join, a0), foot1 = std::polar(r_join, a1);
            int count = std::max(8, static_cast<int>(std::ceil(std::abs(foot1 - foot0) / (0.1 * r_join))));
            std::vector<cplx> join = detail::chord_nodes(foot0, foot1, count);
            if (!detail::polyline_avoids(join, forbidden)) {
                join = detail::circle_arc_nodes(r_join, a0, a1, true);
                if (!detail::polyline_avoids(join, forbidden))
                    join = detail::circle_arc_nodes(r_join, a0, a1, false);
                if (!detail::polyline_avoids(join, forbidden))
                    throw ConfigurationError("initial contour: join blocked by forbidden region");
            }
            contour.arcs.push_back(std::move(join));
            contour.components.push_back(component);
        }
        ++component;
    }

    contour.validate_structure();
    contour.validate_admissible(partition, secs);
    return contour;
}

}  // namespace scurve
