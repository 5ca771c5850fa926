#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "scurve/complex_poly.hpp"
#include "scurve/errors.hpp"
#include "scurve/partition.hpp"
#include "scurve/sectors.hpp"

namespace scurve {

/// Marks one unbounded end of an arc: which arc, which end, and the sector
/// (1-based) the truncated ray stretches into.
struct RayTag {
    int arc = 0;
    bool at_head = true;  // head = last node of the polyline, tail = first
    int sector = 0;
};

/// Finite union of oriented polylines with truncated unbounded ends. Arcs in the
/// same connected component share endpoints; the component id of arc i is
/// components[i].
struct Contour {
    std::vector<std::vector<cplx>> arcs;
    std::vector<RayTag> rays;
    std::vector<int> components;

    double arc_length(std::size_t i) const {
        double s = 0.0;
        for (std::size_t k = 1; k < arcs[i].size(); ++k) s += std::abs(arcs[i][k] - arcs[i][k - 1]);
        return s;
    }

    double total_length() const {
        double s = 0.0;
        for (std::size_t i = 0; i < arcs.size(); ++i) s += arc_length(i);
        return s;
    }

    double extent() const {
        double r = 0.0;
        for (const auto& a : arcs)
            for (cplx z : a) r = std::max(r, std::abs(z));
        return r;
    }

    /// Structural sanity: every arc has >= 2 nodes, no duplicated consecutive
    /// nodes, tags and component ids in range.
    void validate_structure() const {
        if (arcs.empty()) throw ValidationError("contour: no arcs");
        if (components.size() != arcs.size())
            throw ValidationError("contour: component map size mismatch");
        double scale = std::max(extent(), 1e-12);
        for (const auto& a : arcs) {
            if (a.size() < 2) throw ValidationError("contour: arc with fewer than 2 nodes");
            for (std::size_t k = 1; k < a.size(); ++k)
                if (std::abs(a[k] - a[k - 1]) <= 1e-14 * scale)
                    throw ValidationError("contour: duplicated consecutive nodes");
        }
        for (const auto& t : rays) {
            if (t.arc < 0 || t.arc >= static_cast<int>(arcs.size()))
                throw ValidationError("contour: ray tag references missing arc");
            if (t.sector < 1) throw ValidationError("contour: ray tag with invalid sector");
        }
    }

    /// Admissibility for the class defined by the partition: every component is
    /// connected (arcs chained through shared endpoints), carries at least two
    /// rays, and for each multi-sector block some component covers all of its
    /// sectors. Ray ends must point into their sectors.
    void validate_admissible(const NoncrossingPartition& partition, const SectorSet& secs) const {
        validate_structure();
        double eps = 1e-9 * std::max(extent(), 1.0);

        std::set<int> comp_ids(components.begin(), components.end());
        if (static_cast<int>(comp_ids.size()) > static_cast<int>(partition.p0().size()))
            throw ValidationError("contour: more components than multi-sector blocks");

        for (int id : comp_ids) {
            std::vector<int> members;
            for (std::size_t i = 0; i < arcs.size(); ++i)
                if (components[i] == id) members.push_back(static_cast<int>(i));
            // connectivity via coincident endpoints
            std::vector<bool> reached(members.size(), false);
            reached[0] = true;
            bool grew = true;
            auto touches = [&](int a, int b) {
                for (cplx pa : {arcs[a].front(), arcs[a].back()})
                    for (cplx pb : {arcs[b].front(), arcs[b].back()})
                        if (std::abs(pa - pb) <= eps) return true;
                return false;
            };
            while (grew) {
                grew = false;
                for (std::size_t i = 0; i < members.size(); ++i) {
                    if (reached[i]) continue;
                    for (std::size_t j = 0; j < members.size(); ++j)
                        if (reached[j] && touches(members[i], members[j])) {
                            reached[i] = true;
                            grew = true;
                            break;
                        }
                }
            }
            if (!std::all_of(reached.begin(), reached.end(), [](bool b) { return b; }))
                throw ValidationError("contour: disconnected component");

            int ray_count = 0;
            for (const auto& t : rays)
                if (components[static_cast<std::size_t>(t.arc)] == id) ++ray_count;
            if (ray_count < 2) throw ValidationError("contour: bounded component (needs >= 2 rays)");
        }

        for (const auto& t : rays) {
            cplx tip = t.at_head ? arcs[static_cast<std::size_t>(t.arc)].back()
                                 : arcs[static_cast<std::size_t>(t.arc)].front();
            if (t.sector > secs.count) throw ValidationError("contour: ray sector out of range");
            if (angle_distance(std::arg(tip), secs.angle(t.sector)) > secs.half_width + 1e-9)
                throw ValidationError("contour: ray tip outside its sector");
        }

        for (const auto& block : partition.p0()) {
            bool satisfied = false;
            for (int id : comp_ids) {
                std::set<int> covered;
                for (const auto& t : rays)
                    if (components[static_cast<std::size_t>(t.arc)] == id) covered.insert(t.sector);
                if (std::all_of(block.begin(), block.end(),
                                [&](int s) { return covered.count(s) > 0; })) {
                    satisfied = true;
                    break;
                }
            }
            if (!satisfied)
                throw ValidationError("contour: no component covers all sectors of a block");
        }
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["arcs"] = nlohmann::json::array();
        for (const auto& a : arcs) {
            nlohmann::json poly = nlohmann::json::array();
            for (cplx z : a) poly.push_back({z.real(), z.imag()});
            j["arcs"].push_back(poly);
        }
        j["rays"] = nlohmann::json::array();
        for (const auto& t : rays)
            j["rays"].push_back({{"arc", t.arc}, {"end", t.at_head ? "head" : "tail"}, {"sector", t.sector}});
        j["components"] = components;
        return j;
    }

    static Contour from_json(const nlohmann::json& j) {
        Contour c;
        if (!j.contains("arcs") || !j["arcs"].is_array())
            throw ValidationError("contour JSON: missing arcs");
        for (const auto& poly : j["arcs"]) {
            std::vector<cplx> a;
            for (const auto& e : poly) a.push_back({e[0].get<double>(), e[1].get<double>()});
            c.arcs.push_back(std::move(a));
        }
        if (j.contains("rays"))
            for (const auto& t : j["rays"])
                c.rays.push_back({t["arc"].get<int>(), t["end"].get<std::string>() == "head",
                                  t["sector"].get<int>()});
        if (j.contains("components"))
            c.components = j["components"].get<std::vector<int>>();
        else
            c.components.assign(c.arcs.size(), 0);
        c.validate_structure();
        return c;
    }
};

/// Quadrature mesh over a contour: nodes at arclength cell midpoints, one cell
/// length and one unit tangent per node, plus the owning arc index.
struct Mesh {
    std::vector<cplx> points;
    std::vector<double> seg;
    std::vector<cplx> tangents;
    std::vector<int> arc_of;

    std::size_t size() const { return points.size(); }

    double median_spacing() const {
        if (seg.empty()) return 0.0;
        std::vector<double> s = seg;
        std::nth_element(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(s.size() / 2), s.end());
        return s[s.size() / 2];
    }
};

namespace detail {

/// Point and unit tangent at arclength s along a polyline.
inline std::pair<cplx, cplx> polyline_at(const std::vector<cplx>& poly, double s) {
    for (std::size_t k = 1; k < poly.size(); ++k) {
        double len = std::abs(poly[k] - poly[k - 1]);
        if (s <= len || k + 1 == poly.size()) {
            cplx dir = (poly[k] - poly[k - 1]) / std::max(len, 1e-300);
            double t = std::clamp(len > 0.0 ? s / len : 0.0, 0.0, 1.0);
            return {poly[k - 1] + t * (poly[k] - poly[k - 1]), dir};
        }
        s -= len;
    }
    return {poly.back(), cplx{1.0, 0.0}};
}

}  // namespace detail

/// Distribute n nodes over the arcs proportionally to arclength (largest
/// remainder, at least one per arc) and place them at cell midpoints, so arc
/// junction points are never duplicated as nodes.
inline Mesh discretize(const Contour& contour, int n) {
    if (n < static_cast<int>(contour.arcs.size()))
        throw ValidationError("discretize: fewer nodes than arcs");
    double total = contour.total_length();
    if (total <= 0.0) throw ValidationError("discretize: contour has zero length");

    std::vector<int> alloc(contour.arcs.size(), 1);
    std::vector<double> want(contour.arcs.size());
    int assigned = static_cast<int>(contour.arcs.size());
    for (std::size_t i = 0; i < contour.arcs.size(); ++i)
        want[i] = contour.arc_length(i) / total * n;
    for (std::size_t i = 0; i < contour.arcs.size(); ++i) {
        int extra = static_cast<int>(std::floor(want[i])) - 1;
        if (extra > 0) {
            alloc[i] += extra;
            assigned += extra;
        }
    }
    while (assigned < n) {
        std::size_t best = 0;
        double best_gap = -1.0;
        for (std::size_t i = 0; i < contour.arcs.size(); ++i) {
            double gap = want[i] - alloc[i];
            if (gap > best_gap) {
                best_gap = gap;
                best = i;
            }
        }
        ++alloc[best];
        ++assigned;
    }

    Mesh mesh;
    mesh.points.reserve(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < contour.arcs.size(); ++i) {
        double len = contour.arc_length(i);
        int k = alloc[i];
        double h = len / k;
        for (int m = 0; m < k; ++m) {
            auto [z, tan] = detail::polyline_at(contour.arcs[i], (m + 0.5) * h);
            mesh.points.push_back(z);
            mesh.seg.push_back(h);
            mesh.tangents.push_back(tan);
            mesh.arc_of.push_back(static_cast<int>(i));
        }
    }
    return mesh;
}

/// Rebuild per-arc polylines from a (possibly deformed) mesh, keeping the
/// original arc endpoints where the deformation left them.
inline Contour contour_from_mesh(const Contour& structure, const Mesh& mesh,
                                 const std::vector<std::vector<cplx>>& arc_endpoints) {
    Contour out = structure;
    for (std::size_t i = 0; i < out.arcs.size(); ++i) {
        std::vector<cplx> poly;
        poly.push_back(arc_endpoints[i][0]);
        for (std::size_t k = 0; k < mesh.size(); ++k)
            if (mesh.arc_of[k] == static_cast<int>(i)) poly.push_back(mesh.points[k]);
        poly.push_back(arc_endpoints[i][1]);
        // deformation can push a midpoint node onto an endpoint; drop exact dups
        std::vector<cplx> clean;
        for (cplx z : poly)
            if (clean.empty() || std::abs(z - clean.back()) > 1e-14 * (1.0 + std::abs(z)))
                clean.push_back(z);
        out.arcs[i] = std::move(clean);
    }
    return out;
}

}  // namespace scurve
