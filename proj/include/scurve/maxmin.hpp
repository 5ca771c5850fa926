#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

#include <json.hpp>

#include "scurve/complex_poly.hpp"
#include "scurve/contour.hpp"
#include "scurve/equilibrium.hpp"
#include "scurve/forbidden.hpp"
#include "scurve/initial_contour.hpp"
#include "scurve/measure.hpp"
#include "scurve/partition.hpp"
#include "scurve/roots.hpp"
#include "scurve/sectors.hpp"
#include "scurve/spectral.hpp"

namespace scurve {

struct MaxMinParams {
    int n = 400;
    double tol = 1e-9;       // inner KKT tolerance for the final solve
    double crit_tol = 0.0;   // outer termination max |D_h I| / ||h||; 0 = resolution-aware auto
    int restarts = 3;
    double M = 0.0;           // cut-off level; 0 = auto from the energy estimate
    double margin = 8.0;
    double r_join = 0.0;      // 0 = auto
    double r_trunc = 0.0;     // 0 = auto
    int max_outer = 300;
    std::uint64_t seed = 1;
    bool remesh = true;
    int basis_stride = 4;
    double basis_bandwidth = 6.0;  // bump bandwidth in node spacings
    int probe_count = 32;
};

struct Residuals {
    double el = 0.0;
    double el_supp = 0.0;
    double el_off = 0.0;
    double criticality = 0.0;
    double algebraic = 0.0;
    double s_property = 0.0;
};

struct SolvedArc {
    std::vector<int> node_indices;
    std::vector<cplx> polyline;
    std::vector<double> density;  // w_i / seg_i along the arc
    double omega = 0.0;
    double omega_std = 0.0;
    double mass = 0.0;
    bool omega_valid = false;
};

struct SCurveSolution {
    ComplexPolynomial V;
    std::vector<std::vector<int>> partition_blocks;
    Contour contour;
    DiscreteMeasure mu;
    double l = 0.0;
    double energy = 0.0;
    ComplexPolynomial R;
    ComplexPolynomial T;  // R - (V'/2)^2
    std::vector<SolvedArc> arcs;
    Residuals residuals;

    // checker-facing parameters
    cplx probe_center{0.0, 0.0};
    double probe_radius = 0.0;
    int probe_count = 32;
    double s_step = 0.0;
    int basis_stride = 4;
    double basis_bandwidth = 6.0;
    double node_spacing = 0.0;

    // diagnostics
    std::vector<double> energy_history;
    int outer_iterations = 0;
    int restarts_used = 0;
    bool converged = false;
    std::uint64_t seed = 0;

    nlohmann::json to_json() const;
    static SCurveSolution from_json(const nlohmann::json& j);
};

/// Outer iteration ran out of steps before reaching criticality; carries the
/// best iterate so partial output can still be written.
class MaxMinConvergenceError : public Error {
public:
    MaxMinConvergenceError(const std::string& what_arg, SCurveSolution best_arg)
        : Error(what_arg), best(std::move(best_arg)) {}

    SCurveSolution best;
};

namespace detail {

/// energy_derivative specialized for compactly supported fields: only pairs with
/// at least one node inside the bump support contribute.
inline double energy_derivative_sparse(const DiscreteMeasure& mu, const std::vector<cplx>& dv_values,
                                       const PerturbationField& h) {
    const std::size_t n = mu.size();
    std::vector<std::size_t> window;
    std::vector<cplx> hv(n, cplx{0.0, 0.0});
    const double radius = h.support_radius();
    for (std::size_t i = 0; i < n; ++i) {
        bool near = false;
        for (cplx c : h.centers)
            if (std::abs(mu.points[i] - c) < radius) {
                near = true;
                break;
            }
        if (!near) continue;
        hv[i] = h(mu.points[i]);
        window.push_back(i);
    }
    if (window.empty()) return 0.0;

    std::vector<bool> in_window(n, false);
    for (std::size_t i : window) in_window[i] = true;

    double pair_term = 0.0;
    for (std::size_t wi = 0; wi < window.size(); ++wi) {
        std::size_t i = window[wi];
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            if (in_window[j] && j < i) continue;  // count window pairs once
            cplx kernel = (hv[i] - hv[j]) / (mu.points[i] - mu.points[j]);
            pair_term += 2.0 * mu.weights[i] * mu.weights[j] * kernel.real();
        }
    }

    double diag_term = 0.0, field_term = 0.0;
    for (std::size_t i : window) {
        diag_term += mu.weights[i] * mu.weights[i] *
                     h.directional_slope(mu.points[i], mu.tangents[i]).real();
        field_term += mu.weights[i] * (dv_values[i] * hv[i]).real();
    }
    return -(pair_term + diag_term) + field_term;
}

struct DeformableContour {
    Contour structure;                          // arc/ray/component layout
    std::vector<std::vector<cplx>> endpoints;   // per arc: {tail, head}
    Mesh mesh;

    void init(const Contour& contour, int n) {
        structure = contour;
        endpoints.clear();
        for (const auto& a : contour.arcs) endpoints.push_back({a.front(), a.back()});
        mesh = discretize(contour, n);
    }

    Contour geometry() const { return contour_from_mesh(structure, mesh, endpoints); }

    /// Applies z -> z + t h(z) to mesh nodes and arc endpoints.
    void deform(const PerturbationField& h, double t) {
        for (std::size_t i = 0; i < mesh.size(); ++i) {
            cplx stretch = 1.0 + t * h.directional_slope(mesh.points[i], mesh.tangents[i]);
            if (std::abs(stretch) < 1e-2) throw StepTooLargeError("deform: stretch collapsed");
            mesh.points[i] += t * h(mesh.points[i]);
            mesh.seg[i] *= std::abs(stretch);
            mesh.tangents[i] *= stretch / std::abs(stretch);
        }
        for (auto& ab : endpoints)
            for (auto& e : ab) e += t * h(e);
    }

    /// Re-sample the node chains; with weights given, node density doubles in
    /// the heavy cells (the support), which also lowers the criticality floor.
    void remesh(int n, const std::vector<double>* weights = nullptr) {
        Contour geo = geometry();
        structure = geo;
        endpoints.clear();
        for (const auto& a : geo.arcs) endpoints.push_back({a.front(), a.back()});
        if (weights)
            mesh = remesh_by_weight(geo, mesh, *weights);
        else
            mesh = discretize(geo, n);
    }

    /// Stretch the tagged ray arcs further out along their end direction.
    void extend_ray(const RayTag& tag, double factor) {
        auto& ends = endpoints[static_cast<std::size_t>(tag.arc)];
        const auto& poly = structure.arcs[static_cast<std::size_t>(tag.arc)];
        cplx tip = tag.at_head ? ends[1] : ends[0];
        cplx inner = tag.at_head ? poly[poly.size() - 2] : poly[1];
        cplx dir = tip - inner;
        dir /= std::max(std::abs(dir), 1e-300);
        cplx new_tip = tip + dir * (factor - 1.0) * std::abs(tip);
        (tag.at_head ? ends[1] : ends[0]) = new_tip;
        auto& arc = structure.arcs[static_cast<std::size_t>(tag.arc)];
        if (tag.at_head)
            arc.back() = new_tip;
        else
            arc.front() = new_tip;
    }
};

struct RestartState {
    DeformableContour dc;
    EquilibriumResult res;
    double energy = 0.0;
    std::vector<double> energy_history;
    int outer_iterations = 0;
    bool converged = false;
    double final_crit = 0.0;
};

}  // namespace detail

namespace detail {

inline EquilibriumOptions inner_options(double level) {
    EquilibriumOptions opts;
    opts.remesh = false;
    opts.field_floor = -1.2 * level;
    return opts;
}

/// Smallest truncation radius at which the field at every ray tip clears the
/// target value.
inline double auto_trunc_radius(const ComplexPolynomial& V, const SectorSet& secs, double start,
                                double target) {
    double r = start;
    for (int guard = 0; guard < 200; ++guard) {
        bool ok = true;
        for (double th : secs.angles)
            if (V(std::polar(r, th)).real() < target) ok = false;
        if (ok) return r;
        r *= 1.25;
    }
    throw ConfigurationError("could not find a truncation radius with field growth on all rays");
}

inline double ray_slack(const RestartState& st, const RayTag& tag, const ComplexPolynomial& V) {
    const auto& ends = st.dc.endpoints[static_cast<std::size_t>(tag.arc)];
    cplx tip = tag.at_head ? ends[1] : ends[0];
    double g = smeared_potential(st.res.mu, tip) + 0.5 * V(tip).real();
    return g - st.res.l;
}

inline void run_restart(RestartState& st, const ComplexPolynomial& V,
                        const NoncrossingPartition& partition, const SectorSet& secs,
                        const ForbiddenRegion& fr, const MaxMinParams& params, double r_join,
                        double r_trunc, std::uint64_t restart_seed, bool jitter) {
    std::mt19937_64 rng(restart_seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);

    double rj = r_join;
    if (jitter) rj *= 1.1 + 0.45 * unit(rng);
    Contour contour;
    for (int attempt = 0;; ++attempt) {
        try {
            contour = initial_contour(partition, secs, rj, r_trunc, &fr);
            break;
        } catch (const ConfigurationError&) {
            if (attempt >= 4) throw;
            rj *= 1.3;
        }
    }
    if (jitter) {
        // random admissible deformation of the seed contour
        PerturbationField h;
        for (int b = 0; b < 6; ++b) {
            h.centers.push_back(std::polar(1.2 * rj * std::abs(unit(rng)), std::numbers::pi * unit(rng)));
            h.amplitudes.push_back(cplx{unit(rng), unit(rng)} * (0.25 * rj));
        }
        h.bandwidth = 0.6 * rj;
        for (double damp = 1.0; damp > 0.05; damp *= 0.5) {
            Contour moved = contour;
            bool ok = true;
            for (auto& arc : moved.arcs)
                for (auto& z : arc) {
                    z += damp * h(z);
                    if (fr.contains(z)) ok = false;
                }
            if (!ok) continue;
            try {
                moved.validate_structure();
            } catch (const ValidationError&) {
                continue;
            }
            contour = moved;
            break;
        }
    }

    st.dc.init(contour, params.n);
    EquilibriumOptions opts = inner_options(fr.level());
    st.res = solve_on_mesh(st.dc.mesh, V, 1e-6, opts);
    st.energy = st.res.energy;
    st.energy_history.push_back(st.energy);

    const ComplexPolynomial dV = V.derivative();
    double median = st.dc.mesh.median_spacing();
    double step = median;
    double bw_scale = 1.0;
    int accepted = 0;
    double gain_window_start = st.energy;
    int gain_window_count = 0;

    auto resolve_tips = [&]() {
        // keep the truncation points strictly slack; extend and re-solve if not
        for (int guard = 0; guard < 6; ++guard) {
            bool extended = false;
            for (const auto& tag : st.dc.structure.rays)
                if (ray_slack(st, tag, V) < 1.0) {
                    st.dc.extend_ray(tag, 1.5);
                    extended = true;
                }
            if (!extended) return;
            st.dc.remesh(params.n);
            st.res = solve_on_mesh(st.dc.mesh, V, 1e-6, opts);
            st.energy = st.res.energy;
        }
    };
    resolve_tips();

    for (int outer = 0; outer < params.max_outer; ++outer) {
        st.outer_iterations = outer + 1;
        auto basis =
            criticality_basis(st.dc.mesh, params.basis_stride, params.basis_bandwidth * bw_scale);
        std::vector<cplx> dv_values(st.dc.mesh.size());
        for (std::size_t i = 0; i < st.dc.mesh.size(); ++i)
            dv_values[i] = dV(st.dc.mesh.points[i]);

        std::vector<double> drifts(basis.size());
        double crit = 0.0;
        for (std::size_t k = 0; k < basis.size(); ++k) {
            drifts[k] = energy_derivative_sparse(st.res.mu, dv_values, basis[k]);
            crit = std::max(crit, std::abs(drifts[k]));
        }
        st.final_crit = crit;
        if (crit <= params.crit_tol) {
            st.converged = true;
            break;
        }

        // inner accuracy tracks the outer residual
        double itol = std::clamp(crit * 1e-4, params.tol, 1e-6);

        PerturbationField ascent;
        ascent.bandwidth = basis.front().bandwidth;
        for (std::size_t k = 0; k < basis.size(); k += 2) {
            cplx amp = drifts[k] * basis[k].amplitudes[0] + drifts[k + 1] * basis[k + 1].amplitudes[0];
            if (std::abs(amp) == 0.0) continue;
            ascent.centers.push_back(basis[k].centers[0]);
            ascent.amplitudes.push_back(amp);
        }
        double hmax = 1e-300;
        for (cplx z : st.dc.mesh.points) hmax = std::max(hmax, std::abs(ascent(z)));
        for (auto& a : ascent.amplitudes) a /= hmax;

        bool step_accepted = false;
        double t = step;
        const double t_min = std::max(1e-7 * median, step * std::pow(0.5, 14));
        while (t >= t_min && !step_accepted) {
            detail::DeformableContour trial = st.dc;
            bool blocked = false;
            try {
                trial.deform(ascent, t);
            } catch (const StepTooLargeError&) {
                blocked = true;
            }
            if (!blocked)
                for (cplx z : trial.mesh.points)
                    if (fr.contains(z)) {
                        blocked = true;
                        bw_scale = std::max(0.25, 0.5 * bw_scale);
                        break;
                    }
            if (!blocked) {
                try {
                    EquilibriumResult trial_res =
                        solve_on_mesh(trial.mesh, V, itol, opts, st.res.mu.weights);
                    if (trial_res.energy > st.energy + 1e-13 * (1.0 + std::abs(st.energy))) {
                        st.dc = std::move(trial);
                        st.res = std::move(trial_res);
                        st.energy = st.res.energy;
                        st.energy_history.push_back(st.energy);
                        step_accepted = true;
                        ++accepted;
                        step = std::min(1.5 * t, 3.0 * median);
                        break;
                    }
                } catch (const Error&) {
                    // fall through to a smaller step
                }
            }
            t *= 0.5;
        }
        if (!step_accepted) break;  // stagnation; the criticality check above decides

        // grinding at rounding scale also counts as stagnation
        if (++gain_window_count >= 8) {
            if (st.energy - gain_window_start < 1e-9 * (1.0 + std::abs(st.energy))) break;
            gain_window_start = st.energy;
            gain_window_count = 0;
        }

        if (params.remesh && accepted % 5 == 0) {
            Mesh old_mesh = st.dc.mesh;
            std::vector<double> old_w = st.res.mu.weights;
            st.dc.remesh(params.n);
            // warm start from the old density, sampled at the nearest old node
            std::vector<double> warm(st.dc.mesh.size());
            double warm_sum = 0.0;
            for (std::size_t i = 0; i < st.dc.mesh.size(); ++i) {
                std::size_t nearest = 0;
                double dist = std::numeric_limits<double>::infinity();
                for (std::size_t j = 0; j < old_mesh.size(); ++j) {
                    double d = std::abs(st.dc.mesh.points[i] - old_mesh.points[j]);
                    if (d < dist) {
                        dist = d;
                        nearest = j;
                    }
                }
                warm[i] = old_w[nearest] / old_mesh.seg[nearest] * st.dc.mesh.seg[i];
                warm_sum += warm[i];
            }
            for (auto& w : warm) w /= std::max(warm_sum, 1e-300);
            st.res = solve_on_mesh(st.dc.mesh, V, itol, opts, warm);
            st.energy = st.res.energy;
            median = st.dc.mesh.median_spacing();
            resolve_tips();
            bw_scale = 1.0;
        }
    }

    // final solve at the requested tolerance
    st.res = solve_on_mesh(st.dc.mesh, V, params.tol, opts, st.res.mu.weights);
    st.energy = st.res.energy;
    if (st.converged) {
        auto basis = criticality_basis(st.dc.mesh, params.basis_stride, params.basis_bandwidth);
        std::vector<cplx> dv_values(st.dc.mesh.size());
        for (std::size_t i = 0; i < st.dc.mesh.size(); ++i)
            dv_values[i] = dV(st.dc.mesh.points[i]);
        double crit = 0.0;
        for (const auto& h : basis)
            crit = std::max(crit, std::abs(energy_derivative_sparse(st.res.mu, dv_values, h)));
        st.final_crit = crit;
        st.converged = crit <= params.crit_tol;
    }
}

}  // namespace detail

/// Alternating scheme for the max-min problem: inner equilibrium solve on the
/// current contour, outer ascent along the bump-basis energy gradient, with
/// steps accepted only when they raise the inner equilibrium energy. Restarts
/// run as independent tasks; the best converged run wins. Throws
/// MaxMinConvergenceError (carrying the best iterate) if no restart reaches
/// criticality.
inline SCurveSolution maxmin_solve(const ComplexPolynomial& V, const NoncrossingPartition& partition,
                                   const MaxMinParams& params = {});

namespace detail {

inline SCurveSolution assemble_solution(const ComplexPolynomial& V,
                                        const NoncrossingPartition& partition,
                                        const RestartState& st, const MaxMinParams& params,
                                        int restarts_used) {
    SCurveSolution sol;
    sol.V = V;
    sol.partition_blocks = partition.blocks();
    sol.contour = st.dc.geometry();
    sol.mu = st.res.mu;
    sol.l = st.res.l;
    sol.energy = st.energy;
    sol.energy_history = st.energy_history;
    sol.outer_iterations = st.outer_iterations;
    sol.restarts_used = restarts_used;
    sol.converged = st.converged;
    sol.seed = params.seed;
    sol.basis_stride = params.basis_stride;
    sol.basis_bandwidth = params.basis_bandwidth;
    sol.probe_count = params.probe_count;
    sol.node_spacing = st.dc.mesh.median_spacing();

    sol.R = r_from_measure(sol.mu, V);
    ComplexPolynomial half_dv = V.derivative() * cplx{0.5, 0.0};
    sol.T = sol.R - half_dv * half_dv;

    auto arcs = support_arcs(st.res, st.dc.mesh);
    omega_constants(sol.mu, V, arcs);
    for (const auto& a : arcs) {
        SolvedArc out;
        out.node_indices = a.nodes;
        for (int i : a.nodes) {
            out.polyline.push_back(sol.mu.points[static_cast<std::size_t>(i)]);
            out.density.push_back(sol.mu.weights[static_cast<std::size_t>(i)] /
                                  sol.mu.seg_lengths[static_cast<std::size_t>(i)]);
        }
        out.omega = a.omega;
        out.omega_std = a.omega_std;
        out.mass = a.mass;
        out.omega_valid = a.omega_valid;
        sol.arcs.push_back(std::move(out));
    }

    // residual block
    ElReport el = check_euler_lagrange(st.res, sol.contour, V);
    sol.residuals.el_supp = el.supp;
    sol.residuals.el_off = el.off;
    sol.residuals.el = std::max(el.supp, el.off);

    auto basis = criticality_basis(st.dc.mesh, params.basis_stride, params.basis_bandwidth);
    sol.residuals.criticality = criticality_residual(sol.mu, V, basis);

    cplx centroid{0.0, 0.0};
    double mass = 0.0;
    for (std::size_t i = 0; i < sol.mu.size(); ++i) {
        centroid += sol.mu.weights[i] * sol.mu.points[i];
        mass += sol.mu.weights[i];
    }
    centroid /= mass;
    double spread = 0.0;
    for (std::size_t i = 0; i < sol.mu.size(); ++i)
        if (st.res.active[i]) spread = std::max(spread, std::abs(sol.mu.points[i] - centroid));
    sol.probe_center = centroid;
    sol.probe_radius = std::max(2.2 * spread, spread + 6.0 * sol.node_spacing);
    std::vector<cplx> probes;
    for (int k = 0; k < params.probe_count; ++k)
        probes.push_back(sol.probe_center +
                         std::polar(sol.probe_radius, 2.0 * std::numbers::pi * k / params.probe_count));
    sol.residuals.algebraic = algebraic_residual(sol.mu, V, sol.R, probes).value;

    sol.s_step = 3.0 * sol.node_spacing;
    sol.residuals.s_property = s_residual(sol.mu, V, arcs, sol.s_step);
    return sol;
}

}  // namespace detail

inline nlohmann::json SCurveSolution::to_json() const {
    nlohmann::json j;
    j["schema"] = "scurve/1";
    j["V"] = V.to_json();
    j["partition"] = partition_blocks;
    j["contour"] = contour.to_json();
    j["measure"] = mu.to_json();
    j["l"] = l;
    j["energy"] = energy;
    j["R"] = R.to_json();
    j["T"] = T.to_json();
    j["arcs"] = nlohmann::json::array();
    for (const auto& a : arcs) {
        nlohmann::json ja;
        ja["nodes"] = a.node_indices;
        ja["polyline"] = nlohmann::json::array();
        for (cplx z : a.polyline) ja["polyline"].push_back({z.real(), z.imag()});
        ja["density"] = a.density;
        ja["omega"] = a.omega;
        ja["omega_std"] = a.omega_std;
        ja["mass"] = a.mass;
        ja["omega_valid"] = a.omega_valid;
        j["arcs"].push_back(std::move(ja));
    }
    j["residuals"] = {{"el", residuals.el},
                      {"el_supp", residuals.el_supp},
                      {"el_off", residuals.el_off},
                      {"criticality", residuals.criticality},
                      {"algebraic", residuals.algebraic},
                      {"s_property", residuals.s_property}};
    j["checks"] = {{"probe_center", {probe_center.real(), probe_center.imag()}},
                   {"probe_radius", probe_radius},
                   {"probe_count", probe_count},
                   {"s_step", s_step},
                   {"basis_stride", basis_stride},
                   {"basis_bandwidth", basis_bandwidth},
                   {"node_spacing", node_spacing}};
    j["diagnostics"] = {{"energy_history", energy_history},
                        {"outer_iterations", outer_iterations},
                        {"restarts_used", restarts_used},
                        {"converged", converged},
                        {"seed", seed}};
    return j;
}

inline SCurveSolution SCurveSolution::from_json(const nlohmann::json& j) {
    if (!j.is_object() || j.value("schema", "") != "scurve/1")
        throw ValidationError("solution JSON: missing or unknown schema tag");
    for (const char* key : {"V", "partition", "contour", "measure", "l", "R", "arcs", "residuals", "checks"})
        if (!j.contains(key)) throw ValidationError(std::string("solution JSON: missing field ") + key);
    SCurveSolution s;
    s.V = ComplexPolynomial::from_json(j["V"]);
    s.partition_blocks = j["partition"].get<std::vector<std::vector<int>>>();
    s.contour = Contour::from_json(j["contour"]);
    s.mu = DiscreteMeasure::from_json(j["measure"]);
    s.l = j["l"].get<double>();
    s.energy = j.value("energy", 0.0);
    s.R = ComplexPolynomial::from_json(j["R"]);
    if (j.contains("T")) s.T = ComplexPolynomial::from_json(j["T"]);
    for (const auto& ja : j["arcs"]) {
        SolvedArc a;
        a.node_indices = ja["nodes"].get<std::vector<int>>();
        for (const auto& e : ja["polyline"]) a.polyline.push_back({e[0].get<double>(), e[1].get<double>()});
        a.density = ja.value("density", std::vector<double>{});
        a.omega = ja.value("omega", 0.0);
        a.omega_std = ja.value("omega_std", 0.0);
        a.mass = ja.value("mass", 0.0);
        a.omega_valid = ja.value("omega_valid", false);
        s.arcs.push_back(std::move(a));
    }
    const auto& r = j["residuals"];
    s.residuals = {r.value("el", 0.0),          r.value("el_supp", 0.0),
                   r.value("el_off", 0.0),      r.value("criticality", 0.0),
                   r.value("algebraic", 0.0),   r.value("s_property", 0.0)};
    const auto& c = j["checks"];
    s.probe_center = {c["probe_center"][0].get<double>(), c["probe_center"][1].get<double>()};
    s.probe_radius = c["probe_radius"].get<double>();
    s.probe_count = c["probe_count"].get<int>();
    s.s_step = c["s_step"].get<double>();
    s.basis_stride = c["basis_stride"].get<int>();
    s.basis_bandwidth = c["basis_bandwidth"].get<double>();
    s.node_spacing = c["node_spacing"].get<double>();
    if (j.contains("diagnostics")) {
        const auto& d = j["diagnostics"];
        s.energy_history = d.value("energy_history", std::vector<double>{});
        s.outer_iterations = d.value("outer_iterations", 0);
        s.restarts_used = d.value("restarts_used", 0);
        s.converged = d.value("converged", false);
        s.seed = d.value("seed", std::uint64_t{0});
    }
    return s;
}

/// Resolution floor of the criticality test: tangential drift of the discrete
/// model at an equal-arclength optimum decays like 1/n^2.
inline double auto_crit_tol(int n) { return std::max(1e-4, 50.0 / (double(n) * double(n))); }

inline SCurveSolution maxmin_solve(const ComplexPolynomial& V, const NoncrossingPartition& partition,
                                   const MaxMinParams& params_in) {
    MaxMinParams params = params_in;
    if (params.crit_tol <= 0.0) params.crit_tol = auto_crit_tol(params.n);
    const int n_field = V.degree();
    if (n_field < 2) throw ValidationError("maxmin: field degree must be >= 2");
    if (partition.n() != n_field)
        throw ValidationError("maxmin: partition indexes a different number of sectors");
    SectorSet secs = sectors(V);

    // seed geometry: join radius from the critical points of the field
    double r_join = params.r_join;
    if (r_join <= 0.0) {
        r_join = 1.0;
        try {
            for (const auto& r : roots(V.derivative(), 1e-8))
                r_join = std::max(r_join, 1.5 * std::abs(r.root));
        } catch (const RootFindingError&) {
            r_join = 1.0;
        }
    }

    double r_trunc = params.r_trunc;
    if (r_trunc <= 0.0) r_trunc = detail::auto_trunc_radius(V, secs, 2.0 * r_join, 20.0);

    // bootstrap energy estimate on a coarse, unconstrained seed contour
    double e0 = 0.0;
    {
        Contour boot = initial_contour(partition, secs, r_join, r_trunc, nullptr);
        EquilibriumOptions opts;
        opts.remesh = false;
        e0 = solve_equilibrium(boot, V, 120, 1e-5, opts).energy;
    }
    if (params.r_trunc <= 0.0)
        r_trunc = detail::auto_trunc_radius(V, secs, 2.0 * r_join, 2.0 * std::abs(e0) + 6.0);

    double level = params.M > 0.0 ? params.M : 2.0 * std::max(1.0, std::abs(e0));
    std::optional<ForbiddenRegion> fr;
    for (int attempt = 0; attempt < 8 && !fr; ++attempt) {
        try {
            fr.emplace(V, level, params.margin, 2.0 * r_trunc + 2.0 * params.margin);
        } catch (const ConfigurationError&) {
            if (params.M > 0.0) throw;  // explicit level: caller's problem
            level *= 2.0;
        }
    }
    if (!fr) throw ConfigurationError("maxmin: no usable cut-off level found");

    const int restarts = std::max(1, params.restarts);
    std::vector<detail::RestartState> states(static_cast<std::size_t>(restarts));
    std::vector<std::future<void>> tasks;
    std::vector<std::string> failures(static_cast<std::size_t>(restarts));
    for (int k = 0; k < restarts; ++k) {
        tasks.push_back(std::async(std::launch::async, [&, k] {
            try {
                detail::run_restart(states[static_cast<std::size_t>(k)], V, partition, secs, *fr,
                                    params, r_join, r_trunc,
                                    params.seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(k),
                                    k > 0);
            } catch (const Error& e) {
                failures[static_cast<std::size_t>(k)] = e.what();
                states[static_cast<std::size_t>(k)].converged = false;
            }
        }));
    }
    for (auto& t : tasks) t.get();

    int best = -1, best_any = -1;
    for (int k = 0; k < restarts; ++k) {
        const auto& st = states[static_cast<std::size_t>(k)];
        if (st.energy_history.empty()) continue;
        if (best_any < 0 || st.energy > states[static_cast<std::size_t>(best_any)].energy)
            best_any = k;
        if (!st.converged) continue;
        if (best < 0 || st.energy > states[static_cast<std::size_t>(best)].energy) best = k;
    }
    if (best >= 0)
        return detail::assemble_solution(V, partition, states[static_cast<std::size_t>(best)], params,
                                         restarts);
    if (best_any < 0) throw ConfigurationError("maxmin: every restart failed before producing an iterate");
    SCurveSolution partial = detail::assemble_solution(
        V, partition, states[static_cast<std::size_t>(best_any)], params, restarts);
    throw MaxMinConvergenceError("maxmin: outer iteration stagnated before reaching criticality",
                                 std::move(partial));
}

}  // namespace scurve
