#pragma once

#include <cmath>
#include <vector>

#include "scurve/complex_poly.hpp"
#include "scurve/errors.hpp"

namespace scurve {

/// The cut-off region where the external field is deeply negative: points with
/// Re V(z) < -M whose distance to the level set {Re V = -M} exceeds the margin.
/// The level set is sampled by marching squares at resolution <= margin/10 over
/// a square box; membership queries are resolved against the samples.
class ForbiddenRegion {
public:
    ForbiddenRegion(ComplexPolynomial V, double level, double margin = 8.0, double box_radius = 0.0,
                    double resolution = 0.0)
        : field_(std::move(V)), level_(level), margin_(margin) {
        if (level_ <= 0.0) throw ConfigurationError("forbidden region: level must be positive");
        if (margin_ <= 0.0) throw ConfigurationError("forbidden region: margin must be positive");
        int n = field_.degree();
        if (n < 2) throw ValidationError("forbidden region: field degree must be >= 2");

        if (box_radius <= 0.0) {
            // radius where the leading term alone overwhelms M and the low coefficients
            double lead = std::abs(field_.leading());
            double rest = field_.coeff_scale();
            box_radius = 2.0 * std::pow((level_ + rest + 1.0) / lead, 1.0 / n) + 2.0 * margin_ + 4.0;
        }
        box_radius_ = box_radius;
        double res = resolution > 0.0 ? resolution : margin_ / 10.0;
        cell_ = std::min(res, box_radius_ / 8.0);
        sample_level_set();
        count_components();
        if (component_count_ < n)
            throw ConfigurationError("forbidden region: level too small, level set has fewer arcs than sectors");
    }

    double level() const { return level_; }
    double margin() const { return margin_; }
    double box_radius() const { return box_radius_; }
    const std::vector<cplx>& level_set_samples() const { return samples_; }
    int level_set_component_count() const { return component_count_; }

    double distance_to_level_set(cplx z) const {
        double d = std::numeric_limits<double>::infinity();
        for (cplx s : samples_) d = std::min(d, std::abs(z - s));
        return d;
    }

    bool contains(cplx z) const {
        if (field_(z).real() >= -level_) return false;
        return distance_to_level_set(z) > margin_;
    }

private:
    void sample_level_set() {
        const int cells = std::max(8, static_cast<int>(std::ceil(2.0 * box_radius_ / cell_)));
        const double h = 2.0 * box_radius_ / cells;
        std::vector<double> prev(static_cast<std::size_t>(cells) + 1);
        std::vector<double> curr(static_cast<std::size_t>(cells) + 1);
        auto value = [&](int ix, int iy) {
            cplx z{-box_radius_ + ix * h, -box_radius_ + iy * h};
            return field_(z).real() + level_;
        };
        for (int ix = 0; ix <= cells; ++ix) prev[static_cast<std::size_t>(ix)] = value(ix, 0);
        for (int iy = 1; iy <= cells; ++iy) {
            for (int ix = 0; ix <= cells; ++ix) curr[static_cast<std::size_t>(ix)] = value(ix, iy);
            for (int ix = 0; ix <= cells; ++ix) {
                double y0 = -box_radius_ + (iy - 1) * h;
                double x = -box_radius_ + ix * h;
                double a = prev[static_cast<std::size_t>(ix)], b = curr[static_cast<std::size_t>(ix)];
                if ((a <= 0.0) != (b <= 0.0))
                    samples_.push_back({x, y0 + h * a / (a - b)});
                if (ix > 0) {
                    double c = curr[static_cast<std::size_t>(ix - 1)];
                    if ((c <= 0.0) != (b <= 0.0))
                        samples_.push_back({x - h + h * c / (c - b), y0 + h});
                }
            }
            std::swap(prev, curr);
        }
        cell_used_ = h;
    }

    void count_components() {
        component_count_ = 0;
        if (samples_.empty()) return;
        std::vector<int> label(samples_.size(), -1);
        double link = 2.5 * cell_used_;
        for (std::size_t i = 0; i < samples_.size(); ++i) {
            if (label[i] >= 0) continue;
            label[i] = component_count_;
            std::vector<std::size_t> stack{i};
            while (!stack.empty()) {
                std::size_t k = stack.back();
                stack.pop_back();
                for (std::size_t j = 0; j < samples_.size(); ++j)
                    if (label[j] < 0 && std::abs(samples_[k] - samples_[j]) <= link) {
                        label[j] = component_count_;
                        stack.push_back(j);
                    }
            }
            ++component_count_;
        }
    }

    ComplexPolynomial field_;
    double level_;
    double margin_;
    double box_radius_ = 0.0;
    double cell_ = 0.0;
    double cell_used_ = 0.0;
    std::vector<cplx> samples_;
    int component_count_ = 0;
};

}  // namespace scurve
