#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <utility>
#include <vector>

#include <json.hpp>

#include "scurve/errors.hpp"

namespace scurve {

using cplx = std::complex<double>;

/// Univariate polynomial with complex coefficients, stored in ascending powers.
/// The zero polynomial has an empty coefficient vector and degree() == -1;
/// otherwise the leading coefficient is nonzero.
class ComplexPolynomial {
public:
    ComplexPolynomial() = default;

    explicit ComplexPolynomial(std::vector<cplx> coeffs) : coeffs_(std::move(coeffs)) {
        while (!coeffs_.empty() && coeffs_.back() == cplx{0.0, 0.0}) coeffs_.pop_back();
    }

    static ComplexPolynomial from_roots(std::span<const cplx> roots, cplx leading = {1.0, 0.0}) {
        std::vector<cplx> c{leading};
        for (cplx r : roots) {
            c.push_back({0.0, 0.0});
            for (std::size_t k = c.size() - 1; k > 0; --k) c[k] = c[k - 1] - r * c[k];
            c[0] *= -r;
        }
        return ComplexPolynomial(std::move(c));
    }

    bool is_zero() const { return coeffs_.empty(); }
    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    const std::vector<cplx>& coeffs() const { return coeffs_; }

    cplx leading() const {
        if (is_zero()) return {0.0, 0.0};
        return coeffs_.back();
    }

    cplx coeff(int k) const {
        if (k < 0 || k >= static_cast<int>(coeffs_.size())) return {0.0, 0.0};
        return coeffs_[static_cast<std::size_t>(k)];
    }

    cplx operator()(cplx z) const {
        cplx v{0.0, 0.0};
        for (std::size_t k = coeffs_.size(); k-- > 0;) v = v * z + coeffs_[k];
        return v;
    }

    struct ValueAndSlope {
        cplx value;
        cplx slope;
    };

    /// Value and first derivative in one Horner pass.
    ValueAndSlope eval_with_derivative(cplx z) const {
        cplx v{0.0, 0.0}, d{0.0, 0.0};
        for (std::size_t k = coeffs_.size(); k-- > 0;) {
            d = d * z + v;
            v = v * z + coeffs_[k];
        }
        return {v, d};
    }

    ComplexPolynomial derivative() const {
        if (coeffs_.size() <= 1) return {};
        std::vector<cplx> d(coeffs_.size() - 1);
        for (std::size_t k = 1; k < coeffs_.size(); ++k)
            d[k - 1] = coeffs_[k] * static_cast<double>(k);
        return ComplexPolynomial(std::move(d));
    }

    ComplexPolynomial operator+(const ComplexPolynomial& o) const {
        std::vector<cplx> c(std::max(coeffs_.size(), o.coeffs_.size()), cplx{0.0, 0.0});
        for (std::size_t k = 0; k < coeffs_.size(); ++k) c[k] += coeffs_[k];
        for (std::size_t k = 0; k < o.coeffs_.size(); ++k) c[k] += o.coeffs_[k];
        return ComplexPolynomial(std::move(c));
    }

    ComplexPolynomial operator-(const ComplexPolynomial& o) const {
        std::vector<cplx> c(std::max(coeffs_.size(), o.coeffs_.size()), cplx{0.0, 0.0});
        for (std::size_t k = 0; k < coeffs_.size(); ++k) c[k] += coeffs_[k];
        for (std::size_t k = 0; k < o.coeffs_.size(); ++k) c[k] -= o.coeffs_[k];
        return ComplexPolynomial(std::move(c));
    }

    ComplexPolynomial operator*(const ComplexPolynomial& o) const {
        if (is_zero() || o.is_zero()) return {};
        std::vector<cplx> c(coeffs_.size() + o.coeffs_.size() - 1, cplx{0.0, 0.0});
        for (std::size_t i = 0; i < coeffs_.size(); ++i)
            for (std::size_t j = 0; j < o.coeffs_.size(); ++j) c[i + j] += coeffs_[i] * o.coeffs_[j];
        return ComplexPolynomial(std::move(c));
    }

    ComplexPolynomial operator*(cplx s) const {
        std::vector<cplx> c = coeffs_;
        for (auto& x : c) x *= s;
        return ComplexPolynomial(std::move(c));
    }

    /// Largest coefficient magnitude; 0 for the zero polynomial.
    double coeff_scale() const {
        double s = 0.0;
        for (cplx c : coeffs_) s = std::max(s, std::abs(c));
        return s;
    }

    nlohmann::json to_json() const {
        nlohmann::json a = nlohmann::json::array();
        for (cplx c : coeffs_) a.push_back({c.real(), c.imag()});
        return a;
    }

    static ComplexPolynomial from_json(const nlohmann::json& j) {
        if (!j.is_array()) throw ValidationError("polynomial JSON must be an array of [re, im] pairs");
        std::vector<cplx> c;
        for (const auto& e : j) {
            if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
                throw ValidationError("polynomial coefficient must be an [re, im] pair");
            c.push_back({e[0].get<double>(), e[1].get<double>()});
        }
        return ComplexPolynomial(std::move(c));
    }

private:
    std::vector<cplx> coeffs_;
};

}  // namespace scurve
