#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "oracles.hpp"
#include "scurve/spectral.hpp"

using namespace scurve;
using Catch::Approx;

namespace {

DiscreteMeasure atoms(std::vector<cplx> pts, std::vector<double> w) {
    DiscreteMeasure m;
    m.points = std::move(pts);
    m.weights = std::move(w);
    m.seg_lengths.assign(m.points.size(), 0.1);
    m.tangents.assign(m.points.size(), cplx{1.0, 0.0});
    return m;
}

const ComplexPolynomial kSquare({{0, 0}, {0, 0}, {1, 0}});  // z^2

}  // namespace

TEST_CASE("spectral polynomial for a quadratic field is fixed", "[spectral]") {
    auto m1 = atoms({{0.3, 0.1}, {-1, 2}}, {0.25, 0.75});
    auto m2 = atoms({{5, -1}, {2, 2}, {0, 0}}, {0.2, 0.5, 0.3});
    ComplexPolynomial r1 = r_from_measure(m1, kSquare);
    ComplexPolynomial r2 = r_from_measure(m2, kSquare);
    REQUIRE(r1.degree() == 2);
    CHECK(std::abs(r1.coeff(0) - cplx{-2, 0}) < 1e-14);
    CHECK(std::abs(r1.coeff(1)) < 1e-14);
    CHECK(std::abs(r1.coeff(2) - cplx{1, 0}) < 1e-14);
    for (int k = 0; k <= 2; ++k) CHECK(std::abs(r1.coeff(k) - r2.coeff(k)) < 1e-14);
}

TEST_CASE("spectral polynomial coefficient bookkeeping for a cubic field", "[spectral]") {
    // V = z^3/3, measure with first moment zero: R = z^4/4 - z
    ComplexPolynomial v({{0, 0}, {0, 0}, {0, 0}, {1.0 / 3.0, 0}});
    auto m = atoms({{1, 0}, {-1, 0}}, {0.5, 0.5});
    ComplexPolynomial r = r_from_measure(m, v);
    REQUIRE(r.degree() == 4);
    CHECK(std::abs(r.coeff(4) - cplx{0.25, 0}) < 1e-15);
    CHECK(std::abs(r.coeff(1) - cplx{-1, 0}) < 1e-15);
    CHECK(std::abs(r.coeff(0)) < 1e-15);
    CHECK(std::abs(r.coeff(2)) < 1e-15);
    CHECK(std::abs(r.coeff(3)) < 1e-15);
}

TEST_CASE("R minus (V'/2)^2 has degree N-2 and leading coefficient -N a0", "[spectral]") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        int deg = 2 + static_cast<int>(rng() % 4);
        std::vector<cplx> c;
        for (int k = 0; k < deg; ++k) c.push_back({u(rng), u(rng)});
        c.push_back({u(rng) + 1.5, u(rng)});
        ComplexPolynomial v{std::vector<cplx>(c)};

        oracle::RandomMeasure rm = oracle::random_measure(rng, 15);
        DiscreteMeasure m;
        m.points = rm.points;
        m.weights = rm.weights;
        m.seg_lengths = rm.seg;
        m.tangents = rm.tangents;

        ComplexPolynomial r = r_from_measure(m, v);
        ComplexPolynomial half_dv = v.derivative() * cplx{0.5, 0.0};
        ComplexPolynomial t = r - half_dv * half_dv;
        REQUIRE(r.degree() == 2 * deg - 2);
        REQUIRE(t.degree() == deg - 2);
        cplx expected = -static_cast<double>(deg) * c.back();
        CHECK(std::abs(t.leading() - expected) < 1e-12 * std::abs(expected));
    }
}

TEST_CASE("algebraic identity holds for the semicircle in closed form", "[spectral]") {
    // C(z) = -z + sqrt(z^2-2), V' = 2z, R = z^2 - 2: (C + z)^2 - R = 0 identically
    for (cplx z : {cplx{2, 0}, cplx{1, 2}, cplx{-3, 0.5}}) {
        cplx lhs = oracle::semicircle_resolvent(z) + z;
        CHECK(std::abs(lhs * lhs - (z * z - 2.0)) < 1e-12);
    }
}

TEST_CASE("algebraic residual certifies a fine discretization and rejects junk", "[spectral]") {
    DiscreteMeasure m;
    const int n = 1200;
    double r = std::sqrt(2.0), h = 2.0 * r / n;
    for (int i = 0; i < n; ++i) {
        double a = -r + i * h;
        m.points.push_back({a + 0.5 * h, 0.0});
        m.weights.push_back(oracle::semicircle_cdf(a + h) - oracle::semicircle_cdf(a));
        m.seg_lengths.push_back(h);
        m.tangents.push_back({1.0, 0.0});
    }
    double mass = 0.0;
    for (double w : m.weights) mass += w;
    for (auto& w : m.weights) w /= mass;

    ComplexPolynomial R({{-2, 0}, {0, 0}, {1, 0}});
    std::vector<cplx> probes;
    for (int k = 0; k < 32; ++k)
        probes.push_back(std::polar(3.0, 2.0 * std::numbers::pi * k / 32));
    AlgebraicReport rep = algebraic_residual(m, kSquare, R, probes);
    CHECK(rep.probes_used == 32);
    CHECK(rep.value < 1e-2);

    // random non-equilibrium measure must not certify
    auto bad = atoms({{0.5, 0.2}, {-0.3, -1}, {1.2, 0.4}}, {0.3, 0.5, 0.2});
    AlgebraicReport junk = algebraic_residual(bad, kSquare, R, probes);
    CHECK(junk.value > 2e-2);  // well above the 1e-2 certification bound

    // probes hugging the support are rejected
    std::vector<cplx> close{{0.0, 1e-4}};
    AlgebraicReport rej = algebraic_residual(m, kSquare, R, close);
    CHECK(rej.probes_rejected == 1);
    CHECK(rej.probes_used == 0);
}
