#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "oracles.hpp"
#include "scurve/measure.hpp"

using namespace scurve;
using Catch::Approx;

namespace {

/// Semicircle equilibrium measure discretized on n midpoint cells, weights from
/// the exact cumulative distribution.
DiscreteMeasure semicircle_measure(int n) {
    DiscreteMeasure m;
    double r = std::sqrt(2.0);
    double h = 2.0 * r / n;
    for (int i = 0; i < n; ++i) {
        double a = -r + i * h, b = a + h;
        m.points.push_back({0.5 * (a + b), 0.0});
        m.weights.push_back(oracle::semicircle_cdf(b) - oracle::semicircle_cdf(a));
        m.seg_lengths.push_back(h);
        m.tangents.push_back({1.0, 0.0});
    }
    double sum = 0.0;
    for (double w : m.weights) sum += w;
    for (double& w : m.weights) w /= sum;
    return m;
}

DiscreteMeasure atoms(std::vector<cplx> pts, std::vector<double> w, double seg = 1.0) {
    DiscreteMeasure m;
    m.points = std::move(pts);
    m.weights = std::move(w);
    m.seg_lengths.assign(m.points.size(), seg);
    m.tangents.assign(m.points.size(), cplx{1.0, 0.0});
    return m;
}

const ComplexPolynomial kSquare({{0, 0}, {0, 0}, {1, 0}});  // z^2

}  // namespace

TEST_CASE("log potential point values", "[measure]") {
    auto single = atoms({{0, 0}}, {1.0});
    CHECK(log_potential(single, cplx{std::numbers::e, 0}) == Approx(-1.0));

    auto pair = atoms({{1, 0}, {-1, 0}}, {0.5, 0.5});
    CHECK(log_potential(pair, cplx{0, 0}) == Approx(0.0).margin(1e-15));

    CHECK_THROWS_AS(log_potential(single, cplx{0, 0}), SingularEvaluationError);
}

TEST_CASE("log potential of the semicircle matches quadrature", "[measure]") {
    DiscreteMeasure m = semicircle_measure(400);
    double expected = oracle::semicircle_potential(2.0);
    CHECK(std::abs(log_potential(m, cplx{2.0, 0.0}) - expected) < 1e-3);
    CHECK(std::abs(smeared_potential(m, cplx{2.0, 0.0}) - expected) < 1e-3);
    // smeared evaluation is the one that stays usable on the support
    double on_support = smeared_potential(m, m.points[200]);
    CHECK(std::abs(on_support - oracle::semicircle_potential(m.points[200].real())) < 2e-3);
}

TEST_CASE("weighted energy diagonal and field terms", "[measure]") {
    auto single = atoms({{0, 0}}, {1.0}, 2.0);
    CHECK(weighted_energy(single, ComplexPolynomial{}) == Approx(1.0));  // 1 - log(2/2) = 1

    auto pair = atoms({{1, 0}, {-1, 0}}, {0.5, 0.5}, 1e-9);
    // off-diagonal part: 2 * (1/4) * log 1/2 = -log(2)/2; strip the self terms
    double self = 2.0 * 0.25 * (1.0 - std::log(0.5 * 1e-9));
    CHECK(weighted_energy(pair, ComplexPolynomial{}) - self == Approx(-0.5 * std::log(2.0)));
}

TEST_CASE("weighted energy of the semicircle matches the quadrature oracle", "[measure]") {
    static const double expected = oracle::semicircle_energy();
    DiscreteMeasure m = semicircle_measure(400);
    CHECK(std::abs(weighted_energy(m, kSquare) - expected) < 5e-3);
}

TEST_CASE("weighted energy is invariant under relabeling and penalizes clustering", "[measure]") {
    std::mt19937_64 rng(5);
    oracle::RandomMeasure rm = oracle::random_measure(rng, 25);
    DiscreteMeasure m;
    m.points = rm.points;
    m.weights = rm.weights;
    m.seg_lengths = rm.seg;
    m.tangents = rm.tangents;
    DiscreteMeasure shuffled = m;
    std::vector<std::size_t> perm(m.size());
    std::iota(perm.begin(), perm.end(), 0u);
    std::shuffle(perm.begin(), perm.end(), rng);
    for (std::size_t i = 0; i < perm.size(); ++i) {
        shuffled.points[i] = m.points[perm[i]];
        shuffled.weights[i] = m.weights[perm[i]];
        shuffled.seg_lengths[i] = m.seg_lengths[perm[i]];
        shuffled.tangents[i] = m.tangents[perm[i]];
    }
    CHECK(weighted_energy(shuffled, kSquare) == Approx(weighted_energy(m, kSquare)));

    // spreading two of three equal charges apart lowers the interaction energy
    auto tight = atoms({{-0.1, 0}, {0.1, 0}, {3, 0}}, {1 / 3.0, 1 / 3.0, 1 / 3.0}, 0.05);
    auto spread = atoms({{-1.0, 0}, {1.0, 0}, {3, 0}}, {1 / 3.0, 1 / 3.0, 1 / 3.0}, 0.05);
    CHECK(weighted_energy(spread, ComplexPolynomial{}) < weighted_energy(tight, ComplexPolynomial{}));
}

TEST_CASE("cauchy transform values and decay", "[measure]") {
    auto pair = atoms({{1, 0}, {-1, 0}}, {0.5, 0.5});
    CHECK(std::abs(cauchy_transform(pair, cplx{0, 0})) < 1e-15);

    DiscreteMeasure m = semicircle_measure(400);
    cplx far{1e6, 3e5};
    CHECK(std::abs(cauchy_transform(m, far) - (-1.0 / far)) < 1e-5 * std::abs(1.0 / far));

    cplx expected = oracle::semicircle_resolvent(cplx{2.0, 0.0});
    CHECK(std::abs(expected - (std::sqrt(2.0) - 2.0)) < 1e-12);  // closed form sanity
    CHECK(std::abs(cauchy_transform(m, cplx{2.0, 0.0}) - expected) < 1e-3);

    CHECK_THROWS_AS(cauchy_transform(pair, cplx{1, 0}), SingularEvaluationError);
}

TEST_CASE("pushforward basics", "[measure]") {
    DiscreteMeasure m = semicircle_measure(60);
    PerturbationField h;
    h.centers = {cplx{0, 0}};
    h.amplitudes = {cplx{0.3, 0.4}};
    h.bandwidth = 0.8;

    DiscreteMeasure same = pushforward(m, h, 0.0);
    for (std::size_t i = 0; i < m.size(); ++i) {
        CHECK(same.points[i] == m.points[i]);
        CHECK(same.seg_lengths[i] == m.seg_lengths[i]);
        CHECK(same.tangents[i] == m.tangents[i]);
    }

    // constant field on the support: rigid translation
    PerturbationField wide;
    wide.centers = {cplx{0, 0}};
    wide.amplitudes = {cplx{0.5, -0.25}};
    wide.bandwidth = 10.0;  // plateau covers the support
    DiscreteMeasure moved = pushforward(m, wide, 1.0);
    for (std::size_t i = 0; i < m.size(); ++i) {
        CHECK(std::abs(moved.points[i] - (m.points[i] + cplx{0.5, -0.25})) < 1e-12);
        CHECK(moved.seg_lengths[i] == Approx(m.seg_lengths[i]));
    }
    double sum = 0.0;
    for (double w : moved.weights) sum += w;
    CHECK(sum == Approx(1.0));

    PerturbationField steep;
    steep.centers = {cplx{0, 0}};
    steep.amplitudes = {cplx{5.0, 0.0}};
    steep.bandwidth = 0.1;
    CHECK_THROWS_AS(pushforward(m, steep, 1.0), StepTooLargeError);
}

TEST_CASE("energy derivative closed cases", "[measure]") {
    // constant h over the support of an even measure in the field z^2: zero drift
    DiscreteMeasure m = semicircle_measure(200);
    PerturbationField wide;
    wide.centers = {cplx{0, 0}};
    wide.amplitudes = {cplx{1.0, 2.0}};
    wide.bandwidth = 10.0;
    CHECK(std::abs(energy_derivative(m, kSquare, wide)) < 1e-12);

    // single atom: D = -Re(h'(0)) with V' vanishing at the atom
    DiscreteMeasure single = atoms({{0, 0}}, {1.0});
    PerturbationField off;
    off.centers = {cplx{0.5, 0}};
    off.amplitudes = {cplx{1.0, 0.0}};
    off.bandwidth = 0.2;  // atom sits in the decay annulus of the bump
    double expected = -off.directional_slope(cplx{0, 0}, cplx{1, 0}).real();
    CHECK(energy_derivative(single, kSquare, off) == Approx(expected));
}

TEST_CASE("energy derivative matches finite differences of the pushforward energy", "[measure]") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        oracle::RandomMeasure rm = oracle::random_measure(rng, 30);
        DiscreteMeasure m;
        m.points = rm.points;
        m.weights = rm.weights;
        m.seg_lengths = rm.seg;
        m.tangents = rm.tangents;

        PerturbationField h;
        int bumps = 1 + static_cast<int>(rng() % 3);
        for (int b = 0; b < bumps; ++b) {
            h.centers.push_back({u(rng), u(rng)});
            h.amplitudes.push_back({u(rng), u(rng)});
        }
        h.bandwidth = 0.25 + 0.25 * std::abs(u(rng));

        ComplexPolynomial v({{u(rng), u(rng)}, {u(rng), u(rng)}, {u(rng), 0}, {0.4, 0}});

        double d = energy_derivative(m, v, h);
        const double t = 1e-5;
        double fd = (weighted_energy(pushforward(m, h, t), v) -
                     weighted_energy(pushforward(m, h, -t), v)) /
                    (2.0 * t);
        CHECK(std::abs(d - fd) < 1e-4 * std::max(1.0, std::abs(d)));
    }
}

TEST_CASE("measure validation catches bad inputs", "[measure]") {
    auto ok = atoms({{0, 0}, {1, 0}}, {0.5, 0.5});
    CHECK_NOTHROW(ok.validate());
    auto bad_sum = atoms({{0, 0}, {1, 0}}, {0.6, 0.5});
    CHECK_THROWS_AS(bad_sum.validate(), ValidationError);
    auto negative = atoms({{0, 0}, {1, 0}}, {1.5, -0.5});
    CHECK_THROWS_AS(negative.validate(), ValidationError);
    auto dup = atoms({{0, 0}, {0, 0}}, {0.5, 0.5});
    CHECK_THROWS_AS(dup.validate(), ValidationError);
}

TEST_CASE("measure JSON round trip", "[measure]") {
    DiscreteMeasure m = semicircle_measure(12);
    DiscreteMeasure q = DiscreteMeasure::from_json(m.to_json());
    REQUIRE(q.size() == m.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
        CHECK(q.points[i] == m.points[i]);
        CHECK(q.weights[i] == m.weights[i]);
        CHECK(q.seg_lengths[i] == m.seg_lengths[i]);
        CHECK(q.tangents[i] == m.tangents[i]);
    }
}
