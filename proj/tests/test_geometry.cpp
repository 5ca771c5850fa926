#include <catch2/catch_amalgamated.hpp>

#include <numbers>
#include <random>

#include "oracles.hpp"
#include "scurve/contour.hpp"
#include "scurve/forbidden.hpp"
#include "scurve/initial_contour.hpp"
#include "scurve/partition.hpp"
#include "scurve/sphere.hpp"

using namespace scurve;
using Catch::Approx;

TEST_CASE("noncrossing detection on the reference examples", "[geometry]") {
    CHECK_FALSE(is_noncrossing({{1, 4, 5}, {2, 3, 6}}, 6));
    CHECK(is_noncrossing({{1, 5, 6}, {2, 3}, {4}}, 6));
    CHECK(is_noncrossing({{1}, {2}, {3}, {4}}, 4));
    CHECK_THROWS_AS(is_noncrossing({{1, 2}, {2, 3}}, 3), ValidationError);
    CHECK_THROWS_AS(is_noncrossing({{1, 2}}, 3), ValidationError);
}

TEST_CASE("noncrossing agrees with the stack oracle for N <= 7", "[geometry][acceptance-support]") {
    for (int n = 1; n <= 7; ++n) {
        auto parts = oracle::all_partitions(n);
        for (const auto& p : parts)
            REQUIRE(is_noncrossing(p, n) == oracle::noncrossing_by_stack(p, n));
    }
}

TEST_CASE("partition type enforces its invariants", "[geometry]") {
    CHECK_THROWS_AS(NoncrossingPartition({{1, 4}, {2, 3, 6}, {5}}, 6), ValidationError);  // 1<2<4<6 crosses
    NoncrossingPartition p({{1, 2}, {3}}, 3);
    CHECK(p.p0().size() == 1);
    CHECK_THROWS_AS(NoncrossingPartition({{1}, {2}}, 2), ValidationError);  // no pair block
    NoncrossingPartition q = NoncrossingPartition::from_json(nlohmann::json::parse("[[1,2]]"), 5);
    CHECK(q.blocks().size() == 4);  // singletons completed
}

TEST_CASE("chordal distance", "[geometry]") {
    CHECK(chordal_distance_to_infinity(cplx{0, 0}) == Approx(1.0));
    CHECK(chordal_distance(std::optional<cplx>{cplx{0, 0}}, std::nullopt) == Approx(1.0));
    CHECK(chordal_distance(cplx{0, 0}, cplx{1, 0}) == Approx(1.0 / std::sqrt(2.0)));
    CHECK(chordal_distance(cplx{0.3, -1.2}, cplx{0.3, -1.2}) == 0.0);
}

TEST_CASE("hausdorff distance examples", "[geometry]") {
    std::vector<cplx> a{{0, 0}, {1, 0}};
    std::vector<cplx> b{{0, 0}};
    CHECK(hausdorff_distance(a, a) == 0.0);
    CHECK(hausdorff_distance(std::vector<cplx>{{0, 0}}, std::vector<cplx>{{1, 0}}) ==
          Approx(1.0 / std::sqrt(2.0)));
    CHECK(hausdorff_distance(a, b) == Approx(1.0 / std::sqrt(2.0)));
    CHECK_THROWS_AS(hausdorff_distance(a, std::vector<cplx>{}), ValidationError);
}

TEST_CASE("hausdorff distance is a metric on random clouds", "[geometry]") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    auto cloud = [&]() {
        std::vector<cplx> c;
        int n = 1 + static_cast<int>(rng() % 6);
        for (int i = 0; i < n; ++i) c.push_back({u(rng), u(rng)});
        return c;
    };
    for (int trial = 0; trial < 25; ++trial) {
        auto a = cloud(), b = cloud(), c = cloud();
        double ab = hausdorff_distance(a, b);
        double ba = hausdorff_distance(b, a);
        double ac = hausdorff_distance(a, c);
        double cb = hausdorff_distance(c, b);
        CHECK(ab == Approx(ba));
        CHECK(hausdorff_distance(a, a) == 0.0);
        CHECK(ab <= ac + cb + 1e-12);
    }
}

TEST_CASE("forbidden region membership", "[geometry]") {
    ComplexPolynomial v({{0, 0}, {0, 0}, {1, 0}});  // z^2
    ForbiddenRegion fr(v, 10.0, 1.0);
    CHECK(fr.level_set_component_count() == 2);

    // oracle: nearest point of {Re z^2 = -10} to 5i is i*sqrt(10)
    double expected = 5.0 - std::sqrt(10.0);
    CHECK(std::abs(fr.distance_to_level_set(cplx{0, 5}) - expected) < 0.1);

    CHECK(fr.contains(cplx{0, 5}));        // deep inside, 1.84 > margin 1
    CHECK_FALSE(fr.contains(cplx{5, 0}));  // field positive there
    CHECK_FALSE(fr.contains(cplx{0, std::sqrt(10.0)}));  // on the level curve
    CHECK_FALSE(ForbiddenRegion(v, 10.0, 8.0).contains(cplx{0, 5}));  // margin 8 swallows it
}

TEST_CASE("forbidden region rejects a level that merges arcs", "[geometry]") {
    ComplexPolynomial v({{-3, 0}, {0, 0}, {1, 0}});  // z^2 - 3: level -3 degenerates to a cross
    CHECK_THROWS_AS(ForbiddenRegion(v, 3.0, 0.5), ConfigurationError);
    CHECK(ForbiddenRegion(v, 10.0, 0.5).level_set_component_count() == 2);
}

TEST_CASE("initial contour for two opposite rays is the real axis", "[geometry]") {
    ComplexPolynomial v({{0, 0}, {0, 0}, {1, 0}});
    NoncrossingPartition p({{1, 2}}, 2);
    SectorSet s = sectors(v);
    Contour c = initial_contour(p, s, 1.0, 4.0);
    c.validate_admissible(p, s);
    for (const auto& arc : c.arcs)
        for (cplx z : arc) CHECK(std::abs(z.imag()) < 1e-12);
    CHECK(c.rays.size() == 2);
}

TEST_CASE("initial contour bends through the origin region for a cubic", "[geometry]") {
    ComplexPolynomial v({{0, 0}, {0, 0}, {0, 0}, {1, 0}});  // z^3
    NoncrossingPartition p({{1, 3}, {2}}, 3);
    SectorSet s = sectors(v);
    Contour c = initial_contour(p, s, 1.0, 5.0);
    c.validate_admissible(p, s);
    std::set<int> comps(c.components.begin(), c.components.end());
    CHECK(comps.size() == 1);
    CHECK(c.rays.size() == 2);
}

TEST_CASE("initial contour builds one component per multi-sector block", "[geometry]") {
    ComplexPolynomial v({{0, 0}, {1, 0}, {0, 0}, {0, 0}, {0, 0}, {1, 0}});  // z^5 + z
    NoncrossingPartition p({{1, 2}, {4, 5}, {3}}, 5);
    SectorSet s = sectors(v);
    Contour c = initial_contour(p, s, 1.5, 8.0);
    c.validate_admissible(p, s);
    std::set<int> comps(c.components.begin(), c.components.end());
    CHECK(comps.size() == 2);
    CHECK(c.rays.size() == 4);
}

TEST_CASE("initial contour avoids the forbidden region", "[geometry]") {
    ComplexPolynomial v({{0, 0}, {1, 0}, {0, 0}, {0, 0}, {0, 0}, {1, 0}});  // z^5 + z
    NoncrossingPartition p({{1, 3}, {2}, {4}, {5}}, 5);
    SectorSet s = sectors(v);
    ForbiddenRegion fr(v, 2.0, 0.5);
    Contour c = initial_contour(p, s, 1.5, 8.0, &fr);
    c.validate_admissible(p, s);
    for (const auto& arc : c.arcs)
        for (cplx z : arc) CHECK_FALSE(fr.contains(z));
}

TEST_CASE("contour JSON round trip", "[geometry]") {
    ComplexPolynomial v({{0, 0}, {0, 0}, {1, 0}});
    NoncrossingPartition p({{1, 2}}, 2);
    Contour c = initial_contour(p, sectors(v), 1.0, 4.0);
    Contour d = Contour::from_json(c.to_json());
    REQUIRE(d.arcs.size() == c.arcs.size());
    CHECK(d.rays.size() == c.rays.size());
    CHECK(d.components == c.components);
    for (std::size_t i = 0; i < c.arcs.size(); ++i) {
        REQUIRE(d.arcs[i].size() == c.arcs[i].size());
        for (std::size_t k = 0; k < c.arcs[i].size(); ++k)
            CHECK(std::abs(d.arcs[i][k] - c.arcs[i][k]) == 0.0);
    }
}

TEST_CASE("mesh discretization places midpoint cells", "[geometry]") {
    ComplexPolynomial v({{0, 0}, {0, 0}, {1, 0}});
    NoncrossingPartition p({{1, 2}}, 2);
    Contour c = initial_contour(p, sectors(v), 1.0, 4.0);
    Mesh m = discretize(c, 120);
    CHECK(m.size() == 120);
    double total = 0.0;
    for (double s : m.seg) total += s;
    CHECK(total == Approx(c.total_length()).epsilon(1e-9));
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = i + 1; j < m.size(); ++j)
            REQUIRE(std::abs(m.points[i] - m.points[j]) > 1e-12);
}
