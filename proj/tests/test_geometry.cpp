#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "core/geometry.hpp"
#include "core/weight.hpp"

#include <cmath>

using namespace dunkl;

TEST_CASE("geodesic distance basics") {
    Point e1 = make_point(3, 1, 0, 0);
    Point e2 = make_point(3, 0, 1, 0);
    Point me1 = make_point(3, -1, 0, 0);
    CHECK(geodesic_distance(e1, e1) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(geodesic_distance(e1, me1) == doctest::Approx(kPi));
    CHECK(geodesic_distance(e1, e2) == doctest::Approx(0.5 * kPi));
    CHECK_THROWS_AS(geodesic_distance(make_point(3, 2, 0, 0), e1), std::domain_error);

    // symmetry and triangle inequality on a few triples
    Point a = from_spherical(0.3, 1.1), b = from_spherical(-0.6, 2.7), c = from_spherical(0.9, 4.0);
    CHECK(geodesic_distance(a, b) == doctest::Approx(geodesic_distance(b, a)));
    CHECK(geodesic_distance(a, c) <= geodesic_distance(a, b) + geodesic_distance(b, c) + 1e-12);
}

TEST_CASE("cap construction validates radius") {
    CHECK_THROWS_AS(make_cap(from_angle(0.0), 0.0), std::domain_error);
    CHECK_THROWS_AS(make_cap(from_angle(0.0), 4.0), std::domain_error);
    CHECK(make_cap(from_angle(0.2), kPi).radius == doctest::Approx(kPi));
}

TEST_CASE("maximal separated set on the circle: eps = pi") {
    SeparatedSet s = build_maximal_separated_set(2, kPi, 3);
    // only antipodal pairs are pi-separated; two of them cover
    CHECK(s.points.size() == 2);
    CHECK(s.min_pairwise >= kPi - 1e-12);
    CHECK(s.covering_radius < kPi);
}

TEST_CASE("maximal separated set on the circle: eps = 0.6 pi") {
    // brute-force over circle arcs: at most 3 points can be 0.6 pi-separated
    // (3 * 0.6 pi <= 2 pi < 4 * 0.6 pi); 2 antipodal points already cover
    // (radius pi/2 < 0.6 pi), so both cardinalities 2 and 3 are maximal
    for (std::uint64_t seed : {1ULL, 2ULL, 7ULL}) {
        SeparatedSet s = build_maximal_separated_set(2, 0.6 * kPi, seed);
        CHECK(s.points.size() >= 2);
        CHECK(s.points.size() <= 3);
        CHECK(s.min_pairwise >= 0.6 * kPi - 1e-12);
        CHECK(s.covering_radius < 0.6 * kPi);
    }
}

TEST_CASE("separated set cardinality window on the circle") {
    for (int k : {4, 8, 16, 64}) {
        double eps = 2.0 * kPi / k;
        SeparatedSet s = build_maximal_separated_set(2, eps, 11);
        // packing: at most k arcs of length eps fit; covering needs > k/2
        CHECK(s.points.size() <= static_cast<std::size_t>(k));
        CHECK(2 * s.points.size() >= static_cast<std::size_t>(k));
    }
}

TEST_CASE("separated set invariants and errors") {
    CHECK_THROWS_AS(build_maximal_separated_set(2, 0.0, 1), std::domain_error);
    CHECK_THROWS_AS(build_maximal_separated_set(4, 0.3, 1), std::invalid_argument);

    SeparatedSet s = build_maximal_separated_set(3, 0.4, 5);
    CHECK(s.min_pairwise >= 0.4);
    CHECK(s.covering_radius < 0.4);
    // determinism
    SeparatedSet s2 = build_maximal_separated_set(3, 0.4, 5);
    REQUIRE(s2.points.size() == s.points.size());
    for (std::size_t i = 0; i < s.points.size(); ++i)
        CHECK(dot(s.points[i], s2.points[i]) == doctest::Approx(1.0));
}

TEST_CASE("cardinality scaling under eps halving") {
    for (int d : {2, 3}) {
        double lo = d == 2 ? 1.0 : 0.25; // 2^{d-2}
        double hi = std::pow(2.0, d);
        double eps = d == 2 ? 0.2 : 0.5;
        std::size_t prev = build_maximal_separated_set(d, eps, 9).points.size();
        for (int step = 0; step < 3; ++step) {
            eps *= 0.5;
            std::size_t cur = build_maximal_separated_set(d, eps, 9).points.size();
            double ratio = static_cast<double>(cur) / static_cast<double>(prev);
            CHECK(ratio >= lo);
            CHECK(ratio <= hi);
            prev = cur;
        }
    }
}

TEST_CASE("separated_set_from_points verifies separation and maximality") {
    std::vector<Point> pts;
    int n = 9;
    for (int i = 0; i < 2 * n + 1; ++i) pts.push_back(from_angle(2.0 * kPi * i / (2 * n + 1)));
    SeparatedSet s = separated_set_from_points(2, pts, 2.0 * kPi / (2 * n + 1) * 0.999);
    CHECK(s.covering_radius < s.separation);

    std::vector<Point> bad{from_angle(0.0), from_angle(0.01)};
    CHECK_THROWS_AS(separated_set_from_points(2, bad, 0.5), std::invalid_argument);
}

TEST_CASE("reference integrator on known integrals") {
    ScalarField f1 = [](const Point&) { return 1.0; };
    ScalarField w1 = [](const Point&) { return 1.0; };
    auto r = reference_integrate(f1, w1, 2, 1);
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-12));

    ScalarField x1sq = [](const Point& x) { return x[0] * x[0]; };
    auto r3 = reference_integrate(x1sq, w1, 3, 1);
    CHECK(r3.value == doctest::Approx(1.0 / 3.0).epsilon(1e-10));

    DunklWeight w11 = DunklWeight::z2d({1.0, 1.0});
    ScalarField hw = [&](const Point& x) { return w11.eval(x); };
    auto rw = reference_integrate(f1, hw, 2, 2, w11.split_angles_d2());
    CHECK(rw.value == doctest::Approx(0.125).epsilon(1e-12));
    CHECK(rw.est_error <= 1e-10);

    // level agreement is reported
    auto ra = reference_integrate(f1, hw, 2, 1, w11.split_angles_d2());
    CHECK(std::abs(ra.value - ra.prev_value) == doctest::Approx(ra.est_error));
}
