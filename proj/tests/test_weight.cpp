#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "core/cubature.hpp"
#include "core/rng.hpp"
#include "core/weight.hpp"

#include <cmath>

using namespace dunkl;

TEST_CASE("reflection basics") {
    Point e1 = make_point(2, 1, 0);
    Point e2 = make_point(2, 0, 1);
    Point diag = make_point(2, 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0));

    Point r = reflect(e1, e1);
    CHECK(r[0] == doctest::Approx(-1.0));
    CHECK(r[1] == doctest::Approx(0.0));

    Point fixed = reflect(e2, e1);
    CHECK(fixed[0] == doctest::Approx(0.0));
    CHECK(fixed[1] == doctest::Approx(1.0));

    Point rd = reflect(diag, e1);
    CHECK(rd[0] == doctest::Approx(-diag[0]));
    CHECK(rd[1] == doctest::Approx(diag[1]));

    // involution, norm preservation
    Point v = make_point(3, 0.3, -0.4, 0.5);
    Point x = from_spherical(0.77, 2.13);
    Point xx = reflect(reflect(x, v), v);
    CHECK(geodesic_distance(x, normalized(xx)) < 1e-12);
    CHECK(norm(reflect(x, v)) == doctest::Approx(1.0));

    CHECK_THROWS_AS(reflect(x, make_point(3, 0, 0, 0)), std::domain_error);
}

TEST_CASE("root system construction and validation") {
    // Z2^d detection
    RootSystem rs = z2d_root_system({0.5, 0.5});
    CHECK(rs.tag == GroupTag::Z2d);

    // rotated Z2^2: closed, but not axis-aligned
    double c = std::cos(kPi / 5), s = std::sin(kPi / 5);
    RootSystem rot = make_root_system(2, {make_point(2, c, s), make_point(2, -s, c)}, {0.5, 0.5});
    CHECK(rot.tag == GroupTag::GeneralVerified);

    // not closed: single diagonal root plus e1
    CHECK_THROWS_AS(make_root_system(
                        2, {make_point(2, 1, 0), make_point(2, std::sqrt(0.5), std::sqrt(0.5))},
                        {0.5, 0.5}),
                    std::invalid_argument);

    // conjugacy: I2(4) (dihedral, 4 positive roots) has two classes; mixing
    // multiplicities across a class must throw
    double h = std::sqrt(0.5);
    std::vector<Point> d4{make_point(2, 1, 0), make_point(2, 0, 1), make_point(2, h, h),
                          make_point(2, -h, h)};
    CHECK_NOTHROW(make_root_system(2, d4, {0.3, 0.3, 0.7, 0.7}));
    CHECK_THROWS_AS(make_root_system(2, d4, {0.3, 0.4, 0.7, 0.7}), std::invalid_argument);
}

TEST_CASE("root system text round trip") {
    RootSystem rs = z2d_root_system({0.25, 0.75, 0.0});
    std::string text = format_root_system(rs);
    RootSystem back = parse_root_system(text);
    CHECK(back.dim == 3);
    CHECK(back.positive_roots.size() == 3);
    CHECK(back.multiplicities[1] == doctest::Approx(0.75));
    CHECK_THROWS_AS(parse_root_system("root 1 0 kappa 1"), std::invalid_argument);
}

TEST_CASE("weight evaluation and constants") {
    DunklWeight w = DunklWeight::z2d({1.0, 1.0});
    Point diag = make_point(2, 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0));
    CHECK(w.eval(diag) == doctest::Approx(0.25));
    CHECK(w.eval(make_point(2, 0, 1)) == doctest::Approx(0.0));

    DunklWeight w0 = DunklWeight::z2d({0.0, 0.0});
    CHECK(w0.eval(diag) == doctest::Approx(1.0));
    CHECK(w0.norm_const() == doctest::Approx(1.0));

    CHECK(w.gamma_kappa() == doctest::Approx(2.0));
    CHECK(w.lambda_kappa() == doctest::Approx(2.0));
    CHECK(w.norm_const() == doctest::Approx(0.125));

    DunklWeight w3 = DunklWeight::z2d({0.5, 0.5, 0.5});
    CHECK(w3.lambda_kappa() == doctest::Approx(0.5 + 1.5));
    // cross-check the closed form against reference quadrature
    ScalarField one = [](const Point&) { return 1.0; };
    ScalarField hw = [&](const Point& x) { return w3.eval(x); };
    auto r = reference_integrate(one, hw, 3, 2, {}, w3.split_t_d3(), w3.split_phi_d3());
    CHECK(r.value == doctest::Approx(w3.norm_const()).epsilon(1e-5));
}

TEST_CASE("G-invariance of the weight") {
    DunklWeight w = DunklWeight::z2d({0.5, 1.5});
    Rng rng(4);
    for (int t = 0; t < 32; ++t) {
        Point x = from_angle(rng.uniform(0.0, 2.0 * kPi));
        for (const auto& v : w.roots().positive_roots)
            CHECK(w.eval(x) == doctest::Approx(w.eval(normalized(reflect(x, v)))).epsilon(1e-12));
        // sign-flip invariance
        Point y = x;
        y[0] = -y[0];
        CHECK(w.eval(x) == doctest::Approx(w.eval(y)).epsilon(1e-12));
    }
}

TEST_CASE("cap measures") {
    DunklWeight w0d2 = DunklWeight::z2d({0.0, 0.0});
    CHECK(cap_measure(w0d2, make_cap(from_angle(1.0), 0.8)) == doctest::Approx(0.8 / kPi));

    DunklWeight w0d3 = DunklWeight::z2d({0.0, 0.0, 0.0});
    CHECK(cap_measure(w0d3, make_cap(from_spherical(0.2, 0.4), kPi)) == doctest::Approx(1.0));

    DunklWeight w11 = DunklWeight::z2d({1.0, 1.0});
    CHECK(cap_measure(w11, make_cap(make_point(2, 1, 0), kPi), 1) ==
          doctest::Approx(0.125).epsilon(1e-9));

    // monotone in radius
    DunklWeight wh = DunklWeight::z2d({0.5, 0.5});
    Point x = from_angle(0.7);
    CHECK(cap_measure(wh, make_cap(x, 0.2)) < cap_measure(wh, make_cap(x, 0.4)));
}

TEST_CASE("cap measure doubling model") {
    DunklWeight w0 = DunklWeight::z2d({0.0, 0.0, 0.0});
    CHECK(cap_measure_model(w0, from_spherical(0.1, 0.2), 10) == doctest::Approx(0.01));

    DunklWeight w11 = DunklWeight::z2d({1.0, 1.0});
    double expect = 0.1 * std::pow(1.0 + 0.1, 2.0) * std::pow(0.1, 2.0);
    CHECK(cap_measure_model(w11, make_point(2, 1, 0), 10) == doctest::Approx(expect));

    // comparability bracket over random samples (constants absorb the
    // surface-measure normalization 1/omega_{d-1})
    DunklWeight wh = DunklWeight::z2d({0.5, 0.5});
    Rng rng(8);
    double lo = 1e300, hi = 0.0;
    for (int t = 0; t < 40; ++t) {
        Point x = from_angle(rng.uniform(0.0, 2.0 * kPi));
        int n = static_cast<int>(std::floor(std::exp(rng.uniform(std::log(8.0), std::log(128.0)))));
        double ratio = 2.0 * kPi * cap_measure(wh, make_cap(x, 1.0 / n)) / cap_measure_model(wh, x, n);
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
    }
    CHECK(lo > 1.0 / 8.0);
    CHECK(hi < 8.0);
}

TEST_CASE("local cap-average weight approximant") {
    DunklWeight w0 = DunklWeight::z2d({0.0, 0.0});
    for (int n : {3, 9}) {
        CHECK(w_n_approx(w0, from_angle(0.3), n) == doctest::Approx(1.0 / kPi));
    }
    DunklWeight w03 = DunklWeight::z2d({0.0, 0.0, 0.0});
    int n = 7;
    CHECK(w_n_approx(w03, from_spherical(0.5, 1.0), n) ==
          doctest::Approx(n * n * 0.5 * (1.0 - std::cos(1.0 / n))));
}

TEST_CASE("comparability of w_n and w norms on band-limited functions") {
    // ||f||_{p,w_n} comparable to ||f||_{p,w} for band-limited f
    DunklWeight wh = DunklWeight::z2d({0.5, 0.5});
    int n = 6;
    Rng rng(21);
    SphereGrid grid = weighted_circle_grid(wh, 2 * n + 4); // nodes with h^2/a folded in
    double lo = 1e300, hi = 0.0;
    for (int t = 0; t < 12; ++t) {
        std::vector<double> coef(static_cast<std::size_t>(2 * n + 1));
        for (auto& c : coef) c = rng.normal();
        auto f = [&](const Point& x) {
            double theta = std::atan2(x[1], x[0]);
            double s = coef[0];
            for (int k = 1; k <= n; ++k)
                s += coef[static_cast<std::size_t>(2 * k - 1)] * std::cos(k * theta) +
                     coef[static_cast<std::size_t>(2 * k)] * std::sin(k * theta);
            return s;
        };
        double nw = 0.0, nwn = 0.0, mass = 0.0;
        for (std::size_t qi = 0; qi < grid.points.size(); ++qi) {
            double fv = std::abs(f(grid.points[qi]));
            nw += grid.weights[qi] * fv;
            // w_n-weighted norm: quadrature against w_n instead of h^2
            double wq = grid.weights[qi] / std::max(wh.eval(grid.points[qi]), 1e-300);
            nwn += wq * w_n_approx(wh, grid.points[qi], n) * fv;
            mass += grid.weights[qi];
        }
        (void)mass;
        double ratio = nwn / nw;
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
    }
    CHECK(lo > 0.05);
    CHECK(hi < 20.0);
    CHECK(hi / lo < 8.0);
}

TEST_CASE("doubling diagnostics") {
    DunklWeight w0 = DunklWeight::z2d({0.0, 0.0});
    auto grid = default_doubling_grid(2, 3);
    DoublingReport rep = doubling_diagnostics(w0, grid);
    CHECK(rep.estimated_s_w == doctest::Approx(1.0).epsilon(0.05));
    // single-cap identity: depth-0 samples have ratio 1
    for (const auto& s : rep.samples)
        if (s.depth == 0) CHECK(s.ratio == doctest::Approx(1.0));

    DunklWeight w11 = DunklWeight::z2d({1.0, 1.0});
    DoublingReport re2 = doubling_diagnostics(w11, default_doubling_grid(2, 3));
    CHECK(re2.estimated_s_w <= 1.0 + 4.0); // d - 1 + 2|kappa|
    CHECK(re2.doubling_L > 1.0);
    CHECK(std::isfinite(re2.comparability_C));
}

TEST_CASE("weighted node-sum ratio (lemma31)") {
    // equal weights: ratio has the closed form (#nodes)^{1+beta} lambda^... algebra
    int n = 8;
    std::size_t N = 40;
    std::vector<double> lam(N, 1.0 / static_cast<double>(N));
    double beta = 0.3;
    double expect = std::pow(static_cast<double>(N), 1.0 + beta) / std::pow(n, 1.0 + beta);
    CHECK(lemma31_ratio(lam, 2, 0.0, beta, n) == doctest::Approx(expect));

    // beta -> 0+ limit: ratio -> #nodes / n^{d-1}
    CHECK(lemma31_ratio(lam, 2, 0.0, 1e-9, n) ==
          doctest::Approx(static_cast<double>(N) / n).epsilon(1e-4));

    CHECK_THROWS_AS(lemma31_ratio(lam, 2, 1.0, 0.6, n), std::domain_error);
    CHECK_THROWS_AS(lemma31_ratio(lam, 2, 0.0, -0.1, n), std::domain_error);
    std::vector<double> bad{0.5, 0.0};
    CHECK_THROWS_AS(lemma31_ratio(bad, 2, 0.0, 0.3, n), std::domain_error);
}
