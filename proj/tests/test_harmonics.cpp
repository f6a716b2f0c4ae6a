#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "core/cubature.hpp"
#include "core/harmonics.hpp"
#include "core/rng.hpp"

#include "testutil.hpp"

#include <cmath>

using namespace dunkl;

TEST_CASE("gegenbauer recurrence values") {
    CHECK(gegenbauer(1, 1.0, 0.5) == doctest::Approx(1.0));
    CHECK(gegenbauer(2, 1.0, 1.0) == doctest::Approx(3.0));   // C_n^1(1) = n + 1
    CHECK(gegenbauer(3, 0.5, 1.0) == doctest::Approx(1.0));   // Legendre at 1
    CHECK(gegenbauer_at_one(5, 0.7) == doctest::Approx(gegenbauer(5, 0.7, 1.0)).epsilon(1e-10));
    CHECK_THROWS_AS(gegenbauer(2, 0.0, 0.3), std::domain_error);
    CHECK_THROWS_AS(gegenbauer(-1, 1.0, 0.3), std::invalid_argument);
}

TEST_CASE("eta cutoff shape") {
    CHECK(eta_cutoff(0.5) == 1.0);
    CHECK(eta_cutoff(2.7) == 0.0);
    CHECK(eta_cutoff(1.5) == doctest::Approx(0.5));
    // non-increasing on [1, 2]
    double prev = 1.0;
    for (int i = 0; i <= 50; ++i) {
        double v = eta_cutoff(1.0 + i / 50.0);
        CHECK(v <= prev + 1e-15);
        prev = v;
    }
    CHECK(bump_profile(0.49) == 1.0);
    CHECK(bump_profile(1.01) == 0.0);
}

TEST_CASE("kernel P: closed forms and normalization") {
    DunklWeight w0d3 = DunklWeight::z2d({0.0, 0.0, 0.0});
    Point x = from_spherical(0.3, 1.0), y = from_spherical(-0.2, 2.5);
    CHECK(kernel_P(w0d3, 0, x, y) == doctest::Approx(1.0));
    CHECK(kernel_P(w0d3, 1, x, y) == doctest::Approx(3.0 * dot(x, y)));

    DunklWeight wh = DunklWeight::z2d({0.5, 0.5});
    Point a = from_angle(0.4), b = from_angle(2.2);
    CHECK(kernel_P(wh, 0, a, b) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(kernel_P(wh, 3, a, b) == doctest::Approx(kernel_P(wh, 3, b, a)).epsilon(1e-10));

    // general groups are not supported by the kernel machinery
    double c = std::cos(kPi / 5), s = std::sin(kPi / 5);
    DunklWeight rot(make_root_system(2, {make_point(2, c, s), make_point(2, -s, c)}, {0.5, 0.5}));
    CHECK_THROWS_AS(kernel_P(rot, 1, a, b), capability_error);
}

TEST_CASE("kernel P agrees with the orthonormal-basis kernel") {
    DunklWeight wh = DunklWeight::z2d({0.75, 0.25});
    HarmonicAnalyzer an(wh, 10);
    Point x = from_angle(1.234), y = from_angle(5.0);
    for (int n : {0, 1, 2, 5, 9})
        CHECK(kernel_P(wh, n, x, y) ==
              doctest::Approx(an.kernel_from_basis(n, x, y)).epsilon(1e-9));
}

TEST_CASE("kernel P reproducing property via cubature") {
    DunklWeight wh = DunklWeight::z2d({0.5, 0.5});
    int n = 3;
    CubatureRule rule = solve_with_retry(wh, 2 * n + 2, 0.25, 1e-8, 3);
    Point x = from_angle(0.8), z = from_angle(3.9);
    double conv = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        conv += rule.weights[i] * kernel_P(wh, n, x, rule.nodes[i]) *
                kernel_P(wh, n, rule.nodes[i], z);
    CHECK(conv == doctest::Approx(kernel_P(wh, n, x, z)).epsilon(1e-6));
}

TEST_CASE("kernel L") {
    DunklWeight wh = DunklWeight::z2d({0.5, 0.5});
    Point x = from_angle(0.9), y = from_angle(1.7);
    // n = 1: eta(0) = eta(1) = 1, so L_1 = P_0 + P_1
    CHECK(kernel_L(wh, 1, x, y) ==
          doctest::Approx(kernel_P(wh, 0, x, y) + kernel_P(wh, 1, x, y)).epsilon(1e-10));

    // kappa = 0 circle diagonal: 1 + 2 sum eta(k/n)
    DunklWeight w0 = DunklWeight::z2d({0.0, 0.0});
    int n = 4;
    double expect = 1.0;
    for (int k = 1; k < 2 * n; ++k) expect += 2.0 * eta_cutoff(static_cast<double>(k) / n);
    CHECK(kernel_L(w0, n, x, x) == doctest::Approx(expect).epsilon(1e-10));

    CHECK(kernel_L(wh, 3, x, y) == doctest::Approx(kernel_L(wh, 3, y, x)).epsilon(1e-10));
}

TEST_CASE("projection, Parseval and orthogonality") {
    DunklWeight wh = DunklWeight::z2d({0.5, 0.5});
    HarmonicAnalyzer an(wh, 12);

    // f = 1 projects to block 0 only
    Expansion one = an.expand(constant_field(1.0));
    CHECK(one.coeffs[0] == doctest::Approx(1.0).epsilon(1e-10));
    for (int k = 1; k <= 12; ++k) CHECK(an.block_norm2(one, k) < 1e-9);

    // random band-limited: Parseval against the weighted grid norm
    Expansion f = an.random_bandlimited(10, 77);
    CHECK(an.norm(f, 2.0) == doctest::Approx(an.norm2(f)).epsilon(1e-6));

    // projection blocks are orthogonal and idempotent
    Expansion p3 = an.project(f, 3);
    CHECK(an.block_norm2(p3, 3) == doctest::Approx(an.block_norm2(f, 3)));
    CHECK(an.norm2(an.project(p3, 4)) < 1e-12);

    // d3 unweighted: proj_1 of x1 is x1
    DunklWeight w0 = DunklWeight::z2d({0.0, 0.0, 0.0});
    HarmonicAnalyzer a3(w0, 6);
    Expansion fx = a3.expand(coordinate_monomial_field({1}));
    Expansion p1 = a3.project(fx, 1);
    Point t = from_spherical(0.37, 2.0);
    CHECK(a3.eval(p1, t) == doctest::Approx(t[0]).epsilon(1e-9));
    CHECK(a3.block_norm2(fx, 0) < 1e-10);
    CHECK(a3.block_norm2(fx, 2) < 1e-10);
}

TEST_CASE("eta_n operator properties") {
    DunklWeight wh = DunklWeight::z2d({0.5, 0.5});
    HarmonicAnalyzer an(wh, 16);
    int n = 6;

    // reproduces polynomials of degree <= n
    Expansion f = an.random_bandlimited(n, 5);
    Expansion g = an.eta_n(f, n);
    double worst = 0.0;
    for (int i = 0; i < 128; ++i) {
        Point x = from_angle(2.0 * kPi * i / 128.0);
        worst = std::max(worst, std::abs(an.eval(f, x) - an.eval(g, x)));
    }
    CHECK(worst < 1e-6);

    // f == 1 stays 1
    Expansion e1 = an.eta_n_apply(constant_field(1.0), n);
    CHECK(an.eval(e1, from_angle(0.3)) == doctest::Approx(1.0).epsilon(1e-9));

    // band limit: coefficients beyond 2n - 1 vanish
    Expansion h = an.random_bandlimited(16, 9);
    Expansion eh = an.eta_n(h, 6);
    for (int k = 12; k <= 16; ++k) CHECK(an.block_norm2(eh, k) < 1e-14);

    // discontinuous field: ||f - eta_n f||_1 decreases along n
    ScalarField sign_field = [](const Point& x) { return x[0] >= 0.0 ? 1.0 : -1.0; };
    Expansion sf = an.expand(sign_field);
    double prev = 1e300;
    for (int m : {2, 4, 8}) {
        Expansion em = an.eta_n(sf, m);
        Expansion diff = sf;
        for (std::size_t j = 0; j < diff.coeffs.size(); ++j) diff.coeffs[j] -= em.coeffs[j];
        double err = an.norm(diff, 1.0);
        CHECK(err < prev);
        prev = err;
    }

    // boundedness on the test corpus at p in {1, 2, inf}
    const double inf = std::numeric_limits<double>::infinity();
    for (double p : {1.0, 2.0, inf}) {
        double ratio = an.norm(an.eta_n(sf, 4), p) / an.norm(sf, p);
        CHECK(ratio < 4.0);
    }
}

TEST_CASE("dyadic blocks") {
    DunklWeight wh = DunklWeight::z2d({0.5, 0.5});
    HarmonicAnalyzer an(wh, 32);

    // A_s annihilates low-degree polynomials for s >= 1
    Expansion lin = an.random_bandlimited(1, 3);
    for (int s : {1, 2, 3}) CHECK(an.norm2(an.dyadic_block(lin, s)) < 1e-12);

    // telescoping: sum_{s<=S} A_s f = eta_{2^S} f
    Expansion f = an.random_bandlimited(12, 8);
    int S = 4;
    Expansion sum = an.from_coeffs(std::vector<double>(static_cast<std::size_t>(an.basis_size()), 0.0));
    for (int s = 0; s <= S; ++s) {
        Expansion as = an.dyadic_block(f, s);
        for (std::size_t j = 0; j < sum.coeffs.size(); ++j) sum.coeffs[j] += as.coeffs[j];
    }
    Expansion direct = an.eta_n(f, 1 << S);
    double err = 0.0;
    for (std::size_t j = 0; j < sum.coeffs.size(); ++j)
        err = std::max(err, std::abs(sum.coeffs[j] - direct.coeffs[j]));
    CHECK(err < 1e-8);

    // block decay: ||A_s f|| <= C 2^{-sr} ||(-Delta)^{r/2} f|| with a
    // finite stable constant on a smoothness-critical corpus
    double r = 2.0;
    std::vector<double> scale(static_cast<std::size_t>(an.max_degree()) + 1, 0.0);
    for (int k = 0; k <= an.max_degree(); ++k)
        scale[static_cast<std::size_t>(k)] = std::pow(std::max(k, 1), -r - 0.5);
    Expansion g = an.random_bandlimited(32, 13, scale);
    Expansion dg = an.frac_laplacian(g, r);
    double dnorm = an.norm2(dg);
    for (int s : {2, 3, 4}) {
        double c = an.norm2(an.dyadic_block(g, s)) * std::pow(2.0, s * r) / dnorm;
        CHECK(c < 8.0);
    }
}

TEST_CASE("fractional laplacian diagonal") {
    DunklWeight w11 = DunklWeight::z2d({0.5, 0.5}); // lambda = 1
    REQUIRE(w11.lambda_kappa() == doctest::Approx(1.0));
    HarmonicAnalyzer an(w11, 6);
    Expansion f = an.random_bandlimited(4, 2);

    Expansion d2 = an.frac_laplacian(f, 2.0);
    int j = an.block_begin(2);
    CHECK(d2.coeffs[static_cast<std::size_t>(j)] ==
          doctest::Approx(8.0 * f.coeffs[static_cast<std::size_t>(j)])); // 2(2 + 2) = 8
    CHECK(d2.coeffs[0] == 0.0);

    Expansion id = an.frac_laplacian(f, 0.0);
    CHECK(id.coeffs[static_cast<std::size_t>(j)] ==
          doctest::Approx(f.coeffs[static_cast<std::size_t>(j)]));

    // semigroup property on blocks >= 1
    Expansion a = an.frac_laplacian(an.frac_laplacian(f, 0.7), 1.3);
    Expansion b = an.frac_laplacian(f, 2.0);
    for (std::size_t i = 1; i < a.coeffs.size(); ++i)
        CHECK(a.coeffs[i] == doctest::Approx(b.coeffs[i]).epsilon(1e-12));

    // negative order requires a vanishing constant block
    Expansion c = an.expand(constant_field(1.0));
    CHECK_THROWS_AS(an.frac_laplacian(c, -1.0), std::domain_error);
}

TEST_CASE("eigenvalue identity against the finite-difference Dunkl oracle") {
    // d = 2 weighted: projected blocks satisfy Delta_{h,0} Y = -n(n+2 lambda) Y,
    // with Delta_{h,0} computed by nested finite differences + reflections
    DunklWeight wh = DunklWeight::z2d({0.5, 0.5});
    HarmonicAnalyzer an(wh, 5);
    Expansion f = an.random_bandlimited(4, 19);
    for (int n : {1, 2, 3, 4}) {
        Expansion yn = an.project(f, n);
        std::vector<double> raw = an.to_raw_coeffs(yn);
        ScalarField field = [&](const Point& x) { return an.eval_raw(raw, x); };
        double lam = wh.lambda_kappa();
        double eig = n * (n + 2.0 * lam);
        Point x = from_angle(0.61);
        double lhs = -testutil::spherical_h_laplacian(wh, field, x, 0.01);
        double rhs = eig * field(x);
        CHECK(lhs == doctest::Approx(rhs).epsilon(2e-6));
    }

    // d = 3 unweighted
    DunklWeight w0 = DunklWeight::z2d({0.0, 0.0, 0.0});
    HarmonicAnalyzer a3(w0, 4);
    Expansion g = a3.random_bandlimited(3, 23);
    for (int n : {1, 2, 3}) {
        Expansion yn = a3.project(g, n);
        std::vector<double> raw = a3.to_raw_coeffs(yn);
        ScalarField field = [&](const Point& x) { return a3.eval_raw(raw, x); };
        double eig = n * (n + 2.0 * w0.lambda_kappa());
        Point x = from_spherical(0.41, 0.9);
        double lhs = -testutil::spherical_h_laplacian(w0, field, x, 0.01);
        CHECK(lhs == doctest::Approx(eig * field(x)).epsilon(2e-6));
    }
}

TEST_CASE("best approximation brackets") {
    DunklWeight wh = DunklWeight::z2d({0.5, 0.5});
    HarmonicAnalyzer an(wh, 24);
    int n = 6;

    // f in Pi_n: both ends near zero
    Expansion f = an.random_bandlimited(n, 31);
    auto br = an.best_approx_error(f, n, 2.0);
    CHECK(br.upper < 1e-8);
    auto br1 = an.best_approx_error(f, n, 1.0);
    CHECK(br1.upper < 1e-6);

    // p = 2: exact tail via Parseval
    Expansion g = an.random_bandlimited(12, 37);
    double tail = 0.0;
    for (int k = n + 1; k <= 12; ++k) tail += std::pow(an.block_norm2(g, k), 2.0);
    auto br2 = an.best_approx_error(g, n, 2.0);
    CHECK(br2.lower == doctest::Approx(std::sqrt(tail)).epsilon(1e-10));
    CHECK(br2.lower == br2.upper);

    // p = 1 and inf: lower <= upper, and the lower bound is positive for a
    // function with genuine high-degree content
    const double inf = std::numeric_limits<double>::infinity();
    for (double p : {1.0, inf}) {
        auto b = an.best_approx_error(g, n, p);
        CHECK(b.lower > 0.0);
        CHECK(b.lower <= b.upper * (1.0 + 1e-9));
    }

    // Jackson-type stability: E_n(f) n^r / ||(-Delta)^{r/2} f|| stable in n
    double r = 2.0;
    std::vector<double> scale(static_cast<std::size_t>(an.max_degree()) + 1, 0.0);
    for (int k = 0; k <= an.max_degree(); ++k)
        scale[static_cast<std::size_t>(k)] = std::pow(std::max(k, 1), -r - 0.5);
    Expansion h = an.random_bandlimited(24, 41, scale);
    double dnorm = an.norm2(an.frac_laplacian(h, r));
    double prev = -1.0;
    for (int m : {4, 8}) {
        double c = an.best_approx_error(h, m, 2.0).upper * std::pow(m, r) / dnorm;
        CHECK(c < 4.0);
        if (prev > 0.0) CHECK(std::abs(c / prev - 1.0) < 0.5);
        prev = c;
    }
}

TEST_CASE("general-group analyzer (Gram-Schmidt path) stays orthonormal") {
    double c = std::cos(kPi / 7), s = std::sin(kPi / 7);
    DunklWeight rot(make_root_system(2, {make_point(2, c, s), make_point(2, -s, c)}, {0.4, 0.4}));
    HarmonicAnalyzer an(rot, 10);
    Expansion f = an.random_bandlimited(8, 3);
    CHECK(an.norm(f, 2.0) == doctest::Approx(an.norm2(f)).epsilon(1e-8));
    // degree-1 content of a constant vanishes
    Expansion one = an.expand(constant_field(1.0));
    CHECK(an.block_norm2(one, 1) < 1e-9);
}

TEST_CASE("weighted d3 analyzer is a stated capability hole") {
    DunklWeight w3 = DunklWeight::z2d({0.5, 0.5, 0.5});
    CHECK_THROWS_AS(HarmonicAnalyzer(w3, 4), capability_error);
}
