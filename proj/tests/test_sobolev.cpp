#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "core/sobolev.hpp"

#include <cmath>

using namespace dunkl;

TEST_CASE("pipeline config validation") {
    PipelineConfig ok{DunklWeight::z2d({0.5, 0.5}), 3.0, 1.0, 2.0, 0.1, 0.0, {}};
    CHECK_NOTHROW(validate_pipeline_config(ok));

    // r below the smoothness threshold (d-1)(1/p - 1/q)(2 gamma + 1) = 1.5
    PipelineConfig bad = ok;
    bad.r = 1.4;
    CHECK_THROWS_AS(validate_pipeline_config(bad), std::invalid_argument);

    // beta outside (0, 1/(2 gamma))
    PipelineConfig bb = ok;
    bb.beta = 0.6;
    CHECK_THROWS_AS(validate_pipeline_config(bb), std::invalid_argument);

    // allocation slack too large for r
    PipelineConfig br = ok;
    br.r = 1.6;
    br.rho = 0.5;
    CHECK_THROWS_AS(validate_pipeline_config(br), std::invalid_argument);

    CHECK(default_beta(DunklWeight::z2d({0.5, 0.5})) == doctest::Approx(0.475));
    CHECK(default_beta(DunklWeight::z2d({0.0, 0.0})) == doctest::Approx(0.95));
}

TEST_CASE("allocation schedule invariants") {
    PipelineConfig cfg{DunklWeight::z2d({0.5, 0.5}), 3.0, 1.0, 2.0, 0.1, 0.0, {}};
    for (int e : {4, 8, 12}) {
        long long n = 1LL << e;
        AllocationSchedule sc = allocate(n, cfg);
        long long tot = 0;
        for (const auto& row : sc.rows) {
            long long rt = 0;
            for (const auto& b : row.blocks) rt += b.n;
            CHECK(rt <= row.n_s);
            tot += row.n_s;
            // block sizes: first block 2, dyadic middles
            if (row.s >= 1) {
                CHECK(row.blocks.front().m == 2);
                for (std::size_t k = 1; k + 1 < row.blocks.size(); ++k)
                    CHECK(row.blocks[k].log2_m ==
                          doctest::Approx(static_cast<double>(k) * (cfg.weight.dim() - 1)));
            }
        }
        CHECK(tot <= n);
        CHECK(sc.budget_used <= n);
        CHECK(sc.J0 >= sc.J);
    }
    // degenerate smallest budget
    AllocationSchedule tiny = allocate(2, cfg);
    CHECK(tiny.budget_used <= 2);
}

TEST_CASE("rate regression") {
    std::vector<long long> ns{16, 32, 64, 128, 256};
    std::vector<double> vals;
    for (long long n : ns) vals.push_back(3.7 * std::pow(static_cast<double>(n), -2.0));
    RateReport rep = rate_regression(ns, vals, -2.0);
    CHECK(rep.slope == doctest::Approx(-2.0).epsilon(1e-10));
    CHECK(rep.max_residual < 1e-10);

    std::vector<double> flat(ns.size(), 0.5);
    CHECK(rate_regression(ns, flat, 0.0).slope == doctest::Approx(0.0));

    std::vector<double> neg(ns.size(), -1.0);
    CHECK_THROWS_AS(rate_regression(ns, neg, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(rate_regression({1, 2}, {1.0, 0.5}, 0.0), std::invalid_argument);
}

TEST_CASE("upper bound values: shape and rate examples") {
    PipelineConfig cfg{DunklWeight::z2d({0.5, 0.5}), 3.0, 2.0, 2.0, 0.1, 0.0, {}};
    for (int e = 4; e <= 12; ++e) cfg.n_grid.push_back(1 << e);

    // monotone non-increasing along the dyadic grid
    double prev = 1e300;
    std::vector<long long> ns;
    std::vector<double> vals;
    for (int n : cfg.n_grid) {
        double v = upper_bound_value(n, cfg);
        CHECK(v <= prev * (1.0 + 1e-12));
        prev = v;
        ns.push_back(n);
        vals.push_back(v);
    }
    // last-octave doubling ratio within [2^-r / 2, 2^-r * 2]
    double ratio = vals.back() / vals[vals.size() - 2];
    CHECK(ratio > 0.5 * std::pow(2.0, -3.0));
    CHECK(ratio < 2.0 * std::pow(2.0, -3.0));

    // r large: dominated by the first row; value falls fast in n
    PipelineConfig big = cfg;
    big.r = 8.0;
    CHECK(upper_bound_value(1 << 8, big) < upper_bound_value(1 << 4, big) * 1e-6);

    // q < p routes through the trivial embedding (computed at p = q)
    PipelineConfig qp{DunklWeight::z2d({0.5, 0.5}), 3.0, 2.0, 1.0, 0.1, 0.0, cfg.n_grid};
    PipelineConfig qq{DunklWeight::z2d({0.5, 0.5}), 3.0, 1.0, 1.0, 0.1, 0.0, cfg.n_grid};
    CHECK(upper_bound_value(256, qp) == doctest::Approx(upper_bound_value(256, qq)));
}

TEST_CASE("strip measures and bump system geometry") {
    CHECK(strip_measure(2, 0.1) == doctest::Approx(0.4 / kPi));
    CHECK(strip_measure(3, 0.1) == doctest::Approx(std::sin(0.1)));

    DunklWeight w11 = DunklWeight::z2d({1.0, 1.0});
    BumpSystem sys = build_bump_system(w11, 8, 42);
    CHECK(sys.centers.size() >= 8); // N comparable to l
    CHECK(sys.centers.size() <= 32);
    // disjoint supports and strip avoidance are exact predicates
    for (std::size_t i = 0; i < sys.centers.size(); ++i) {
        for (std::size_t j = i + 1; j < sys.centers.size(); ++j)
            CHECK(geodesic_distance(sys.centers[i], sys.centers[j]) > 2.0 / sys.l);
        for (const auto& v : w11.roots().positive_roots) {
            double dd = geodesic_distance(sys.centers[i], v);
            CHECK(std::abs(0.5 * kPi - dd) > sys.eps_strip + 1.0 / sys.l - 1e-12);
        }
    }

    // kappa = 0: no strips, plain packing
    DunklWeight w0 = DunklWeight::z2d({0.0, 0.0});
    BumpSystem free = build_bump_system(w0, 8, 42);
    CHECK(free.centers.size() >= sys.centers.size());

    CHECK_THROWS_AS(build_bump_system(w11, 8, 42, 0.0, 1000), std::runtime_error);
}

TEST_CASE("bump norms and ratios") {
    DunklWeight wh = DunklWeight::z2d({0.5, 0.5});
    BumpSystem sys = build_bump_system(wh, 8, 42);
    BumpNormReport rep = verify_bump_norms(sys, wh, 3.0, 1.0, 50, 7, 48);
    CHECK(rep.ratio_lo > 1.0 / 8.0);
    CHECK(rep.ratio_hi < 8.0);
    CHECK(rep.max_overlap <= rep.group_order);
    CHECK(rep.group_order == 4);
    CHECK(rep.strip_measure_total <= 0.5);
    CHECK(rep.embed_K > 0.0);

    // p = inf: sup of f_a is max |a_i|, ratio exactly 1
    BumpNormReport ri = verify_bump_norms(sys, wh, 3.0,
                                          std::numeric_limits<double>::infinity(), 10, 7, 32);
    CHECK(ri.ratio_lo == doctest::Approx(1.0));
    CHECK(ri.ratio_hi == doctest::Approx(1.0));
}

TEST_CASE("lower bound value smoke") {
    PipelineConfig cfg{DunklWeight::z2d({0.5, 0.5}), 3.0, 2.0, 2.0, 0.1, 0.0, {}};
    LowerBoundResult lb = lower_bound_value(2, cfg, 42);
    CHECK(lb.value > 0.0);
    CHECK(std::isfinite(lb.value));
    CHECK(lb.N == 4);
    // p = q: exponent cancellation leaves c n^{-r} e_n(B_p^{2n}, l_p^{2n})
    CHECK(lb.factor > 0.0);
    CHECK_THROWS_AS(lower_bound_value(64, cfg, 1), std::invalid_argument);
}
