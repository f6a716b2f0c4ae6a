#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "core/runner.hpp"

#include <dunkl_entropy.h>

#include <cmath>
#include <string>

using namespace dunkl;

TEST_CASE("run_command: nodes, determinism, statuses") {
    std::string cfg = R"({"d":2,"eps":0.2,"seed":5})";
    RunResult a = run_command("nodes", cfg, 0, false, true);
    REQUIRE(a.status == RunStatus::ok);
    CHECK(a.json.find("\"count\"") != std::string::npos);
    CHECK(!a.csv.empty());

    RunResult b = run_command("nodes", cfg, 0, false, true);
    CHECK(a.json == b.json);
    CHECK(a.csv == b.csv);

    // seed override changes the stream
    RunResult c = run_command("nodes", cfg, 99, true, false);
    CHECK(c.status == RunStatus::ok);
    CHECK(c.json != a.json);

    CHECK(run_command("nodes", "{", 0, false, false).status == RunStatus::invalid_config);
    CHECK(run_command("wat", "{}", 0, false, false).status == RunStatus::invalid_config);
    CHECK(run_command("nodes", R"({"d":5,"eps":0.2})", 0, false, false).status ==
          RunStatus::invalid_config);
}

TEST_CASE("run_command: cubature and infeasibility") {
    RunResult r = run_command("cubature", R"({"d":2,"kappa":[0.5,0.5],"degree":6,"seed":3})", 0,
                              false, false);
    REQUIRE(r.status == RunStatus::ok);
    CHECK(r.json.find("\"residual\"") != std::string::npos);

    // absurd tolerance cannot be met
    RunResult bad = run_command(
        "cubature", R"({"d":2,"kappa":[0.5,0.5],"degree":6,"seed":3,"tol":1e-30})", 0, false,
        false);
    CHECK(bad.status == RunStatus::infeasible);
}

TEST_CASE("run_command: ball-entropy and sobolev commands") {
    RunResult r = run_command(
        "ball-entropy", R"({"m":2,"p":1,"q":"inf","k_list":[1,2,3],"seed":4})", 0, false, true);
    REQUIRE(r.status == RunStatus::ok);
    CHECK(r.json.find("\"schuett\"") != std::string::npos);

    RunResult u = run_command(
        "sobolev-upper",
        R"({"d":2,"kappa":[0.5,0.5],"r":3,"p":2,"q":2,"n_grid":[16,32,64,128]})", 0, false, false);
    REQUIRE(u.status == RunStatus::ok);

    RunResult inval = run_command("sobolev-upper",
                                  R"({"d":2,"kappa":[0.5,0.5],"r":0.5,"p":1,"q":2,"n_grid":[16]})",
                                  0, false, false);
    CHECK(inval.status == RunStatus::invalid_config);
}

TEST_CASE("C API: weights and rules through opaque handles") {
    CHECK(std::string(de_version()) == "0.1.0");

    de_weight* w = nullptr;
    double kappa[2] = {0.5, 0.5};
    REQUIRE(de_weight_create_z2d(2, kappa, &w) == DE_OK);
    int d = 0;
    CHECK(de_weight_dim(w, &d) == DE_OK);
    CHECK(d == 2);
    double g = 0, a = 0;
    CHECK(de_weight_gamma(w, &g) == DE_OK);
    CHECK(g == doctest::Approx(1.0));
    CHECK(de_weight_norm_const(w, &a) == DE_OK);
    CHECK(a == doctest::Approx(1.0 / 3.14159265358979).epsilon(1e-9));

    double x[2] = {1.0, 0.0};
    double hv = -1.0;
    CHECK(de_weight_eval(w, x, &hv) == DE_OK);
    CHECK(hv == doctest::Approx(0.0));

    double cm = 0.0;
    double center[2] = {std::sqrt(0.5), std::sqrt(0.5)};
    CHECK(de_weight_cap_measure(w, center, 0.3, &cm) == DE_OK);
    CHECK(cm > 0.0);

    de_rule* r = nullptr;
    REQUIRE(de_rule_solve(w, 6, 0.25, 1e-8, 11, &r) == DE_OK);
    int nn = 0;
    CHECK(de_rule_size(r, &nn) == DE_OK);
    CHECK(nn >= 13);
    int deg = 0;
    double resid = 0, sep = 0;
    CHECK(de_rule_info(r, &deg, &resid, &sep) == DE_OK);
    CHECK(deg == 6);
    CHECK(resid <= 1e-8);
    std::vector<double> coords(static_cast<std::size_t>(nn) * 2), lam(static_cast<std::size_t>(nn));
    CHECK(de_rule_nodes(r, coords.data(), lam.data()) == DE_OK);
    double mass = 0;
    for (double v : lam) mass += v;
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));

    char* js = nullptr;
    CHECK(de_rule_to_json(r, &js) == DE_OK);
    CHECK(std::string(js).find("\"nodes\"") != std::string::npos);
    de_string_free(js);

    de_rule_free(r);
    de_weight_free(w);

    // error paths surface through the status and de_last_error
    de_weight* bad = nullptr;
    double negk[2] = {-1.0, 0.0};
    CHECK(de_weight_create_z2d(2, negk, &bad) == DE_ERR_INVALID_ARGUMENT);
    CHECK(std::string(de_last_error()).size() > 0);
}

TEST_CASE("C API: schuett, brackets and de_run determinism") {
    double v = 0;
    REQUIRE(de_schuett_value(16, 4, 1.0, 2.0, &v) == DE_OK);
    CHECK(v == doctest::Approx(0.125));

    double lo = 0, hi = 0;
    REQUIRE(de_entropy_bracket(1, 2.0, 2.0, 3, 1, &lo, &hi) == DE_OK);
    CHECK(hi == doctest::Approx(0.125));
    CHECK(lo <= hi);

    const char* cfg = "{\"d\":2,\"kappa\":[0.5,0.5],\"degree\":4,\"seed\":5}";
    char *j1 = nullptr, *c1 = nullptr, *j2 = nullptr, *c2 = nullptr;
    REQUIRE(de_run("cubature", cfg, 0, 0, 1, &j1, &c1) == DE_OK);
    REQUIRE(de_run("cubature", cfg, 0, 0, 1, &j2, &c2) == DE_OK);
    CHECK(std::string(j1) == std::string(j2));
    CHECK(std::string(c1) == std::string(c2));
    de_string_free(j1);
    de_string_free(c1);
    de_string_free(j2);
    de_string_free(c2);

    char* je = nullptr;
    CHECK(de_run("cubature", "{\"d\":2}", 0, 0, 0, &je, nullptr) == DE_ERR_INVALID_ARGUMENT);
}

TEST_CASE("weight from config json") {
    DunklWeight w = weight_from_config_json(R"({"d":3,"kappa":[0.5,0.5,0.5]})");
    CHECK(w.dim() == 3);
    DunklWeight w2 = weight_from_config_json(
        R"({"root_system":"d=2\nroot 1 0 kappa 0.5\nroot 0 1 kappa 0.5\n"})");
    CHECK(w2.is_z2d());
    CHECK_THROWS_AS(weight_from_config_json(R"({"d":2,"kappa":[0.5]})"), std::invalid_argument);
}
