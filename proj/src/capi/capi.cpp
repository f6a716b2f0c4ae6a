#include "dunkl_entropy.h"

#include "core/ball_entropy.hpp"
#include "core/cubature.hpp"
#include "core/harmonics.hpp"
#include "core/runner.hpp"
#include "core/weight.hpp"

#include <cstring>
#include <limits>
#include <new>
#include <string>

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

de_status fail(de_status code, const char* what) {
    g_last_error = what ? what : "unknown error";
    return code;
}

template <typename F>
de_status guarded(F&& f) {
    try {
        return f();
    } catch (const dunkl::construction_error& e) {
        return fail(DE_ERR_INFEASIBLE, e.what());
    } catch (const dunkl::capability_error& e) {
        return fail(DE_ERR_CAPABILITY, e.what());
    } catch (const std::invalid_argument& e) {
        return fail(DE_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::domain_error& e) {
        return fail(DE_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::bad_alloc& e) {
        return fail(DE_ERR_INTERNAL, e.what());
    } catch (const std::exception& e) {
        return fail(DE_ERR_ASSERTION, e.what());
    } catch (...) {
        return fail(DE_ERR_INTERNAL, "unknown exception");
    }
}

} // namespace

struct de_weight {
    dunkl::DunklWeight w;
};

struct de_rule {
    dunkl::CubatureRule rule;
    dunkl::DunklWeight weight;
};

extern "C" {

const char* de_version(void) { return "0.1.0"; }

const char* de_last_error(void) { return g_last_error.c_str(); }

void de_string_free(char* s) { delete[] s; }

de_status de_weight_create_z2d(int d, const double* kappa, de_weight** out) {
    if (!kappa || !out) return fail(DE_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        std::vector<double> k(kappa, kappa + d);
        *out = new de_weight{dunkl::DunklWeight::z2d(k)};
        return DE_OK;
    });
}

de_status de_weight_create_from_text(const char* text, de_weight** out) {
    if (!text || !out) return fail(DE_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        *out = new de_weight{dunkl::DunklWeight(dunkl::parse_root_system(text))};
        return DE_OK;
    });
}

void de_weight_free(de_weight* w) { delete w; }

de_status de_weight_dim(const de_weight* w, int* out) {
    if (!w || !out) return fail(DE_ERR_INVALID_ARGUMENT, "null argument");
    *out = w->w.dim();
    return DE_OK;
}

de_status de_weight_gamma(const de_weight* w, double* out) {
    if (!w || !out) return fail(DE_ERR_INVALID_ARGUMENT, "null argument");
    *out = w->w.gamma_kappa();
    return DE_OK;
}

de_status de_weight_lambda(const de_weight* w, double* out) {
    if (!w || !out) return fail(DE_ERR_INVALID_ARGUMENT, "null argument");
    *out = w->w.lambda_kappa();
    return DE_OK;
}

de_status de_weight_norm_const(const de_weight* w, double* out) {
    if (!w || !out) return fail(DE_ERR_INVALID_ARGUMENT, "null argument");
    *out = w->w.norm_const();
    return DE_OK;
}

de_status de_weight_eval(const de_weight* w, const double* x, double* out) {
    if (!w || !x || !out) return fail(DE_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        dunkl::Point p = dunkl::make_point(w->w.dim(), x[0], x[1], w->w.dim() == 3 ? x[2] : 0.0);
        *out = w->w.eval(p);
        return DE_OK;
    });
}

de_status de_weight_cap_measure(const de_weight* w, const double* center, double radius,
                                double* out) {
    if (!w || !center || !out) return fail(DE_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        dunkl::Point p = dunkl::make_point(w->w.dim(), center[0], center[1],
                                           w->w.dim() == 3 ? center[2] : 0.0);
        *out = dunkl::cap_measure(w->w, dunkl::make_cap(p, radius));
        return DE_OK;
    });
}

de_status de_rule_solve(const de_weight* w, int degree, double delta, double tol, uint64_t seed,
                        de_rule** out) {
    if (!w || !out) return fail(DE_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        dunkl::CubatureRule r = dunkl::solve_with_retry(w->w, degree, delta, tol, seed);
        *out = new de_rule{std::move(r), w->w};
        return DE_OK;
    });
}

void de_rule_free(de_rule* r) { delete r; }

de_status de_rule_size(const de_rule* r, int* num_nodes) {
    if (!r || !num_nodes) return fail(DE_ERR_INVALID_ARGUMENT, "null argument");
    *num_nodes = static_cast<int>(r->rule.nodes.size());
    return DE_OK;
}

de_status de_rule_info(const de_rule* r, int* exact_degree, double* residual,
                       double* separation) {
    if (!r) return fail(DE_ERR_INVALID_ARGUMENT, "null argument");
    if (exact_degree) *exact_degree = r->rule.exact_degree;
    if (residual) *residual = r->rule.residual;
    if (separation) *separation = r->rule.separation;
    return DE_OK;
}

de_status de_rule_nodes(const de_rule* r, double* coords, double* weights) {
    if (!r) return fail(DE_ERR_INVALID_ARGUMENT, "null argument");
    const int d = r->rule.dim;
    for (std::size_t i = 0; i < r->rule.nodes.size(); ++i) {
        if (coords)
            for (int j = 0; j < d; ++j) coords[i * static_cast<std::size_t>(d) + static_cast<std::size_t>(j)] = r->rule.nodes[i][j];
        if (weights) weights[i] = r->rule.weights[i];
    }
    return DE_OK;
}

de_status de_rule_to_json(const de_rule* r, char** out_json) {
    if (!r || !out_json) return fail(DE_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        *out_json = dup_string(dunkl::rule_to_json(r->rule, r->weight));
        return DE_OK;
    });
}

de_status de_schuett_value(int k, int m, double p, double q, double* out) {
    if (!out) return fail(DE_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        *out = dunkl::schuett_value(k, m, p, q);
        return DE_OK;
    });
}

de_status de_entropy_bracket(int m, double p, double q, int k, uint64_t seed, double* lower,
                             double* upper) {
    if (!lower || !upper) return fail(DE_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        dunkl::BallSpec spec;
        spec.m = m;
        spec.p = p;
        spec.q = q;
        dunkl::EntropyBracket br = dunkl::entropy_bracket(spec, k, seed);
        *lower = br.lower;
        *upper = br.upper;
        return DE_OK;
    });
}

de_status de_run(const char* command, const char* config_json, uint64_t seed, int has_seed,
                 int want_csv, char** out_json, char** out_csv) {
    if (!command || !out_json) return fail(DE_ERR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        dunkl::RunResult res = dunkl::run_command(command, config_json ? config_json : "{}", seed,
                                                  has_seed != 0, want_csv != 0);
        if (res.status != dunkl::RunStatus::ok) {
            g_last_error = res.message;
            switch (res.status) {
                case dunkl::RunStatus::invalid_config: return DE_ERR_INVALID_ARGUMENT;
                case dunkl::RunStatus::assertion_failed: return DE_ERR_ASSERTION;
                case dunkl::RunStatus::infeasible: return DE_ERR_INFEASIBLE;
                case dunkl::RunStatus::capability: return DE_ERR_CAPABILITY;
                default: return DE_ERR_INTERNAL;
            }
        }
        *out_json = dup_string(res.json);
        if (out_csv) *out_csv = dup_string(res.csv);
        return DE_OK;
    });
}

} // extern "C"
