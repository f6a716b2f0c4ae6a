/* C API for the dunkl_entropy shared library.
 *
 * All functions return a de_status; outputs are written through pointers.
 * Objects are opaque handles released with the matching *_free call, and
 * strings returned by the library are released with de_string_free.
 * de_last_error() describes the most recent failure on this thread.
 */
#ifndef DUNKL_ENTROPY_H
#define DUNKL_ENTROPY_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum de_status {
    DE_OK = 0,
    DE_ERR_INVALID_ARGUMENT = 1,
    DE_ERR_ASSERTION = 2,
    DE_ERR_INFEASIBLE = 3,
    DE_ERR_CAPABILITY = 4,
    DE_ERR_INTERNAL = 5
} de_status;

const char* de_version(void);
const char* de_last_error(void);
void de_string_free(char* s);

/* ---- Dunkl weights -------------------------------------------------- */

typedef struct de_weight de_weight;

/* Z_2^d weight from per-axis multiplicities; d = len in {2, 3}. */
de_status de_weight_create_z2d(int d, const double* kappa, de_weight** out);
/* Plain-text root system: "d=<int>" then "root <d floats> kappa <float>". */
de_status de_weight_create_from_text(const char* text, de_weight** out);
void de_weight_free(de_weight* w);

de_status de_weight_dim(const de_weight* w, int* out);
de_status de_weight_gamma(const de_weight* w, double* out);
de_status de_weight_lambda(const de_weight* w, double* out);
de_status de_weight_norm_const(const de_weight* w, double* out);
/* h_kappa^2 at a point x (length d). */
de_status de_weight_eval(const de_weight* w, const double* x, double* out);
/* integral of h^2 over the cap of given center and radius */
de_status de_weight_cap_measure(const de_weight* w, const double* center, double radius,
                                double* out);

/* ---- positive cubature ---------------------------------------------- */

typedef struct de_rule de_rule;

/* Builds the maximal delta/degree-separated node set and solves the
 * moment-matched positive weights (residual <= tol or DE_ERR_INFEASIBLE). */
de_status de_rule_solve(const de_weight* w, int degree, double delta, double tol, uint64_t seed,
                        de_rule** out);
void de_rule_free(de_rule* r);

de_status de_rule_size(const de_rule* r, int* num_nodes);
de_status de_rule_info(const de_rule* r, int* exact_degree, double* residual, double* separation);
/* coords: num_nodes * d doubles; weights: num_nodes doubles */
de_status de_rule_nodes(const de_rule* r, double* coords, double* weights);
de_status de_rule_to_json(const de_rule* r, char** out_json);

/* ---- finite-dimensional ball entropy -------------------------------- */

/* Schuett's three-regime value for e_k(B l_p^m, l_q^m); p, q in [1, inf]
 * are passed as doubles (HUGE_VAL for infinity). */
de_status de_schuett_value(int k, int m, double p, double q, double* out);

/* certified bracket: lower <= e_k <= upper */
de_status de_entropy_bracket(int m, double p, double q, int k, uint64_t seed, double* lower,
                             double* upper);

/* ---- command engine -------------------------------------------------- */

/* Runs one CLI-level command against a JSON config. out_json receives the
 * result document; out_csv (optional, may be NULL) receives the CSV trace.
 * A non-OK status maps onto the CLI exit codes. */
de_status de_run(const char* command, const char* config_json, uint64_t seed, int has_seed,
                 int want_csv, char** out_json, char** out_csv);

#ifdef __cplusplus
}
#endif

#endif /* DUNKL_ENTROPY_H */
