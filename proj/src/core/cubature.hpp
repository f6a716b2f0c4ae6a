#ifndef DUNKL_CUBATURE_HPP
#define DUNKL_CUBATURE_HPP

#include "core/geometry.hpp"
#include "core/weight.hpp"

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace dunkl {

// Raised when the weight solve cannot reach the requested residual.
class construction_error : public std::runtime_error {
public:
    construction_error(const std::string& msg, double residual)
        : std::runtime_error(msg), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_ = 0.0;
};

struct CubatureRule {
    int dim = 2;
    // support points after pruning zero weights; separation / covering /
    // seed document the source maximal set
    std::vector<Point> nodes;
    std::vector<double> weights; // positive, sum to 1 (normalized moments)
    int exact_degree = 0;
    double residual = 0.0;
    double separation = 0.0;
    double covering_radius = 0.0;
    std::uint64_t seed = 0;
    double delta = 0.0; // separation * degree
    std::array<double, 2> weight_model_bracket{0.0, 0.0};
};

// Moments (1/a) int b_j h^2 dsigma of the spanning set through `degree`.
std::vector<double> spanning_moments(const DunklWeight& w, int degree);

// Gram matrix of the spanning set under the weighted inner product,
// row-major (M x M); column 0 reproduces the moments.
std::vector<double> spanning_gram(const DunklWeight& w, int degree);

// Non-negative least squares fit of the node weights to the exact moments.
// Throws construction_error (carrying the reached residual) when the max
// absolute moment error stays above tol.
CubatureRule solve_weights(const SeparatedSet& nodes, const DunklWeight& w, int degree,
                           double tol);

// Builds the maximal delta/degree-separated node set and solves; halves
// delta up to max_retries times on infeasibility.
CubatureRule solve_with_retry(const DunklWeight& w, int degree, double delta, double tol,
                              std::uint64_t seed, int max_retries = 3);

// Max over random band-limited f in Pi_degree of
// |sum lambda f - integral| / ||f||_2 (discrete 2-norm).
double exactness_check(const CubatureRule& rule, const DunklWeight& w, int degree, int trials,
                       std::uint64_t seed);

struct MzBracket {
    double p = 2.0;
    double lo = 0.0; // min discrete/continuous norm ratio over trials
    double hi = 0.0;
};

// Marcinkiewicz-Zygmund ratio bracket over random f in Pi_n; requires the
// rule exact on Pi_{3n}.
MzBracket mz_check(const CubatureRule& rule, const DunklWeight& w, int n, double p, int trials,
                   std::uint64_t seed);

inline double lemma31_ratio(const CubatureRule& rule, const DunklWeight& w, double beta, int n) {
    return lemma31_ratio(rule.weights, rule.dim, w.gamma_kappa(), beta, n);
}

} // namespace dunkl

#endif
