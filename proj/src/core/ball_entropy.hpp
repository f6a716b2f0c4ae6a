#ifndef DUNKL_BALL_ENTROPY_HPP
#define DUNKL_BALL_ENTROPY_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace dunkl {

// weighted p-norm; p = inf ignores the weights (max |x_i|)
double weighted_norm(const std::vector<double>& x, const std::vector<double>& w, double p);

struct IsometryResult {
    std::vector<double> v;  // v_i = w_i^(1 - p/q)
    std::vector<double> ux; // (Ux)_i = x_i w_i^(1/q)
};
// Weight-cancelling isometry: ||Ux||_{p,v} = ||x||_{p,w} and ||Ux||_q = ||x||_{q,w}.
IsometryResult isometry_U(const std::vector<double>& x, const std::vector<double>& w, double p,
                          double q);

struct SortedWeightBound {
    bool hypothesis_holds = false; // sum w_j^-gamma <= m
    bool bound_holds = false;      // w_j^-1 <= (m/j)^(1/gamma) after ascending sort
    double worst_margin = 0.0;     // max_j w_j^-1 / (m/j)^(1/gamma)
};
SortedWeightBound sorted_weight_bound(std::vector<double> w, double gamma);

struct BallSpec {
    int m = 1;
    double p = 1.0;
    double q = 2.0;
    std::vector<double> weights; // empty = uniform
};

struct DyadicBlock {
    int index = 1;  // k, 1-based
    int offset = 0; // first coordinate of the block in the sorted order
    int size = 0;   // m_k
    double scale = 1.0; // (m / 2^(k-1))^((1/gamma)(1/p - 1/q))
    int sub_budget = 0; // n_k
};

struct DyadicReduction {
    bool hypothesis_holds = false;
    std::vector<DyadicBlock> blocks;
    std::vector<double> sorted_weights; // ascending
};

// Dyadic block decomposition of the sorted weighted ball, with
// proportional sub-budgets.
DyadicReduction dyadic_reduce(const BallSpec& spec, double gamma, int k_budget);

// Three-regime closed form for e_k(B l_p^m, l_q^m), equivalence constant
// set to 1; base-2 logs.
double schuett_value(int k, int m, double p, double q);

// Closed-form three-regime bound for the weighted ball under a single
// index budget.
double remark37_bound(int n, int m, double p, double q, double gamma);

enum class LowerMethod { packing, volume };
enum class UpperMethod { net, lattice, schuett_construction };

struct UpperCertificate {
    UpperMethod method = UpperMethod::net;
    double radius = 0.0;
    double log2_count = 0.0; // certified upper bound on the center count
    double step = 0.0;       // lattice / quantization step (u-space)
    int sparsity = 0;        // schuett construction: kept coordinates
    double sample_slack = 0.0;
    std::vector<std::vector<double>> centers; // net method only
};

struct LowerCertificate {
    LowerMethod method = LowerMethod::volume;
    double value = 0.0;
    int points = 0;             // packing cardinality
    double min_pair_dist = 0.0; // packing separation in the target norm
    std::vector<std::vector<double>> packing;
};

UpperCertificate entropy_upper(const BallSpec& spec, int k, std::uint64_t seed);
LowerCertificate entropy_lower(const BallSpec& spec, int k, std::uint64_t seed);

struct EntropyBracket {
    int k = 0;
    double lower = 0.0;
    double upper = 0.0;
    LowerMethod lower_method = LowerMethod::volume;
    UpperMethod upper_method = UpperMethod::net;
    UpperCertificate upper_cert;
    LowerCertificate lower_cert;
};

EntropyBracket entropy_bracket(const BallSpec& spec, int k, std::uint64_t seed);

// log-volume of the unit ball of l_p^m
double log_ball_volume(int m, double p);

} // namespace dunkl

#endif
