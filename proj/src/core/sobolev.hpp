#ifndef DUNKL_SOBOLEV_HPP
#define DUNKL_SOBOLEV_HPP

#include "core/geometry.hpp"
#include "core/harmonics.hpp"
#include "core/weight.hpp"

#include <cstdint>
#include <vector>

namespace dunkl {

struct PipelineConfig {
    DunklWeight weight;
    double r = 2.0;
    double p = 2.0;
    double q = 2.0;
    double rho = 0.1;
    double beta = 0.0; // 0 -> default: 0.95/(2 gamma) for weighted, 0.95 otherwise
    std::vector<int> n_grid;
};

double default_beta(const DunklWeight& w);

// Checks the smoothness threshold and the allocation-slack condition;
// throws std::invalid_argument naming the violated constraint.
void validate_pipeline_config(const PipelineConfig& cfg);

struct ScheduleBlock {
    int k = 1;          // 1-based block index
    double log2_m = 0;  // block size, log2
    long long m = 0;    // exact block size when it fits, else -1
    long long n = 0;    // sub-budget n_{s,k}
};

struct ScheduleRow {
    int s = 0;
    long long n_s = 0;
    double log2_lambda = 0.0; // log2 #Lambda_s^d
    int J1 = 0;               // secondary split (rows with s > J)
    double clamp_scale = 1.0; // down-scale applied to keep sum n_{s,k} <= n_s
    std::vector<ScheduleBlock> blocks;
};

struct AllocationSchedule {
    long long n = 0;
    int J = 0;
    int J0 = 0;
    double rho = 0.1;
    double fill = 1.0; // common budget-exhausting factor applied to n_{s,k}
    long long budget_used = 0;
    std::vector<ScheduleRow> rows;
};

AllocationSchedule allocate(long long n, const PipelineConfig& cfg);

// Multiscale numeric upper bound (unit entropy constants), with the
// closed-form geometric tail beyond the truncation included.
double upper_bound_value(long long n, const PipelineConfig& cfg);

struct BumpSystem {
    int dim = 2;
    int l = 4;
    double eps_strip = 0.0;  // epsilon_{d,m}
    double margin = 0.0;     // center-to-strip clearance actually enforced
    double cap_radius = 0.0; // 1/l
    std::vector<Point> centers;
    std::uint64_t seed = 0;
};

// measure of one strip {x : |pi/2 - d(x,v)| <= width}
double strip_measure(int dim, double width);

// Disjoint bump supports avoiding the root-hyperplane strips. Throws
// std::runtime_error when fewer than min_centers fit.
BumpSystem build_bump_system(const DunklWeight& w, int l, std::uint64_t seed,
                             double eps_strip = 0.0, int min_centers = 0);

// orbit of x under the reflections with positive multiplicity
std::vector<Point> reflection_orbit(const DunklWeight& w, const Point& x);

struct BumpNormReport {
    double ratio_lo = 0.0;   // ||f_a||_p / (l^{-(d-1)/p} ||a||_p), min over trials
    double ratio_hi = 0.0;
    double center_ratio_lo = 0.0; // per-center profile norms, extremes
    double center_ratio_hi = 0.0;
    double strip_measure_total = 0.0;
    int group_order = 1;
    int max_overlap = 0;      // orbit-cap overlap count, must stay <= group_order
    double leakage_rel = 0.0; // |Delta phi| outside the orbit / sup inside
    double trunc_tail_rel = 0.0;
    double embed_K = 0.0;     // max ||(-Delta)^{r/2} f_a||_p / (l^r ||f_a||_p)
};

BumpNormReport verify_bump_norms(const BumpSystem& sys, const DunklWeight& w, double r, double p,
                                 int trials, std::uint64_t seed, int trunc_degree = 0);

struct LowerBoundResult {
    double value = 0.0;
    double factor = 0.0; // measured embedding factor folded into value
    int l = 0;
    int N = 0;
    double embed_K = 0.0;
    double up_hi = 0.0;
    double lq_lo = 0.0;
    double ball_lower = 0.0; // e_n(B_p^N, l_q^N) lower bound
};

LowerBoundResult lower_bound_value(int n, const PipelineConfig& cfg, std::uint64_t seed);

struct RateReport {
    std::vector<long long> n_grid;
    std::vector<double> values;
    double slope = 0.0;
    double intercept = 0.0;
    double target_exponent = 0.0;
    double max_residual = 0.0;
};

RateReport rate_regression(const std::vector<long long>& ns, const std::vector<double>& values,
                           double target_exponent);

} // namespace dunkl

#endif
