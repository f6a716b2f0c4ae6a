#ifndef DUNKL_WEIGHT_HPP
#define DUNKL_WEIGHT_HPP

#include "core/geometry.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace dunkl {

enum class GroupTag { Z2d, GeneralVerified };

struct RootSystem {
    int dim = 2;
    std::vector<Point> positive_roots;     // unit vectors
    std::vector<double> multiplicities;    // kappa_v >= 0, aligned with roots
    GroupTag tag = GroupTag::GeneralVerified;
};

// Reflection through the hyperplane orthogonal to v. Throws on zero v.
Point reflect(const Point& x, const Point& v);

// Normalizes roots, verifies closure (u sigma_v is +/- a root, tol 1e-10)
// and constancy of multiplicities on reflection orbits, tags Z2d when the
// roots are the coordinate axes.
RootSystem make_root_system(int dim, std::vector<Point> roots, std::vector<double> kappa);

// Z_2^d root system e_1..e_d with per-axis multiplicities.
RootSystem z2d_root_system(const std::vector<double>& kappa);

// Plain-text format: line 1 "d=<int>", then "root <d floats> kappa <float>".
RootSystem parse_root_system(const std::string& text);
std::string format_root_system(const RootSystem& rs);

class DunklWeight {
public:
    explicit DunklWeight(RootSystem rs, int norm_level = 2);
    static DunklWeight z2d(const std::vector<double>& kappa);

    const RootSystem& roots() const { return rs_; }
    int dim() const { return rs_.dim; }
    double gamma_kappa() const { return gamma_; }
    double lambda_kappa() const { return lambda_; }
    double norm_const() const { return norm_const_; } // a_d^kappa
    bool is_z2d() const { return rs_.tag == GroupTag::Z2d; }
    bool is_unweighted() const { return gamma_ == 0.0; }
    // per-axis multiplicities (Z2d only)
    const std::vector<double>& z2d_kappa() const;

    double eval(const Point& x) const; // h_kappa^2(x)

    // zero sets of the weight, used to split quadrature panels
    std::vector<double> split_angles_d2() const;
    std::vector<double> split_t_d3() const;
    std::vector<double> split_phi_d3() const;

private:
    RootSystem rs_;
    double gamma_ = 0.0;
    double lambda_ = 0.0;
    double norm_const_ = 1.0;
    std::vector<double> axis_kappa_;
};

struct SphereGrid {
    std::vector<Point> points;
    std::vector<double> weights; // h^2 / a_d^kappa folded in; sums to ~1
};

// Quadrature grid on S^1 resolving integrands (trig poly of degree
// max_product_degree) * h^2; panels split at the weight zeros with
// geometric grading into the cusps.
SphereGrid weighted_circle_grid(const DunklWeight& w, int max_product_degree);

// Integral of h^2 over a cap against the normalized surface measure
// (not divided by a_d^kappa). Closed forms when kappa = 0.
double cap_measure(const DunklWeight& w, const Cap& cap, int level = 0);

// Doubling cap model: n^{-(d-1)} prod (|<x,v>| + 1/n)^{2 kappa_v}.
double cap_measure_model(const DunklWeight& w, const Point& x, int n);

// Local cap average: w_n(x) = n^{d-1} * integral of h^2 over c(x, 1/n).
double w_n_approx(const DunklWeight& w, const Point& x, int n, int level = 0);

struct DoublingSample {
    Point center;
    double radius = 0.0;
    int depth = 0;    // m
    double ratio = 0.0; // w(2^m B) / w(B)
};

struct DoublingReport {
    double estimated_s_w = 0.0;   // max over samples of log2(ratio)/m
    double doubling_L = 0.0;      // max single-doubling ratio
    double comparability_C = 0.0; // constant of the shifted-center comparability check
    std::vector<DoublingSample> samples;
};

std::vector<Cap> default_doubling_grid(int dim, std::uint64_t seed, int n_centers = 12);

DoublingReport doubling_diagnostics(const DunklWeight& w, const std::vector<Cap>& grid,
                                    int max_depth = 3, int level = 0);

// Weighted node-sum diagnostic: sum lambda^{-beta} / n^{(d-1)(1+beta)}.
// beta must lie in (0, 1/(2 gamma)) when gamma > 0, beta > 0 otherwise.
double lemma31_ratio(const std::vector<double>& cubature_weights, int dim, double gamma_kappa,
                     double beta, int n);

} // namespace dunkl

#endif
