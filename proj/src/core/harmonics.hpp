#ifndef DUNKL_HARMONICS_HPP
#define DUNKL_HARMONICS_HPP

#include "core/geometry.hpp"
#include "core/weight.hpp"

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace dunkl {

// Raised when an operation needs the Z_2^d (or unweighted) kernel machinery
// but the weight belongs to a general reflection group.
class capability_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Gegenbauer polynomial C_n^lambda(t) by three-term recurrence; lambda > 0.
double gegenbauer(int n, double lambda, double t);
double gegenbauer_at_one(int n, double lambda);

// C^infinity cutoff: 1 on [0,1], 0 on [2,inf), symmetric exp blend between.
double eta_cutoff(double t);

// Bump profile phi(u) = eta(2u): 1 on [0,1/2], supported in [0,1].
double bump_profile(double u);

// Reproducing kernel P_n(h_kappa^2; x, y). Closed form for kappa = 0,
// product Gauss-Jacobi for Z_2^d (quad_points = 0 picks 2*ceil(n/2)+8).
double kernel_P(const DunklWeight& w, int n, const Point& x, const Point& y, int quad_points = 0);

// L_{n,eta}(x, y) = sum_{k < 2n} eta(k/n) P_k(h^2; x, y).
double kernel_L(const DunklWeight& w, int n, const Point& x, const Point& y, int quad_points = 0);

// Unweighted spanning set of Pi_n restricted to the sphere, in degree order:
// trigonometric monomials (d = 2) or real spherical harmonics (d = 3),
// orthonormal under the normalized unweighted measure.
int spanning_basis_size(int dim, int degree);
int spanning_block_begin(int dim, int degree);
int spanning_degree_of(int dim, int j);
std::vector<double> spanning_basis_eval(int dim, int degree, const Point& x);

struct Expansion {
    int max_degree = 0;
    std::vector<double> coeffs; // in the analyzer's orthonormal basis
};

// Orthonormal h-harmonic machinery up to a fixed degree.
//   d = 2: Gram/Cholesky orthonormalization of trigonometric monomials
//          under the weighted inner product (any Z_2^2 / general d=2 weight);
//   d = 3: real spherical harmonics (kappa = 0 only).
// All inner products use the measure h^2 dsigma / a_d^kappa.
class HarmonicAnalyzer {
public:
    HarmonicAnalyzer(DunklWeight w, int max_degree);

    const DunklWeight& weight() const { return weight_; }
    int dim() const { return weight_.dim(); }
    int max_degree() const { return max_degree_; }
    int basis_size() const { return static_cast<int>(block_begin_.back()); }
    int block_begin(int k) const { return block_begin_[static_cast<std::size_t>(k)]; }
    int block_end(int k) const { return block_begin_[static_cast<std::size_t>(k) + 1]; }
    int degree_of(int j) const { return degree_of_[static_cast<std::size_t>(j)]; }

    double eval_basis(int j, const Point& x) const; // e_j(x)

    Expansion expand(const ScalarField& f) const;
    Expansion from_coeffs(std::vector<double> coeffs) const;
    Expansion random_bandlimited(int degree, std::uint64_t seed,
                                 const std::vector<double>& degree_scale = {}) const;

    double eval(const Expansion& e, const Point& x) const;

    Expansion project(const Expansion& e, int k) const; // proj_k
    Expansion eta_n(const Expansion& e, int n) const;
    Expansion eta_n_apply(const ScalarField& f, int n) const;
    Expansion dyadic_block(const Expansion& e, int s) const; // A_s
    Expansion frac_laplacian(const Expansion& e, double r) const;

    double block_norm2(const Expansion& e, int k) const; // l2 norm of block k
    double norm2(const Expansion& e) const;              // Parseval
    double norm(const Expansion& e, double p) const;     // grid quadrature / sup
    double norm(const ScalarField& f, double p) const;

    // coefficients over the raw spanning set (trig / spherical harmonics);
    // evaluation through them is O(basis) per point
    std::vector<double> to_raw_coeffs(const Expansion& e) const;
    double eval_raw(const std::vector<double>& raw, const Point& x) const;

    // P_n from the orthonormal basis; independent route against kernel_P.
    double kernel_from_basis(int n, const Point& x, const Point& y) const;

    struct ApproxBracket {
        double lower = 0.0;
        double upper = 0.0;
    };
    // E_n(f)_{p,kappa}: exact tail for p = 2, eta upper / duality lower
    // bracket for p in {1, inf}.
    ApproxBracket best_approx_error(const Expansion& e, int n, double p) const;

    const std::vector<Point>& grid_points() const { return grid_pts_; }
    const std::vector<double>& grid_weights() const { return grid_w_; } // with h^2/a folded in

private:
    void build_grid();
    void build_basis();
    std::vector<double> raw_basis_at(const Point& x) const;
    std::vector<double> basis_at(const Point& x) const; // all e_j at x
    std::vector<double> synth_values(const Expansion& e) const;

    DunklWeight weight_;
    int max_degree_;
    std::vector<int> block_begin_;
    std::vector<int> degree_of_;
    std::vector<Point> grid_pts_;
    std::vector<double> grid_w_;
    // general d=2 weights: ONB coefficients over trig monomials (row j = e_j)
    std::vector<std::vector<double>> onb_;
    bool identity_onb_ = false;
    // Z_2^2 weights: closed-form Jacobi (generalized Gegenbauer) basis
    bool jacobi_basis_ = false;
    std::vector<double> jacobi_nrm_; // per basis index
};

// Simple field constructors used by tests and the CLI corpus.
ScalarField constant_field(double value);
ScalarField coordinate_monomial_field(const std::vector<int>& exponents);
ScalarField cap_indicator_field(const Point& center, double radius);
ScalarField bump_field(const Point& center, double scale);

} // namespace dunkl

#endif
