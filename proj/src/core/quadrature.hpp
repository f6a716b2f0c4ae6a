#ifndef DUNKL_QUADRATURE_HPP
#define DUNKL_QUADRATURE_HPP

#include <functional>
#include <vector>

namespace dunkl {

struct Quad1D {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Gauss-Legendre rule on [-1, 1], n nodes (cached internally).
const Quad1D& gauss_legendre(int n);

// Gauss-Jacobi rule for the weight (1-t)^alpha (1+t)^beta on [-1, 1].
// Requires alpha, beta > -1.
Quad1D gauss_jacobi(int n, double alpha, double beta);

// P_m^{(alpha,beta)}(t) for m = 0..mmax by the three-term recurrence.
void jacobi_poly_all(int mmax, double alpha, double beta, double t, std::vector<double>& out);

// Integral of f over [a, b], single Gauss-Legendre panel.
double integrate_panel(const std::function<double(double)>& f, double a, double b, int order);

// Integral of f over [a, b] with geometric grading toward singular
// endpoints (bounded algebraic cusps). `levels` controls the grading depth.
double integrate_graded(const std::function<double(double)>& f, double a, double b,
                        bool singular_a, bool singular_b, int levels = 36, int order = 12);

// Nodes/weights of the graded subdivision, for building reusable grids.
Quad1D graded_panels(double a, double b, bool singular_a, bool singular_b,
                     int levels = 36, int order = 12);

} // namespace dunkl

#endif
