#include "core/quadrature.hpp"

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace dunkl {

namespace {

Quad1D compute_gauss_legendre(int n) {
    // Newton iteration on the Legendre recurrence, nodes in (-1, 1).
    Quad1D q;
    q.nodes.resize(n);
    q.weights.resize(n);
    const double pi = 3.14159265358979323846;
    for (int i = 0; i < n; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int k = 0; k < n; ++k) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * k + 1.0) * x * p1 - k * p2) / (k + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        q.nodes[n - 1 - i] = x;
        q.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * pp * pp);
    }
    return q;
}

} // namespace

const Quad1D& gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
    static std::map<int, Quad1D> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, compute_gauss_legendre(n)).first;
    return it->second;
}

Quad1D gauss_jacobi(int n, double alpha, double beta) {
    if (n < 1) throw std::invalid_argument("gauss_jacobi: n must be >= 1");
    if (alpha <= -1.0 || beta <= -1.0)
        throw std::domain_error("gauss_jacobi: alpha, beta must exceed -1");

    // Golub-Welsch on the symmetric tridiagonal recurrence matrix.
    Eigen::VectorXd diag(n), sub(n > 1 ? n - 1 : 1);
    const double ab = alpha + beta;
    diag[0] = (beta - alpha) / (ab + 2.0);
    for (int k = 1; k < n; ++k) {
        double t = 2.0 * k + ab;
        diag[k] = (beta * beta - alpha * alpha) / (t * (t + 2.0));
    }
    for (int k = 1; k < n; ++k) {
        double b2;
        if (k == 1) {
            b2 = 4.0 * (1.0 + alpha) * (1.0 + beta) /
                 ((2.0 + ab) * (2.0 + ab) * (3.0 + ab));
        } else {
            double t = 2.0 * k + ab;
            b2 = 4.0 * k * (k + alpha) * (k + beta) * (k + ab) /
                 (t * t * (t + 1.0) * (t - 1.0));
        }
        sub[k - 1] = std::sqrt(b2);
    }

    double mu0 = std::exp((ab + 1.0) * std::log(2.0) + std::lgamma(alpha + 1.0) +
                          std::lgamma(beta + 1.0) - std::lgamma(ab + 2.0));

    Quad1D q;
    q.nodes.resize(n);
    q.weights.resize(n);
    if (n == 1) {
        q.nodes[0] = diag[0];
        q.weights[0] = mu0;
        return q;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub.head(n - 1), Eigen::ComputeEigenvectors);
    for (int i = 0; i < n; ++i) {
        q.nodes[i] = es.eigenvalues()[i];
        double v = es.eigenvectors()(0, i);
        q.weights[i] = mu0 * v * v;
    }
    return q;
}

void jacobi_poly_all(int mmax, double alpha, double beta, double t, std::vector<double>& out) {
    out.assign(static_cast<std::size_t>(mmax) + 1, 0.0);
    if (mmax < 0) return;
    out[0] = 1.0;
    if (mmax == 0) return;
    out[1] = (alpha + 1.0) + (alpha + beta + 2.0) * 0.5 * (t - 1.0);
    for (int m = 2; m <= mmax; ++m) {
        double a2 = 2.0 * m + alpha + beta;
        double c1 = 2.0 * m * (m + alpha + beta) * (a2 - 2.0);
        double c2 = (a2 - 1.0) * (a2 * (a2 - 2.0) * t + alpha * alpha - beta * beta);
        double c3 = 2.0 * (m + alpha - 1.0) * (m + beta - 1.0) * a2;
        out[static_cast<std::size_t>(m)] =
            (c2 * out[static_cast<std::size_t>(m) - 1] - c3 * out[static_cast<std::size_t>(m) - 2]) / c1;
    }
}

double integrate_panel(const std::function<double(double)>& f, double a, double b, int order) {
    const Quad1D& gl = gauss_legendre(order);
    double c = 0.5 * (b - a), m = 0.5 * (a + b);
    double s = 0.0;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i)
        s += gl.weights[i] * f(m + c * gl.nodes[i]);
    return s * c;
}

Quad1D graded_panels(double a, double b, bool singular_a, bool singular_b,
                     int levels, int order) {
    Quad1D out;
    const Quad1D& gl = gauss_legendre(order);
    auto add_segment = [&](double lo, double hi) {
        double c = 0.5 * (hi - lo), m = 0.5 * (lo + hi);
        for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
            out.nodes.push_back(m + c * gl.nodes[i]);
            out.weights.push_back(c * gl.weights[i]);
        }
    };
    auto add_graded = [&](double lo, double hi, bool toward_lo) {
        // geometric refinement toward one endpoint; the innermost segment is
        // kept whole (integrand bounded, contribution ~ width)
        double len = hi - lo;
        double t = 1.0;
        for (int j = 0; j < levels; ++j) {
            double t2 = t * 0.5;
            if (toward_lo) add_segment(lo + len * t2, lo + len * t);
            else add_segment(hi - len * t, hi - len * t2);
            t = t2;
        }
        if (toward_lo) add_segment(lo, lo + len * t);
        else add_segment(hi - len * t, hi);
    };

    if (!singular_a && !singular_b) {
        add_segment(a, b);
    } else if (singular_a && singular_b) {
        double m = 0.5 * (a + b);
        add_graded(a, m, true);
        add_graded(m, b, false);
    } else if (singular_a) {
        add_graded(a, b, true);
    } else {
        add_graded(a, b, false);
    }
    return out;
}

double integrate_graded(const std::function<double(double)>& f, double a, double b,
                        bool singular_a, bool singular_b, int levels, int order) {
    Quad1D q = graded_panels(a, b, singular_a, singular_b, levels, order);
    double s = 0.0;
    for (std::size_t i = 0; i < q.nodes.size(); ++i) s += q.weights[i] * f(q.nodes[i]);
    return s;
}

} // namespace dunkl
