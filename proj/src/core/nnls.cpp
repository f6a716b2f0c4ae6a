#include "core/nnls.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dunkl {

namespace {

// Cholesky factor of the passive-set Gram matrix, grown one column at a time.
class GrowingCholesky {
public:
    explicit GrowingCholesky(std::size_t cap) : cap_(cap), L_(cap * cap, 0.0) {}

    std::size_t size() const { return n_; }

    // append a column with Gram entries g (length n_) and diagonal gjj;
    // returns false if the pivot collapses (dependent column)
    bool append(const std::vector<double>& g, double gjj) {
        std::vector<double> v(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            double s = g[i];
            for (std::size_t k = 0; k < i; ++k) s -= L_[i * cap_ + k] * v[k];
            v[i] = s / L_[i * cap_ + i];
        }
        double d = gjj;
        for (std::size_t k = 0; k < n_; ++k) d -= v[k] * v[k];
        if (!(d > 1e-12 * gjj)) return false;
        for (std::size_t k = 0; k < n_; ++k) L_[n_ * cap_ + k] = v[k];
        L_[n_ * cap_ + n_] = std::sqrt(d);
        ++n_;
        return true;
    }

    void clear() { n_ = 0; }

    // solve (L L^T) z = rhs
    void solve(const std::vector<double>& rhs, std::vector<double>& z) const {
        z.assign(n_, 0.0);
        for (std::size_t i = 0; i < n_; ++i) {
            double s = rhs[i];
            for (std::size_t k = 0; k < i; ++k) s -= L_[i * cap_ + k] * z[k];
            z[i] = s / L_[i * cap_ + i];
        }
        for (std::size_t ii = n_; ii-- > 0;) {
            double s = z[ii];
            for (std::size_t k = ii + 1; k < n_; ++k) s -= L_[k * cap_ + ii] * z[k];
            z[ii] = s / L_[ii * cap_ + ii];
        }
    }

private:
    std::size_t cap_;
    std::size_t n_ = 0;
    std::vector<double> L_;
};

} // namespace

NnlsResult nnls_solve(const std::vector<double>& A, std::size_t rows, std::size_t cols,
                      const std::vector<double>& b, int max_outer) {
    if (A.size() != rows * cols) throw std::invalid_argument("nnls_solve: bad matrix size");
    if (b.size() != rows) throw std::invalid_argument("nnls_solve: bad rhs size");
    if (max_outer <= 0) max_outer = static_cast<int>(12 * rows + 64);

    std::vector<double> scale(cols, 0.0);
    for (std::size_t c = 0; c < cols; ++c) {
        double s = 0.0;
        const double* col = &A[c * rows];
        for (std::size_t r = 0; r < rows; ++r) s += col[r] * col[r];
        scale[c] = s > 0.0 ? 1.0 / std::sqrt(s) : 0.0;
    }

    double bnorm = 0.0;
    for (double v : b) bnorm += v * v;
    bnorm = std::sqrt(bnorm);
    const double grad_tol = 1e-12 * std::max(bnorm, 1.0);

    std::vector<double> x(cols, 0.0);       // scaled solution over passive set
    std::vector<double> resid = b;          // b - A_scaled x
    std::vector<int> passive;               // ordered passive column indices
    std::vector<char> in_passive(cols, 0);
    GrowingCholesky chol(rows + 1);
    std::vector<double> atb;                // A_P^T b for passive columns
    std::vector<double> gcol(rows + 1), z, xp;

    auto col_dot = [&](std::size_t c, const std::vector<double>& v) {
        const double* col = &A[c * rows];
        double s = 0.0;
        for (std::size_t r = 0; r < rows; ++r) s += col[r] * v[r];
        return s * scale[c];
    };

    auto rebuild = [&]() {
        chol.clear();
        atb.clear();
        for (std::size_t k = 0; k < passive.size(); ++k) {
            std::size_t cj = static_cast<std::size_t>(passive[k]);
            std::vector<double> g(k);
            for (std::size_t i = 0; i < k; ++i) {
                std::size_t ci = static_cast<std::size_t>(passive[i]);
                double s = 0.0;
                const double* a = &A[ci * rows];
                const double* c2 = &A[cj * rows];
                for (std::size_t r = 0; r < rows; ++r) s += a[r] * c2[r];
                g[i] = s * scale[ci] * scale[cj];
            }
            if (!chol.append(g, 1.0))
                throw std::runtime_error("nnls_solve: rank collapse during rebuild");
            atb.push_back(col_dot(cj, b));
        }
    };

    auto recompute_residual = [&]() {
        resid = b;
        for (std::size_t k = 0; k < passive.size(); ++k) {
            std::size_t c = static_cast<std::size_t>(passive[k]);
            double xv = x[c] * scale[c];
            const double* col = &A[c * rows];
            for (std::size_t r = 0; r < rows; ++r) resid[r] -= col[r] * xv;
        }
    };

    NnlsResult out;
    std::vector<char> banned(cols, 0);
    int outer = 0;
    while (outer++ < max_outer) {
        // gradient over active columns; smallest index wins ties
        double best = grad_tol;
        std::ptrdiff_t bestj = -1;
        for (std::size_t c = 0; c < cols; ++c) {
            if (in_passive[c] || banned[c] || scale[c] == 0.0) continue;
            double w = col_dot(c, resid);
            if (w > best) {
                best = w;
                bestj = static_cast<std::ptrdiff_t>(c);
            }
        }
        if (bestj < 0) break;

        std::size_t j = static_cast<std::size_t>(bestj);
        gcol.assign(passive.size(), 0.0);
        for (std::size_t i = 0; i < passive.size(); ++i) {
            std::size_t ci = static_cast<std::size_t>(passive[i]);
            double s = 0.0;
            const double* a = &A[ci * rows];
            const double* c2 = &A[j * rows];
            for (std::size_t r = 0; r < rows; ++r) s += a[r] * c2[r];
            gcol[i] = s * scale[ci] * scale[j];
        }
        if (!chol.append(gcol, 1.0)) {
            banned[j] = 1;
            continue;
        }
        passive.push_back(static_cast<int>(j));
        in_passive[j] = 1;
        atb.push_back(col_dot(j, b));
        std::fill(banned.begin(), banned.end(), 0);

        // inner loop: least squares over the passive set, stepping back to
        // the feasible boundary when components go nonpositive
        for (int inner = 0; inner < 4 * static_cast<int>(rows) + 16; ++inner) {
            chol.solve(atb, z);
            bool all_pos = true;
            for (double v : z)
                if (!(v > 0.0)) { all_pos = false; break; }
            if (all_pos) {
                for (std::size_t k = 0; k < passive.size(); ++k)
                    x[static_cast<std::size_t>(passive[k])] = z[k];
                break;
            }
            double alpha = 1.0;
            for (std::size_t k = 0; k < passive.size(); ++k) {
                double xk = x[static_cast<std::size_t>(passive[k])];
                if (z[k] <= 0.0) {
                    double a = xk / (xk - z[k]);
                    alpha = std::min(alpha, a);
                }
            }
            std::vector<int> keep;
            for (std::size_t k = 0; k < passive.size(); ++k) {
                std::size_t c = static_cast<std::size_t>(passive[k]);
                double nx = x[c] + alpha * (z[k] - x[c]);
                if (z[k] <= 0.0 && nx <= 1e-14) {
                    x[c] = 0.0;
                    in_passive[c] = 0;
                } else {
                    x[c] = std::max(nx, 0.0);
                    keep.push_back(passive[k]);
                }
            }
            if (keep.size() == passive.size()) {
                // numerical stall: drop the smallest component
                double mn = 1e300;
                std::size_t arg = 0;
                for (std::size_t k = 0; k < passive.size(); ++k)
                    if (x[static_cast<std::size_t>(passive[k])] < mn) {
                        mn = x[static_cast<std::size_t>(passive[k])];
                        arg = k;
                    }
                std::size_t c = static_cast<std::size_t>(passive[arg]);
                x[c] = 0.0;
                in_passive[c] = 0;
                keep = passive;
                keep.erase(keep.begin() + static_cast<std::ptrdiff_t>(arg));
            }
            passive = std::move(keep);
            rebuild();
        }
        recompute_residual();
    }

    out.x.assign(cols, 0.0);
    for (std::size_t c = 0; c < cols; ++c) out.x[c] = x[c] * scale[c];
    recompute_residual();
    out.residual_max = 0.0;
    double l2 = 0.0;
    for (double v : resid) {
        out.residual_max = std::max(out.residual_max, std::abs(v));
        l2 += v * v;
    }
    out.residual_l2 = std::sqrt(l2);
    out.iterations = outer;
    out.converged = outer < max_outer;
    return out;
}

} // namespace dunkl
