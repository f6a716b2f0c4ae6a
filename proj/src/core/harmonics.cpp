#include "core/harmonics.hpp"

#include "core/quadrature.hpp"
#include "core/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dunkl {

double gegenbauer(int n, double lambda, double t) {
    if (n < 0) throw std::invalid_argument("gegenbauer: n must be >= 0");
    if (!(lambda > 0.0)) throw std::domain_error("gegenbauer: lambda must be positive");
    if (n == 0) return 1.0;
    double c0 = 1.0, c1 = 2.0 * lambda * t;
    for (int k = 2; k <= n; ++k) {
        double c2 = (2.0 * t * (k + lambda - 1.0) * c1 - (k + 2.0 * lambda - 2.0) * c0) / k;
        c0 = c1;
        c1 = c2;
    }
    return c1;
}

double gegenbauer_at_one(int n, double lambda) {
    // C_n^lambda(1) = binomial(n + 2 lambda - 1, n)
    return std::exp(std::lgamma(n + 2.0 * lambda) - std::lgamma(2.0 * lambda) -
                    std::lgamma(n + 1.0));
}

namespace {
double smooth_step(double u) {
    // g(u)/(g(u)+g(1-u)) with g(u) = exp(-1/u) for u > 0
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    double a = std::exp(-1.0 / u);
    double b = std::exp(-1.0 / (1.0 - u));
    return a / (a + b);
}
} // namespace

double eta_cutoff(double t) {
    if (t <= 1.0) return 1.0;
    if (t >= 2.0) return 0.0;
    return smooth_step(2.0 - t);
}

double bump_profile(double u) { return eta_cutoff(2.0 * u); }

namespace {

double chebyshev_cos(int n, double t) {
    // cos(n theta) with t = cos(theta)
    double c0 = 1.0, c1 = t;
    if (n == 0) return 1.0;
    if (n == 1) return t;
    for (int k = 2; k <= n; ++k) {
        double c2 = 2.0 * t * c1 - c0;
        c0 = c1;
        c1 = c2;
    }
    return c1;
}

double jacobi_mass_const(double lambda) {
    // c_lambda = Gamma(lambda + 1/2) / (sqrt(pi) Gamma(lambda))
    return std::exp(std::lgamma(lambda + 0.5) - 0.5 * std::log(kPi) - std::lgamma(lambda));
}

} // namespace

double kernel_P(const DunklWeight& w, int n, const Point& x, const Point& y, int quad_points) {
    if (n < 0) throw std::invalid_argument("kernel_P: n must be >= 0");
    require_unit(x, "kernel_P");
    require_unit(y, "kernel_P");
    const int d = w.dim();
    if (w.is_unweighted()) {
        double t = std::clamp(dot(x, y), -1.0, 1.0);
        if (d == 2) return n == 0 ? 1.0 : 2.0 * chebyshev_cos(n, t);
        double lambda = 0.5 * (d - 2);
        return (n + lambda) / lambda * gegenbauer(n, lambda, t);
    }
    if (!w.is_z2d())
        throw capability_error("kernel_P: general reflection groups are not supported");

    const auto& kappa = w.z2d_kappa();
    double beta = 0.5 * (d - 2) + w.gamma_kappa();
    int m = quad_points > 0 ? quad_points : 2 * ((n + 1) / 2) + 8;

    std::vector<Quad1D> rules(static_cast<std::size_t>(d));
    std::vector<double> cmass(static_cast<std::size_t>(d), 1.0);
    for (int i = 0; i < d; ++i) {
        if (kappa[static_cast<std::size_t>(i)] > 0.0) {
            double a = kappa[static_cast<std::size_t>(i)] - 1.0;
            rules[static_cast<std::size_t>(i)] = gauss_jacobi(m, a, a);
            cmass[static_cast<std::size_t>(i)] = jacobi_mass_const(kappa[static_cast<std::size_t>(i)]);
        }
    }

    // tensor product over the axes; kappa_i = 0 collapses to t_i = 1
    double sum = 0.0;
    std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
    while (true) {
        double wgt = 1.0, arg = 0.0;
        for (int i = 0; i < d; ++i) {
            double xy = x[i] * y[i];
            if (kappa[static_cast<std::size_t>(i)] > 0.0) {
                const Quad1D& q = rules[static_cast<std::size_t>(i)];
                double t = q.nodes[idx[static_cast<std::size_t>(i)]];
                wgt *= q.weights[idx[static_cast<std::size_t>(i)]] * cmass[static_cast<std::size_t>(i)] * (1.0 + t);
                arg += xy * t;
            } else {
                arg += xy;
            }
        }
        sum += wgt * gegenbauer(n, beta, std::clamp(arg, -1.0, 1.0));
        int axis = 0;
        for (; axis < d; ++axis) {
            if (kappa[static_cast<std::size_t>(axis)] == 0.0) continue;
            if (++idx[static_cast<std::size_t>(axis)] < rules[static_cast<std::size_t>(axis)].nodes.size()) break;
            idx[static_cast<std::size_t>(axis)] = 0;
        }
        if (axis == d) break;
    }
    return (n + beta) / beta * sum;
}

double kernel_L(const DunklWeight& w, int n, const Point& x, const Point& y, int quad_points) {
    if (n < 1) throw std::invalid_argument("kernel_L: n must be >= 1");
    double total = 0.0;
    for (int k = 0; k < 2 * n; ++k) {
        double c = eta_cutoff(static_cast<double>(k) / n);
        if (c == 0.0) continue;
        total += c * kernel_P(w, k, x, y, quad_points);
    }
    return total;
}

// ---------------------------------------------------------------------------
// HarmonicAnalyzer
// ---------------------------------------------------------------------------

namespace {

// normalized associated Legendre P~_l^m = P_l^m sqrt((l-m)!/(l+m)!),
// no Condon-Shortley phase; fills values for l = m..lmax
void legendre_normalized(int lmax, int m, double ct, double st, std::vector<double>& out) {
    out.assign(static_cast<std::size_t>(lmax + 1), 0.0);
    if (m > lmax) return;
    double pmm = std::exp(0.5 * std::lgamma(2.0 * m + 1.0) - m * std::log(2.0) -
                          std::lgamma(m + 1.0));
    pmm *= std::pow(std::max(st, 0.0), m);
    out[static_cast<std::size_t>(m)] = pmm;
    if (m + 1 <= lmax) out[static_cast<std::size_t>(m) + 1] = ct * std::sqrt(2.0 * m + 1.0) * pmm;
    for (int l = m + 2; l <= lmax; ++l) {
        double a = (2.0 * l - 1.0) / std::sqrt(static_cast<double>(l - m) * (l + m));
        double b = std::sqrt((l + m - 1.0) * (l - m - 1.0) /
                             (static_cast<double>(l - m) * (l + m)));
        out[static_cast<std::size_t>(l)] =
            a * ct * out[static_cast<std::size_t>(l) - 1] - b * out[static_cast<std::size_t>(l) - 2];
    }
}

} // namespace

int spanning_basis_size(int dim, int degree) {
    if (dim == 2) return 2 * degree + 1;
    return (degree + 1) * (degree + 1);
}

int spanning_block_begin(int dim, int degree) {
    if (degree <= 0) return 0;
    if (dim == 2) return 2 * degree - 1;
    return degree * degree;
}

int spanning_degree_of(int dim, int j) {
    if (dim == 2) return (j + 1) / 2;
    return static_cast<int>(std::floor(std::sqrt(static_cast<double>(j) + 0.25)));
}

std::vector<double> spanning_basis_eval(int dim, int degree, const Point& x) {
    std::vector<double> vals(static_cast<std::size_t>(spanning_basis_size(dim, degree)), 0.0);
    if (dim == 2) {
        double theta = std::atan2(x[1], x[0]);
        vals[0] = 1.0;
        const double s2 = std::sqrt(2.0);
        for (int k = 1; k <= degree; ++k) {
            vals[static_cast<std::size_t>(2 * k - 1)] = s2 * std::cos(k * theta);
            vals[static_cast<std::size_t>(2 * k)] = s2 * std::sin(k * theta);
        }
        return vals;
    }
    const int K = degree;
    double ct = std::clamp(x[2], -1.0, 1.0);
    double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    double phi = std::atan2(x[1], x[0]);
    std::vector<double> leg;
    for (int m = 0; m <= K; ++m) {
        legendre_normalized(K, m, ct, st, leg);
        for (int l = std::max(1, m); l <= K; ++l) {
            double nrm = std::sqrt((2.0 * l + 1.0) * (m == 0 ? 1.0 : 2.0));
            double base = nrm * leg[static_cast<std::size_t>(l)];
            int off = spanning_block_begin(3, l);
            if (m == 0) {
                vals[static_cast<std::size_t>(off)] = base;
            } else {
                vals[static_cast<std::size_t>(off + 2 * m - 1)] = base * std::cos(m * phi);
                vals[static_cast<std::size_t>(off + 2 * m)] = base * std::sin(m * phi);
            }
        }
    }
    vals[0] = 1.0;
    return vals;
}

HarmonicAnalyzer::HarmonicAnalyzer(DunklWeight w, int max_degree)
    : weight_(std::move(w)), max_degree_(max_degree) {
    if (max_degree_ < 0) throw std::invalid_argument("HarmonicAnalyzer: negative degree");
    if (dim() == 3 && !weight_.is_unweighted())
        throw capability_error("HarmonicAnalyzer: weighted analysis is implemented for d = 2 only");
    if (dim() == 2 && !weight_.is_unweighted() && !weight_.is_z2d() &&
        weight_.roots().tag != GroupTag::GeneralVerified)
        throw capability_error("HarmonicAnalyzer: unsupported weight");

    block_begin_.resize(static_cast<std::size_t>(max_degree_) + 2, 0);
    if (dim() == 2) {
        for (int k = 0; k <= max_degree_; ++k)
            block_begin_[static_cast<std::size_t>(k) + 1] =
                block_begin_[static_cast<std::size_t>(k)] + (k == 0 ? 1 : 2);
    } else {
        for (int k = 0; k <= max_degree_; ++k)
            block_begin_[static_cast<std::size_t>(k) + 1] =
                block_begin_[static_cast<std::size_t>(k)] + (k == 0 ? 1 : 2 * k + 1);
    }
    degree_of_.resize(static_cast<std::size_t>(basis_size()));
    for (int k = 0; k <= max_degree_; ++k)
        for (int j = block_begin(k); j < block_end(k); ++j)
            degree_of_[static_cast<std::size_t>(j)] = k;

    build_grid();
    build_basis();
}

void HarmonicAnalyzer::build_grid() {
    // resolution beyond 2K keeps aliasing of non-band-limited inputs low
    const int K = max_degree_;
    if (dim() == 2) {
        SphereGrid g = weighted_circle_grid(weight_, 3 * K + 4);
        grid_pts_ = std::move(g.points);
        grid_w_ = std::move(g.weights);
        return;
    }
    // d = 3, kappa = 0: Gauss-Legendre x uniform azimuthal grid, exact for
    // polynomial products of degree <= 2K
    const Quad1D& glt = gauss_legendre((3 * K) / 2 + 2);
    int mphi = 3 * K + 5;
    for (std::size_t i = 0; i < glt.nodes.size(); ++i)
        for (int j = 0; j < mphi; ++j) {
            grid_pts_.push_back(from_spherical(glt.nodes[i], 2.0 * kPi * j / mphi));
            grid_w_.push_back(glt.weights[i] / (2.0 * mphi));
        }
}

std::vector<double> HarmonicAnalyzer::raw_basis_at(const Point& x) const {
    return spanning_basis_eval(dim(), max_degree_, x);
}

void HarmonicAnalyzer::build_basis() {
    const std::size_t M = static_cast<std::size_t>(basis_size());
    identity_onb_ = weight_.is_unweighted();
    if (identity_onb_) return;

    if (dim() == 2 && weight_.is_z2d()) {
        // closed-form h-harmonics on the circle: Jacobi polynomials in
        // cos(2 theta) with parity prefactors (generalized Gegenbauer);
        // exact and stable at any degree
        jacobi_basis_ = true;
        jacobi_nrm_.assign(M, 1.0);
        const double k1 = weight_.z2d_kappa()[0];
        const double k2 = weight_.z2d_kappa()[1];
        const double a0 = k2 - 0.5, b0 = k1 - 0.5;
        const double inv_pa = 1.0 / (kPi * weight_.norm_const());
        int mm = max_degree_ / 2 + 2;
        // family = (extra alpha, extra beta) from the squared prefactor
        const int fam_ea[4] = {0, 1, 0, 1};
        const int fam_eb[4] = {0, 1, 1, 0};
        std::vector<std::vector<double>> nrm(4);
        std::vector<double> pj;
        for (int f = 0; f < 4; ++f) {
            Quad1D q = gauss_jacobi(mm + 2, a0 + fam_ea[f], b0 + fam_eb[f]);
            double cst = std::exp2(-(k1 + k2 + fam_ea[f] + fam_eb[f])) * inv_pa;
            nrm[static_cast<std::size_t>(f)].assign(static_cast<std::size_t>(mm) + 1, 0.0);
            std::vector<std::vector<double>> table(q.nodes.size());
            for (std::size_t i = 0; i < q.nodes.size(); ++i)
                jacobi_poly_all(mm, a0 + fam_ea[f], b0 + fam_eb[f], q.nodes[i], table[i]);
            for (int m = 0; m <= mm; ++m) {
                double s = 0.0;
                for (std::size_t i = 0; i < q.nodes.size(); ++i)
                    s += q.weights[i] * table[i][static_cast<std::size_t>(m)] * table[i][static_cast<std::size_t>(m)];
                nrm[static_cast<std::size_t>(f)][static_cast<std::size_t>(m)] = 1.0 / std::sqrt(cst * s);
            }
        }
        for (int n = 0; n <= max_degree_; ++n) {
            int j = block_begin(n);
            if (n == 0) {
                jacobi_nrm_[static_cast<std::size_t>(j)] = nrm[0][0];
                continue;
            }
            if (n % 2 == 0) {
                int m = n / 2;
                jacobi_nrm_[static_cast<std::size_t>(j)] = nrm[0][static_cast<std::size_t>(m)];
                jacobi_nrm_[static_cast<std::size_t>(j) + 1] = nrm[1][static_cast<std::size_t>(m) - 1];
            } else {
                int m = (n - 1) / 2;
                jacobi_nrm_[static_cast<std::size_t>(j)] = nrm[2][static_cast<std::size_t>(m)];
                jacobi_nrm_[static_cast<std::size_t>(j) + 1] = nrm[3][static_cast<std::size_t>(m)];
            }
        }
        return;
    }

    // weighted trig moments E_j = <cos j.>, F_j = <sin j.> over the grid;
    // Gram entries follow from product-to-sum identities
    const int K = max_degree_;
    std::vector<double> E(static_cast<std::size_t>(2 * K + 1), 0.0);
    std::vector<double> F(static_cast<std::size_t>(2 * K + 1), 0.0);
    for (std::size_t q = 0; q < grid_pts_.size(); ++q) {
        double theta = std::atan2(grid_pts_[q][1], grid_pts_[q][0]);
        double wq = grid_w_[q];
        for (int j = 0; j <= 2 * K; ++j) {
            E[static_cast<std::size_t>(j)] += wq * std::cos(j * theta);
            F[static_cast<std::size_t>(j)] += wq * std::sin(j * theta);
        }
    }
    auto Ej = [&](int j) { return E[static_cast<std::size_t>(std::abs(j))]; };
    auto Fj = [&](int j) { return j >= 0 ? F[static_cast<std::size_t>(j)] : -F[static_cast<std::size_t>(-j)]; };
    auto freq = [](int i) { return (i + 1) / 2; };
    auto is_sin = [](int i) { return i > 0 && i % 2 == 0; };

    std::vector<double> G(M * M, 0.0);
    for (std::size_t i = 0; i < M; ++i) {
        int ki = freq(static_cast<int>(i));
        for (std::size_t j = i; j < M; ++j) {
            int kj = freq(static_cast<int>(j));
            double v;
            if (i == 0 && j == 0) v = Ej(0);
            else if (i == 0) v = std::sqrt(2.0) * (is_sin(static_cast<int>(j)) ? Fj(kj) : Ej(kj));
            else if (!is_sin(static_cast<int>(i)) && !is_sin(static_cast<int>(j)))
                v = Ej(ki - kj) + Ej(ki + kj);
            else if (is_sin(static_cast<int>(i)) && is_sin(static_cast<int>(j)))
                v = Ej(ki - kj) - Ej(ki + kj);
            else if (!is_sin(static_cast<int>(i)) && is_sin(static_cast<int>(j)))
                v = Fj(kj + ki) + Fj(kj - ki);
            else
                v = Fj(ki + kj) + Fj(ki - kj);
            G[i * M + j] = G[j * M + i] = v;
        }
    }

    // Cholesky G = L L^T
    std::vector<double> L(M * M, 0.0);
    for (std::size_t i = 0; i < M; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = G[i * M + j];
            for (std::size_t k = 0; k < j; ++k) s -= L[i * M + k] * L[j * M + k];
            if (i == j) {
                if (s <= 0.0) throw std::runtime_error("HarmonicAnalyzer: Gram matrix not positive");
                L[i * M + i] = std::sqrt(s);
            } else {
                L[i * M + j] = s / L[j * M + j];
            }
        }
    }

    // onb row j = row j of inv(L): e_j = sum_i onb[j][i] b_i
    onb_.assign(M, {});
    std::vector<double> col(M);
    for (std::size_t j = 0; j < M; ++j) onb_[j].assign(j + 1, 0.0);
    for (std::size_t j = 0; j < M; ++j) {
        std::fill(col.begin(), col.end(), 0.0);
        col[j] = 1.0;
        for (std::size_t i = j; i < M; ++i) {
            double s = col[i];
            for (std::size_t k = j; k < i; ++k) s -= L[i * M + k] * col[k];
            col[i] = s / L[i * M + i];
        }
        for (std::size_t i = j; i < M; ++i) onb_[i][j] = col[i];
    }
}

std::vector<double> HarmonicAnalyzer::basis_at(const Point& x) const {
    if (identity_onb_) return raw_basis_at(x);
    const std::size_t M = static_cast<std::size_t>(basis_size());
    std::vector<double> out(M, 0.0);
    if (jacobi_basis_) {
        double theta = std::atan2(x[1], x[0]);
        double c = std::cos(theta), s = std::sin(theta);
        double u = c * c - s * s;
        const double k1 = weight_.z2d_kappa()[0];
        const double k2 = weight_.z2d_kappa()[1];
        const double a0 = k2 - 0.5, b0 = k1 - 0.5;
        int mm = max_degree_ / 2 + 1;
        std::vector<double> j00, j11, j01, j10;
        jacobi_poly_all(mm, a0, b0, u, j00);
        jacobi_poly_all(mm, a0 + 1.0, b0 + 1.0, u, j11);
        jacobi_poly_all(mm, a0, b0 + 1.0, u, j01);
        jacobi_poly_all(mm, a0 + 1.0, b0, u, j10);
        out[0] = jacobi_nrm_[0];
        for (int n = 1; n <= max_degree_; ++n) {
            std::size_t j = static_cast<std::size_t>(block_begin(n));
            if (n % 2 == 0) {
                std::size_t m = static_cast<std::size_t>(n / 2);
                out[j] = jacobi_nrm_[j] * j00[m];
                out[j + 1] = jacobi_nrm_[j + 1] * c * s * j11[m - 1];
            } else {
                std::size_t m = static_cast<std::size_t>((n - 1) / 2);
                out[j] = jacobi_nrm_[j] * c * j01[m];
                out[j + 1] = jacobi_nrm_[j + 1] * s * j10[m];
            }
        }
        return out;
    }
    std::vector<double> v = raw_basis_at(x);
    for (std::size_t j = 0; j < M; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < onb_[j].size(); ++i) s += onb_[j][i] * v[i];
        out[j] = s;
    }
    return out;
}

std::vector<double> HarmonicAnalyzer::to_raw_coeffs(const Expansion& e) const {
    if (identity_onb_ || jacobi_basis_) return e.coeffs;
    std::vector<double> raw(e.coeffs.size(), 0.0);
    for (std::size_t j = 0; j < e.coeffs.size(); ++j) {
        double c = e.coeffs[j];
        if (c == 0.0) continue;
        for (std::size_t i = 0; i < onb_[j].size(); ++i) raw[i] += c * onb_[j][i];
    }
    return raw;
}

double HarmonicAnalyzer::eval_raw(const std::vector<double>& raw, const Point& x) const {
    std::vector<double> v = jacobi_basis_ ? basis_at(x) : raw_basis_at(x);
    double s = 0.0;
    for (std::size_t i = 0; i < raw.size(); ++i) s += raw[i] * v[i];
    return s;
}

double HarmonicAnalyzer::eval_basis(int j, const Point& x) const {
    return basis_at(x)[static_cast<std::size_t>(j)];
}

Expansion HarmonicAnalyzer::expand(const ScalarField& f) const {
    const std::size_t M = static_cast<std::size_t>(basis_size());
    const std::size_t N = grid_pts_.size();
    Expansion e;
    e.max_degree = max_degree_;
    if (identity_onb_ || jacobi_basis_) {
        e.coeffs.assign(M, 0.0);
        for (std::size_t q = 0; q < N; ++q) {
            double fw = grid_w_[q] * f(grid_pts_[q]);
            if (fw == 0.0) continue;
            std::vector<double> v = basis_at(grid_pts_[q]);
            for (std::size_t i = 0; i < M; ++i) e.coeffs[i] += fw * v[i];
        }
        return e;
    }
    // raw weighted moments g_i = <f, b_i>, then alpha_j = sum_i onb[j][i] g_i
    std::vector<double> g(M, 0.0);
    for (std::size_t q = 0; q < N; ++q) {
        double fw = grid_w_[q] * f(grid_pts_[q]);
        if (fw == 0.0) continue;
        std::vector<double> v = raw_basis_at(grid_pts_[q]);
        for (std::size_t i = 0; i < M; ++i) g[i] += fw * v[i];
    }
    e.coeffs.assign(M, 0.0);
    for (std::size_t j = 0; j < M; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < onb_[j].size(); ++i) s += onb_[j][i] * g[i];
        e.coeffs[j] = s;
    }
    return e;
}

Expansion HarmonicAnalyzer::from_coeffs(std::vector<double> coeffs) const {
    if (coeffs.size() != static_cast<std::size_t>(basis_size()))
        throw std::invalid_argument("from_coeffs: coefficient count mismatch");
    return Expansion{max_degree_, std::move(coeffs)};
}

Expansion HarmonicAnalyzer::random_bandlimited(int degree, std::uint64_t seed,
                                               const std::vector<double>& degree_scale) const {
    if (degree > max_degree_) throw std::invalid_argument("random_bandlimited: degree too large");
    Rng rng(seed);
    std::vector<double> c(static_cast<std::size_t>(basis_size()), 0.0);
    for (int j = 0; j < basis_size(); ++j) {
        int k = degree_of(j);
        if (k > degree) break;
        double scale = degree_scale.empty() ? 1.0 : degree_scale[static_cast<std::size_t>(k)];
        c[static_cast<std::size_t>(j)] = rng.normal() * scale;
    }
    return Expansion{max_degree_, std::move(c)};
}

double HarmonicAnalyzer::eval(const Expansion& e, const Point& x) const {
    return eval_raw(to_raw_coeffs(e), x);
}

std::vector<double> HarmonicAnalyzer::synth_values(const Expansion& e) const {
    const std::size_t N = grid_pts_.size();
    std::vector<double> raw = to_raw_coeffs(e);
    std::vector<double> vals(N, 0.0);
    for (std::size_t q = 0; q < N; ++q) vals[q] = eval_raw(raw, grid_pts_[q]);
    return vals;
}

Expansion HarmonicAnalyzer::project(const Expansion& e, int k) const {
    Expansion out;
    out.max_degree = max_degree_;
    out.coeffs.assign(e.coeffs.size(), 0.0);
    if (k <= max_degree_)
        for (int j = block_begin(k); j < block_end(k); ++j)
            out.coeffs[static_cast<std::size_t>(j)] = e.coeffs[static_cast<std::size_t>(j)];
    return out;
}

Expansion HarmonicAnalyzer::eta_n(const Expansion& e, int n) const {
    if (n < 1) throw std::invalid_argument("eta_n: n must be >= 1");
    if (2 * n - 1 > max_degree_)
        throw std::invalid_argument("eta_n: analyzer degree too small for 2n-1");
    Expansion out = e;
    for (std::size_t j = 0; j < out.coeffs.size(); ++j)
        out.coeffs[j] *= eta_cutoff(static_cast<double>(degree_of(static_cast<int>(j))) / n);
    return out;
}

Expansion HarmonicAnalyzer::eta_n_apply(const ScalarField& f, int n) const {
    return eta_n(expand(f), n);
}

Expansion HarmonicAnalyzer::dyadic_block(const Expansion& e, int s) const {
    if (s < 0) throw std::invalid_argument("dyadic_block: s must be >= 0");
    if (s == 0) return eta_n(e, 1);
    Expansion hi = eta_n(e, 1 << s);
    Expansion lo = eta_n(e, 1 << (s - 1));
    for (std::size_t j = 0; j < hi.coeffs.size(); ++j) hi.coeffs[j] -= lo.coeffs[j];
    return hi;
}

Expansion HarmonicAnalyzer::frac_laplacian(const Expansion& e, double r) const {
    Expansion out = e;
    double lam = weight_.lambda_kappa();
    if (r < 0.0 && std::abs(e.coeffs[0]) > 1e-13)
        throw std::domain_error("frac_laplacian: negative order undefined on constants");
    for (std::size_t j = 0; j < out.coeffs.size(); ++j) {
        int k = degree_of(static_cast<int>(j));
        if (k == 0) {
            if (r != 0.0) out.coeffs[j] = 0.0;
            continue;
        }
        out.coeffs[j] *= std::pow(k * (k + 2.0 * lam), 0.5 * r);
    }
    return out;
}

double HarmonicAnalyzer::block_norm2(const Expansion& e, int k) const {
    double s = 0.0;
    for (int j = block_begin(k); j < block_end(k); ++j)
        s += e.coeffs[static_cast<std::size_t>(j)] * e.coeffs[static_cast<std::size_t>(j)];
    return std::sqrt(s);
}

double HarmonicAnalyzer::norm2(const Expansion& e) const {
    double s = 0.0;
    for (double c : e.coeffs) s += c * c;
    return std::sqrt(s);
}

double HarmonicAnalyzer::norm(const Expansion& e, double p) const {
    std::vector<double> vals = synth_values(e);
    if (p == std::numeric_limits<double>::infinity()) {
        double m = 0.0;
        for (double v : vals) m = std::max(m, std::abs(v));
        return m;
    }
    if (!(p >= 1.0)) throw std::domain_error("norm: p must be >= 1");
    double s = 0.0;
    for (std::size_t q = 0; q < vals.size(); ++q) s += grid_w_[q] * std::pow(std::abs(vals[q]), p);
    return std::pow(s, 1.0 / p);
}

double HarmonicAnalyzer::norm(const ScalarField& f, double p) const {
    if (p == std::numeric_limits<double>::infinity()) {
        double m = 0.0;
        for (const auto& x : grid_pts_) m = std::max(m, std::abs(f(x)));
        return m;
    }
    if (!(p >= 1.0)) throw std::domain_error("norm: p must be >= 1");
    double s = 0.0;
    for (std::size_t q = 0; q < grid_pts_.size(); ++q)
        s += grid_w_[q] * std::pow(std::abs(f(grid_pts_[q])), p);
    return std::pow(s, 1.0 / p);
}

double HarmonicAnalyzer::kernel_from_basis(int n, const Point& x, const Point& y) const {
    if (n > max_degree_) throw std::invalid_argument("kernel_from_basis: n exceeds max degree");
    std::vector<double> vx = basis_at(x), vy = basis_at(y);
    double s = 0.0;
    for (int j = block_begin(n); j < block_end(n); ++j)
        s += vx[static_cast<std::size_t>(j)] * vy[static_cast<std::size_t>(j)];
    return s;
}

HarmonicAnalyzer::ApproxBracket HarmonicAnalyzer::best_approx_error(const Expansion& e, int n,
                                                                    double p) const {
    ApproxBracket br;
    const double inf = std::numeric_limits<double>::infinity();
    // exact tail for p = 2 (Parseval)
    double tail2sq = 0.0;
    for (std::size_t j = 0; j < e.coeffs.size(); ++j)
        if (degree_of(static_cast<int>(j)) > n) tail2sq += e.coeffs[j] * e.coeffs[j];
    if (p == 2.0) {
        br.lower = br.upper = std::sqrt(tail2sq);
        return br;
    }
    // upper bound via eta_{n} (near-best); lower via duality against the tail
    Expansion tail = e;
    for (std::size_t j = 0; j < tail.coeffs.size(); ++j)
        if (degree_of(static_cast<int>(j)) <= n) tail.coeffs[j] = 0.0;
    Expansion residual = e;
    {
        Expansion smooth = eta_n(e, std::max(1, n));
        for (std::size_t j = 0; j < residual.coeffs.size(); ++j)
            residual.coeffs[j] -= smooth.coeffs[j];
    }
    br.upper = norm(residual, p);
    if (p == 1.0 || p == inf) {
        double pc = (p == 1.0) ? inf : 1.0;
        double tail_pc = norm(tail, pc);
        br.lower = tail_pc > 0.0 ? tail2sq / tail_pc : 0.0;
        br.lower = std::min(br.lower, br.upper);
    }
    return br;
}

ScalarField constant_field(double value) {
    return [value](const Point&) { return value; };
}

ScalarField coordinate_monomial_field(const std::vector<int>& exponents) {
    return [exponents](const Point& x) {
        double v = 1.0;
        for (std::size_t i = 0; i < exponents.size() && i < 3; ++i)
            for (int e = 0; e < exponents[i]; ++e) v *= x[static_cast<int>(i)];
        return v;
    };
}

ScalarField cap_indicator_field(const Point& center, double radius) {
    return [center, radius](const Point& x) {
        return std::acos(std::clamp(dot(x, center), -1.0, 1.0)) <= radius ? 1.0 : 0.0;
    };
}

ScalarField bump_field(const Point& center, double scale) {
    return [center, scale](const Point& x) {
        return bump_profile(scale * std::acos(std::clamp(dot(x, center), -1.0, 1.0)));
    };
}

} // namespace dunkl
