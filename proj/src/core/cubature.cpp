#include "core/cubature.hpp"

#include "core/harmonics.hpp"
#include "core/nnls.hpp"
#include "core/quadrature.hpp"
#include "core/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dunkl {

namespace {

// d = 3 Z_2^d weights separate into t = cos(theta) and phi factors; both
// moment and Gram computations go through these 1-D weighted node lists.
struct SeparableTables {
    Quad1D t;   // weights carry (1-t^2)^(k1+k2) |t|^(2 k3)
    Quad1D phi; // weights carry |cos|^(2 k1) |sin|^(2 k2)
};

SeparableTables build_separable_tables(const DunklWeight& w) {
    const auto& kappa = w.z2d_kappa();
    SeparableTables tab;
    auto wt = [&](double t) {
        return std::pow(1.0 - t * t, kappa[0] + kappa[1]) *
               std::pow(std::abs(t), 2.0 * kappa[2]);
    };
    auto wphi = [&](double p) {
        return std::pow(std::abs(std::cos(p)), 2.0 * kappa[0]) *
               std::pow(std::abs(std::sin(p)), 2.0 * kappa[1]);
    };
    for (double lo : {-1.0, 0.0}) {
        Quad1D seg = graded_panels(lo, lo + 1.0, true, true, 36, 12);
        for (std::size_t i = 0; i < seg.nodes.size(); ++i) {
            tab.t.nodes.push_back(seg.nodes[i]);
            tab.t.weights.push_back(seg.weights[i] * wt(seg.nodes[i]));
        }
    }
    for (int qd = 0; qd < 4; ++qd) {
        Quad1D seg = graded_panels(qd * 0.5 * kPi, (qd + 1) * 0.5 * kPi, true, true, 36, 12);
        for (std::size_t i = 0; i < seg.nodes.size(); ++i) {
            tab.phi.nodes.push_back(seg.nodes[i]);
            tab.phi.weights.push_back(seg.weights[i] * wphi(seg.nodes[i]));
        }
    }
    return tab;
}

// per-(l,m) theta factors and per-(m, cos/sin) phi factors of products of
// normalized spherical harmonics; fills the Gram or the moment vector
struct SphFactorTables {
    int K;
    std::vector<std::vector<double>> legvals; // [m][l * Nt + q], l >= m
    std::vector<double> cosvals, sinvals;     // [m * Nphi + q]
    const SeparableTables* tab;
};

void legendre_normalized_local(int lmax, int m, double ct, double st, std::vector<double>& out);

SphFactorTables build_sph_factors(int K, const SeparableTables& tab) {
    SphFactorTables f;
    f.K = K;
    f.tab = &tab;
    std::size_t Nt = tab.t.nodes.size();
    std::size_t Np = tab.phi.nodes.size();
    f.legvals.assign(static_cast<std::size_t>(K + 1), {});
    std::vector<double> leg;
    for (int m = 0; m <= K; ++m)
        f.legvals[static_cast<std::size_t>(m)].assign((static_cast<std::size_t>(K) + 1) * Nt, 0.0);
    for (std::size_t q = 0; q < Nt; ++q) {
        double ct = tab.t.nodes[q];
        double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
        for (int m = 0; m <= K; ++m) {
            legendre_normalized_local(K, m, ct, st, leg);
            for (int l = m; l <= K; ++l)
                f.legvals[static_cast<std::size_t>(m)][static_cast<std::size_t>(l) * Nt + q] =
                    leg[static_cast<std::size_t>(l)];
        }
    }
    f.cosvals.assign((static_cast<std::size_t>(K) + 1) * Np, 0.0);
    f.sinvals.assign((static_cast<std::size_t>(K) + 1) * Np, 0.0);
    for (std::size_t q = 0; q < Np; ++q) {
        for (int m = 0; m <= K; ++m) {
            f.cosvals[static_cast<std::size_t>(m) * Np + q] = std::cos(m * tab.phi.nodes[q]);
            f.sinvals[static_cast<std::size_t>(m) * Np + q] = std::sin(m * tab.phi.nodes[q]);
        }
    }
    return f;
}

// duplicated from harmonics.cpp's internal helper (kept file-local there)
void legendre_normalized_local(int lmax, int m, double ct, double st, std::vector<double>& out) {
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

struct SphIndex {
    int l, m;
    int trig; // 0 = cos (or m = 0), 1 = sin
};

SphIndex sph_index(int j) {
    int l = spanning_degree_of(3, j);
    int off = j - spanning_block_begin(3, l);
    if (off == 0) return {l, 0, 0};
    int m = (off + 1) / 2;
    return {l, m, (off % 2 == 0) ? 1 : 0};
}

double sph_norm_factor(int l, int m) {
    return std::sqrt((2.0 * l + 1.0) * (m == 0 ? 1.0 : 2.0));
}

} // namespace

std::vector<double> spanning_moments(const DunklWeight& w, int degree) {
    const int M = spanning_basis_size(w.dim(), degree);
    std::vector<double> m(static_cast<std::size_t>(M), 0.0);
    if (w.is_unweighted()) {
        m[0] = 1.0;
        return m;
    }
    if (w.dim() == 2) {
        SphereGrid grid = weighted_circle_grid(w, degree);
        for (std::size_t q = 0; q < grid.points.size(); ++q) {
            std::vector<double> b = spanning_basis_eval(2, degree, grid.points[q]);
            for (int j = 0; j < M; ++j) m[static_cast<std::size_t>(j)] += grid.weights[q] * b[static_cast<std::size_t>(j)];
        }
        return m;
    }
    if (!w.is_z2d())
        throw capability_error("spanning_moments: d = 3 requires a Z_2^3 weight");
    SeparableTables tab = build_separable_tables(w);
    SphFactorTables f = build_sph_factors(degree, tab);
    std::size_t Nt = tab.t.nodes.size(), Np = tab.phi.nodes.size();
    const double scale = 1.0 / (4.0 * kPi * w.norm_const());
    for (int j = 0; j < M; ++j) {
        SphIndex ix = sph_index(j);
        double it = 0.0;
        const auto& lv = f.legvals[static_cast<std::size_t>(ix.m)];
        for (std::size_t q = 0; q < Nt; ++q)
            it += tab.t.weights[q] * lv[static_cast<std::size_t>(ix.l) * Nt + q];
        double ip = 0.0;
        const auto& tv = ix.trig == 0 ? f.cosvals : f.sinvals;
        for (std::size_t q = 0; q < Np; ++q)
            ip += tab.phi.weights[q] * tv[static_cast<std::size_t>(ix.m) * Np + q];
        m[static_cast<std::size_t>(j)] = sph_norm_factor(ix.l, ix.m) * it * ip * scale;
    }
    return m;
}

std::vector<double> spanning_gram(const DunklWeight& w, int degree) {
    const int M = spanning_basis_size(w.dim(), degree);
    std::vector<double> G(static_cast<std::size_t>(M) * static_cast<std::size_t>(M), 0.0);
    if (w.is_unweighted()) {
        for (int j = 0; j < M; ++j) G[static_cast<std::size_t>(j) * M + j] = 1.0;
        return G;
    }
    if (w.dim() == 2) {
        SphereGrid grid = weighted_circle_grid(w, 2 * degree);
        for (std::size_t q = 0; q < grid.points.size(); ++q) {
            std::vector<double> b = spanning_basis_eval(2, degree, grid.points[q]);
            for (int i = 0; i < M; ++i)
                for (int j = i; j < M; ++j)
                    G[static_cast<std::size_t>(i) * M + j] +=
                        grid.weights[q] * b[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(j)];
        }
        for (int i = 0; i < M; ++i)
            for (int j = 0; j < i; ++j) G[static_cast<std::size_t>(i) * M + j] = G[static_cast<std::size_t>(j) * M + i];
        return G;
    }
    if (!w.is_z2d())
        throw capability_error("spanning_gram: d = 3 requires a Z_2^3 weight");
    SeparableTables tab = build_separable_tables(w);
    SphFactorTables f = build_sph_factors(degree, tab);
    std::size_t Nt = tab.t.nodes.size(), Np = tab.phi.nodes.size();
    const double scale = 1.0 / (4.0 * kPi * w.norm_const());
    for (int i = 0; i < M; ++i) {
        SphIndex a = sph_index(i);
        for (int j = i; j < M; ++j) {
            SphIndex b = sph_index(j);
            double it = 0.0;
            const auto& la = f.legvals[static_cast<std::size_t>(a.m)];
            const auto& lb = f.legvals[static_cast<std::size_t>(b.m)];
            for (std::size_t q = 0; q < Nt; ++q)
                it += tab.t.weights[q] * la[static_cast<std::size_t>(a.l) * Nt + q] *
                      lb[static_cast<std::size_t>(b.l) * Nt + q];
            double ip = 0.0;
            const auto& ta = a.trig == 0 ? f.cosvals : f.sinvals;
            const auto& tb = b.trig == 0 ? f.cosvals : f.sinvals;
            for (std::size_t q = 0; q < Np; ++q)
                ip += tab.phi.weights[q] * ta[static_cast<std::size_t>(a.m) * Np + q] *
                      tb[static_cast<std::size_t>(b.m) * Np + q];
            double val = sph_norm_factor(a.l, a.m) * sph_norm_factor(b.l, b.m) * it * ip * scale;
            G[static_cast<std::size_t>(i) * M + j] = G[static_cast<std::size_t>(j) * M + i] = val;
        }
    }
    return G;
}

namespace {

// Minimum-norm moment correction of the cap-measure proxy weights: exact in
// one step when no clipping is needed, iterated with a positivity floor
// otherwise. Returns an empty vector when it cannot certify positivity.
std::vector<double> min_norm_weights(const std::vector<double>& A, int M, std::size_t N,
                                     const std::vector<double>& mom,
                                     const std::vector<double>& proxy, double tol,
                                     double* residual_out) {
    std::vector<double> lam = proxy;
    const std::size_t Ms = static_cast<std::size_t>(M);
    std::vector<double> G(Ms * Ms), L(Ms * Ms), r(Ms), alpha(Ms);
    auto form_gram = [&]() {
        std::fill(G.begin(), G.end(), 0.0);
        for (std::size_t c = 0; c < N; ++c) {
            const double* b = &A[c * Ms];
            double t = proxy[c];
            for (std::size_t i = 0; i < Ms; ++i)
                for (std::size_t j = i; j < Ms; ++j) G[i * Ms + j] += t * b[i] * b[j];
        }
        for (std::size_t i = 0; i < Ms; ++i)
            for (std::size_t j = 0; j < i; ++j) G[i * Ms + j] = G[j * Ms + i];
    };
    form_gram();
    // Cholesky with a small relative shift for safety
    double dmax = 0.0;
    for (std::size_t i = 0; i < Ms; ++i) dmax = std::max(dmax, G[i * Ms + i]);
    for (std::size_t i = 0; i < Ms; ++i) G[i * Ms + i] += 1e-14 * dmax;
    std::fill(L.begin(), L.end(), 0.0);
    for (std::size_t i = 0; i < Ms; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = G[i * Ms + j];
            for (std::size_t k = 0; k < j; ++k) s -= L[i * Ms + k] * L[j * Ms + k];
            if (i == j) {
                if (s <= 0.0) return {};
                L[i * Ms + i] = std::sqrt(s);
            } else {
                L[i * Ms + j] = s / L[j * Ms + j];
            }
        }
    }
    auto solve_spd = [&](std::vector<double>& x) {
        for (std::size_t i = 0; i < Ms; ++i) {
            double s = x[i];
            for (std::size_t k = 0; k < i; ++k) s -= L[i * Ms + k] * x[k];
            x[i] = s / L[i * Ms + i];
        }
        for (std::size_t ii = Ms; ii-- > 0;) {
            double s = x[ii];
            for (std::size_t k = ii + 1; k < Ms; ++k) s -= L[k * Ms + ii] * x[k];
            x[ii] = s / L[ii * Ms + ii];
        }
    };

    double resid = 0.0;
    for (int pass = 0; pass < 24; ++pass) {
        // residual r = mom - A lam
        for (std::size_t i = 0; i < Ms; ++i) r[i] = mom[i];
        for (std::size_t c = 0; c < N; ++c) {
            const double* b = &A[c * Ms];
            double lv = lam[c];
            for (std::size_t i = 0; i < Ms; ++i) r[i] -= lv * b[i];
        }
        resid = 0.0;
        for (double v : r) resid = std::max(resid, std::abs(v));
        if (resid <= tol) {
            if (residual_out) *residual_out = resid;
            return lam;
        }
        alpha = r;
        solve_spd(alpha);
        bool clipped = false;
        for (std::size_t c = 0; c < N; ++c) {
            const double* b = &A[c * Ms];
            double d = 0.0;
            for (std::size_t i = 0; i < Ms; ++i) d += b[i] * alpha[i];
            double nl = lam[c] + proxy[c] * d;
            double floor = 0.02 * proxy[c];
            if (nl < floor) {
                nl = floor;
                clipped = true;
            }
            lam[c] = nl;
        }
        if (!clipped && pass > 0) {
            // exact Newton step applied twice without clipping: stalled
            break;
        }
    }
    if (residual_out) *residual_out = resid;
    return {};
}

} // namespace

CubatureRule solve_weights(const SeparatedSet& nodes, const DunklWeight& w, int degree,
                           double tol) {
    if (degree < 0) throw std::invalid_argument("solve_weights: negative degree");
    if (nodes.dim != w.dim()) throw std::invalid_argument("solve_weights: dimension mismatch");
    const int M = spanning_basis_size(w.dim(), degree);
    const std::size_t N = nodes.points.size();
    if (static_cast<int>(N) < M)
        throw construction_error("solve_weights: fewer nodes than moment conditions",
                                 std::numeric_limits<double>::infinity());

    std::vector<double> A(static_cast<std::size_t>(M) * N);
    for (std::size_t c = 0; c < N; ++c) {
        std::vector<double> b = spanning_basis_eval(w.dim(), degree, nodes.points[c]);
        std::copy(b.begin(), b.end(), A.begin() + static_cast<std::ptrdiff_t>(c * static_cast<std::size_t>(M)));
    }
    std::vector<double> mom = spanning_moments(w, degree);

    // cap-measure proxy weights scaled to unit mass (positive rules have
    // weights comparable to the cap measures; start the solve there)
    std::vector<double> proxy(N);
    double psum = 0.0;
    for (std::size_t c = 0; c < N; ++c) {
        proxy[c] = cap_measure(w, make_cap(nodes.points[c], nodes.separation), 0);
        psum += proxy[c];
    }
    for (auto& v : proxy) v /= psum;

    double resA = 0.0;
    std::vector<double> lam = min_norm_weights(A, M, N, mom, proxy, tol, &resA);

    CubatureRule rule;
    rule.dim = w.dim();
    rule.exact_degree = degree;
    rule.separation = nodes.separation;
    rule.covering_radius = nodes.covering_radius;
    rule.seed = nodes.seed;
    rule.delta = nodes.separation * std::max(degree, 1);

    if (!lam.empty()) {
        rule.residual = resA;
        rule.nodes = nodes.points;
        rule.weights = std::move(lam);
    } else {
        // fall back to the active-set NNLS vertex solve
        NnlsResult sol = nnls_solve(A, static_cast<std::size_t>(M), N, mom);
        if (!(sol.residual_max <= tol))
            throw construction_error("solve_weights: residual above tolerance",
                                     std::max(sol.residual_max, resA));
        rule.residual = sol.residual_max;
        for (std::size_t c = 0; c < N; ++c) {
            if (sol.x[c] > 0.0) {
                rule.nodes.push_back(nodes.points[c]);
                rule.weights.push_back(sol.x[c]);
            }
        }
    }
    for (double lw : rule.weights)
        if (!(lw > 0.0)) throw construction_error("solve_weights: nonpositive weight survived", rule.residual);

    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        double cm = cap_measure(w, make_cap(rule.nodes[i], rule.separation), 0) / w.norm_const();
        double ratio = rule.weights[i] / cm;
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
    }
    rule.weight_model_bracket = {lo, hi};
    return rule;
}

CubatureRule solve_with_retry(const DunklWeight& w, int degree, double delta, double tol,
                              std::uint64_t seed, int max_retries) {
    double d = delta;
    for (int attempt = 0;; ++attempt) {
        SeparatedSet nodes = build_maximal_separated_set(w.dim(), d / std::max(degree, 1), seed);
        try {
            return solve_weights(nodes, w, degree, tol);
        } catch (const construction_error&) {
            if (attempt >= max_retries) throw;
            d *= 0.5;
        }
    }
}

double exactness_check(const CubatureRule& rule, const DunklWeight& w, int degree, int trials,
                       std::uint64_t seed) {
    if (degree > rule.exact_degree)
        throw std::invalid_argument("exactness_check: degree exceeds the rule's exactness");
    const int M = spanning_basis_size(w.dim(), degree);
    std::vector<double> mom = spanning_moments(w, degree);
    std::vector<std::vector<double>> basis_at_nodes(rule.nodes.size());
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        basis_at_nodes[i] = spanning_basis_eval(w.dim(), degree, rule.nodes[i]);

    Rng rng(seed);
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        std::vector<double> c(static_cast<std::size_t>(M));
        for (auto& v : c) v = rng.normal();
        double exact = 0.0;
        for (int j = 0; j < M; ++j) exact += c[static_cast<std::size_t>(j)] * mom[static_cast<std::size_t>(j)];
        double disc = 0.0, disc2 = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            double fv = 0.0;
            for (int j = 0; j < M; ++j) fv += c[static_cast<std::size_t>(j)] * basis_at_nodes[i][static_cast<std::size_t>(j)];
            disc += rule.weights[i] * fv;
            disc2 += rule.weights[i] * fv * fv;
        }
        double denom = std::sqrt(std::max(disc2, 1e-300));
        worst = std::max(worst, std::abs(disc - exact) / denom);
    }
    return worst;
}

namespace {

// dense evaluation grid for "continuous" p-norms of band-limited functions
SphereGrid dense_norm_grid(const DunklWeight& w, int resolution) {
    SphereGrid g;
    double inv_a = 1.0 / w.norm_const();
    if (w.dim() == 2) {
        int m = resolution;
        for (int i = 0; i < m; ++i) {
            Point p = from_angle(2.0 * kPi * (i + 0.5) / m);
            g.points.push_back(p);
            g.weights.push_back(w.eval(p) * inv_a / m);
        }
        return g;
    }
    const Quad1D& gl = gauss_legendre(resolution / 2);
    int mphi = resolution;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i)
        for (int j = 0; j < mphi; ++j) {
            Point p = from_spherical(gl.nodes[i], 2.0 * kPi * (j + 0.5) / mphi);
            g.points.push_back(p);
            g.weights.push_back(gl.weights[i] / (2.0 * mphi) * w.eval(p) * inv_a);
        }
    return g;
}

} // namespace

MzBracket mz_check(const CubatureRule& rule, const DunklWeight& w, int n, double p, int trials,
                   std::uint64_t seed) {
    if (rule.exact_degree < 3 * n)
        throw std::invalid_argument("mz_check: rule must be exact on Pi_{3n}");
    const double inf = std::numeric_limits<double>::infinity();
    const int M = spanning_basis_size(w.dim(), n);

    std::vector<std::vector<double>> basis_at_nodes(rule.nodes.size());
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        basis_at_nodes[i] = spanning_basis_eval(w.dim(), n, rule.nodes[i]);

    std::vector<double> G;
    SphereGrid dense;
    std::vector<double> dense_basis; // column-major [q * M + j]
    if (p == 2.0) {
        G = spanning_gram(w, n);
    } else {
        dense = dense_norm_grid(w, w.dim() == 2 ? 8192 : 192);
        dense_basis.resize(dense.points.size() * static_cast<std::size_t>(M));
        for (std::size_t q = 0; q < dense.points.size(); ++q) {
            std::vector<double> b = spanning_basis_eval(w.dim(), n, dense.points[q]);
            std::copy(b.begin(), b.end(),
                      dense_basis.begin() + static_cast<std::ptrdiff_t>(q * static_cast<std::size_t>(M)));
        }
    }

    Rng rng(seed);
    MzBracket br;
    br.p = p;
    br.lo = inf;
    br.hi = 0.0;
    for (int t = 0; t < trials; ++t) {
        std::vector<double> c(static_cast<std::size_t>(M));
        for (auto& v : c) v = rng.normal();

        double disc;
        if (p == inf) {
            disc = 0.0;
            for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
                double fv = 0.0;
                for (int j = 0; j < M; ++j) fv += c[static_cast<std::size_t>(j)] * basis_at_nodes[i][static_cast<std::size_t>(j)];
                disc = std::max(disc, std::abs(fv));
            }
        } else {
            double s = 0.0;
            for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
                double fv = 0.0;
                for (int j = 0; j < M; ++j) fv += c[static_cast<std::size_t>(j)] * basis_at_nodes[i][static_cast<std::size_t>(j)];
                s += rule.weights[i] * std::pow(std::abs(fv), p);
            }
            disc = std::pow(s, 1.0 / p);
        }

        double cont;
        if (p == 2.0) {
            double s = 0.0;
            for (int i = 0; i < M; ++i)
                for (int j = 0; j < M; ++j)
                    s += c[static_cast<std::size_t>(i)] * G[static_cast<std::size_t>(i) * M + j] * c[static_cast<std::size_t>(j)];
            cont = std::sqrt(std::max(s, 0.0));
        } else {
            double s = 0.0, mx = 0.0;
            for (std::size_t q = 0; q < dense.points.size(); ++q) {
                const double* b = &dense_basis[q * static_cast<std::size_t>(M)];
                double fv = 0.0;
                for (int j = 0; j < M; ++j) fv += c[static_cast<std::size_t>(j)] * b[j];
                if (p == inf) mx = std::max(mx, std::abs(fv));
                else s += dense.weights[q] * std::pow(std::abs(fv), p);
            }
            cont = (p == inf) ? mx : std::pow(s, 1.0 / p);
        }

        double ratio = disc / std::max(cont, 1e-300);
        br.lo = std::min(br.lo, ratio);
        br.hi = std::max(br.hi, ratio);
    }
    return br;
}

} // namespace dunkl
