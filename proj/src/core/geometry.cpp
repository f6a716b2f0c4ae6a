#include "core/geometry.hpp"

#include "core/quadrature.hpp"
#include "core/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dunkl {

Point make_point(int dim, double x, double y, double z) {
    if (dim != 2 && dim != 3) throw std::invalid_argument("Point: dim must be 2 or 3");
    Point p;
    p.dim = dim;
    p.c = {x, y, dim == 2 ? 0.0 : z};
    return p;
}

Point from_angle(double theta) { return make_point(2, std::cos(theta), std::sin(theta)); }

Point from_spherical(double cos_theta, double phi) {
    double ct = std::clamp(cos_theta, -1.0, 1.0);
    double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    return make_point(3, st * std::cos(phi), st * std::sin(phi), ct);
}

double dot(const Point& a, const Point& b) {
    return a.c[0] * b.c[0] + a.c[1] * b.c[1] + a.c[2] * b.c[2];
}

double norm(const Point& a) { return std::sqrt(dot(a, a)); }

Point normalized(const Point& a) {
    double n = norm(a);
    if (n == 0.0) throw std::domain_error("normalized: zero vector");
    Point p = a;
    for (auto& v : p.c) v /= n;
    return p;
}

bool is_unit(const Point& a, double tol) { return std::abs(norm(a) - 1.0) <= tol; }

void require_unit(const Point& a, const char* who) {
    if (!is_unit(a, 1e-9)) throw std::domain_error(std::string(who) + ": input is not a unit vector");
}

double geodesic_distance(const Point& x, const Point& y) {
    require_unit(x, "geodesic_distance");
    require_unit(y, "geodesic_distance");
    return std::acos(std::clamp(dot(x, y), -1.0, 1.0));
}

Cap make_cap(const Point& center, double radius) {
    require_unit(center, "Cap");
    if (!(radius > 0.0) || radius > kPi + 1e-12)
        throw std::domain_error("Cap: radius must lie in (0, pi]");
    return Cap{center, std::min(radius, kPi)};
}

namespace {

// Candidate streams: seeded Halton points mapped area-preservingly.
struct SphereStream {
    int dim;
    double off1, off2;
    SphereStream(int d, std::uint64_t seed, int channel) : dim(d) {
        Rng rng(seed * 1315423911ULL + 0x9e37u + static_cast<std::uint64_t>(channel) * 77ULL);
        off1 = rng.uniform();
        off2 = rng.uniform();
    }
    Point at(std::uint64_t k) const {
        double u = radical_inverse(k + 1, 2) + off1;
        u -= std::floor(u);
        if (dim == 2) return from_angle(2.0 * kPi * u);
        double v = radical_inverse(k + 1, 3) + off2;
        v -= std::floor(v);
        return from_spherical(2.0 * u - 1.0, 2.0 * kPi * v);
    }
};

// Bucket grid over the sphere used to prune pairwise distance queries.
// Falls back to a full scan for coarse separations; the azimuthal reach is
// derived from 1 - cos(d) = (1 - cos(t1 - t2)) + sin(t1) sin(t2) (1 - cos(dphi)),
// so no near-miss can escape the scanned cells.
class NeighborGrid {
public:
    NeighborGrid(int dim, double eps) : dim_(dim), h_(eps) {
        brute_ = eps > 0.15;
        if (brute_) return;
        if (dim_ == 2) {
            ncols_ = std::max<int>(1, static_cast<int>(std::floor(2.0 * kPi / h_)));
            if (ncols_ < 6) brute_ = true;
            else cells_.resize(static_cast<std::size_t>(ncols_));
            return;
        }
        nrows_ = std::max<int>(1, static_cast<int>(std::floor(kPi / h_)));
        if (nrows_ < 4) {
            brute_ = true;
            return;
        }
        row_cols_.resize(static_cast<std::size_t>(nrows_));
        row_start_.resize(static_cast<std::size_t>(nrows_) + 1, 0);
        int total = 0;
        for (int i = 0; i < nrows_; ++i) {
            double theta_mid = (i + 0.5) * kPi / nrows_;
            int nc = std::max<int>(1, static_cast<int>(std::floor(2.0 * kPi * std::sin(theta_mid) / h_)));
            row_cols_[static_cast<std::size_t>(i)] = nc;
            row_start_[static_cast<std::size_t>(i)] = total;
            total += nc;
        }
        row_start_[static_cast<std::size_t>(nrows_)] = total;
        cells_.resize(static_cast<std::size_t>(total));
    }

    void insert(const Point& p, int idx) {
        if (brute_) return;
        cells_[cell_of(p)].push_back(idx);
    }

    // minimum geodesic distance from p to stored points, pruned to nearby cells
    double min_dist(const Point& p, const std::vector<Point>& pts) const {
        double best = kPi;
        if (brute_) {
            for (const auto& q : pts)
                best = std::min(best, std::acos(std::clamp(dot(p, q), -1.0, 1.0)));
            return best;
        }
        auto scan = [&](std::size_t cell) {
            for (int idx : cells_[cell]) {
                double d = std::acos(std::clamp(dot(p, pts[static_cast<std::size_t>(idx)]), -1.0, 1.0));
                best = std::min(best, d);
            }
        };
        if (dim_ == 2) {
            // column width >= h_, so +/-1 columns cover every distance < h_
            int c = col2(p);
            for (int dc = -1; dc <= 1; ++dc)
                scan(static_cast<std::size_t>(((c + dc) % ncols_ + ncols_) % ncols_));
            return best;
        }
        double theta = std::acos(std::clamp(p.c[2], -1.0, 1.0));
        double sp = std::sin(theta);
        int row = std::min(nrows_ - 1, static_cast<int>(theta / kPi * nrows_));
        double one_minus_cos = 1.0 - std::cos(h_);
        for (int dr = -1; dr <= 1; ++dr) {
            int r = row + dr;
            if (r < 0 || r >= nrows_) continue;
            int nc = row_cols_[static_cast<std::size_t>(r)];
            double lo = r * kPi / nrows_, hi = (r + 1) * kPi / nrows_;
            double smin_row = std::min(std::sin(lo), std::sin(hi));
            double ss = smin_row * sp;
            double cos_dphi = ss > 0.0 ? 1.0 - one_minus_cos / ss : -2.0;
            if (cos_dphi <= -1.0) {
                for (int c = 0; c < nc; ++c)
                    scan(static_cast<std::size_t>(row_start_[static_cast<std::size_t>(r)] + c));
                continue;
            }
            double dphi = std::acos(std::clamp(cos_dphi, -1.0, 1.0));
            double phi = std::atan2(p.c[1], p.c[0]);
            if (phi < 0) phi += 2.0 * kPi;
            int c0 = std::min(nc - 1, static_cast<int>(phi / (2.0 * kPi) * nc));
            int reach = 1 + static_cast<int>(std::ceil(dphi / (2.0 * kPi / nc)));
            if (2 * reach + 1 >= nc) {
                for (int c = 0; c < nc; ++c)
                    scan(static_cast<std::size_t>(row_start_[static_cast<std::size_t>(r)] + c));
                continue;
            }
            for (int dc = -reach; dc <= reach; ++dc)
                scan(static_cast<std::size_t>(row_start_[static_cast<std::size_t>(r)] + ((c0 + dc) % nc + nc) % nc));
        }
        return best;
    }

private:
    std::size_t cell_of(const Point& p) const {
        if (dim_ == 2) return static_cast<std::size_t>(col2(p));
        double theta = std::acos(std::clamp(p.c[2], -1.0, 1.0));
        int row = std::min(nrows_ - 1, static_cast<int>(theta / kPi * nrows_));
        int nc = row_cols_[static_cast<std::size_t>(row)];
        double phi = std::atan2(p.c[1], p.c[0]);
        if (phi < 0) phi += 2.0 * kPi;
        int col = std::min(nc - 1, static_cast<int>(phi / (2.0 * kPi) * nc));
        return static_cast<std::size_t>(row_start_[static_cast<std::size_t>(row)] + col);
    }
    int col2(const Point& p) const {
        double phi = std::atan2(p.c[1], p.c[0]);
        if (phi < 0) phi += 2.0 * kPi;
        return std::min(ncols_ - 1, static_cast<int>(phi / (2.0 * kPi) * ncols_));
    }

    int dim_;
    double h_;
    bool brute_ = false;
    int ncols_ = 0;
    int nrows_ = 0;
    std::vector<int> row_cols_;
    std::vector<int> row_start_;
    std::vector<std::vector<int>> cells_;
};

SeparatedSet build_impl(int dim, double eps, std::uint64_t seed,
                        const std::function<bool(const Point&)>* allowed) {
    if (dim != 2 && dim != 3) throw std::invalid_argument("separated set: dim must be 2 or 3");
    if (!(eps > 0.0) || eps > kPi + 1e-12)
        throw std::domain_error("separated set: eps must lie in (0, pi]");

    double expected = (dim == 2) ? 2.0 * kPi / eps : 16.0 / (eps * eps);
    std::uint64_t n_fill = static_cast<std::uint64_t>(std::min(3.0e6, 24.0 * expected)) + 64;
    std::uint64_t n_cert = static_cast<std::uint64_t>(std::min(6.0e6, 192.0 * expected)) + 64;

    SphereStream fill(dim, seed, 0);
    SphereStream cert(dim, seed, 1);

    SeparatedSet set;
    set.dim = dim;
    set.separation = eps;
    set.seed = seed;
    NeighborGrid grid(dim, eps);

    auto try_insert = [&](const Point& p) {
        if (allowed && !(*allowed)(p)) return false;
        if (!set.points.empty() && grid.min_dist(p, set.points) < eps) return false;
        grid.insert(p, static_cast<int>(set.points.size()));
        set.points.push_back(p);
        return true;
    };

    for (std::uint64_t k = 0; k < n_fill; ++k) try_insert(fill.at(k));

    // exact antipodes handle coarse separations where the stream cannot hit
    // the (measure-zero) admissible set
    for (std::size_t i = 0; i < set.points.size(); ++i) {
        Point a = set.points[i];
        for (auto& v : a.c) v = -v;
        try_insert(a);
    }

    // maximality repair: probe the certification stream, inserting any probe
    // at distance >= eps from the set (such a probe preserves separation);
    // the pass with zero insertions certifies covering_radius < eps.
    double covering = 0.0;
    for (int pass = 0; pass < 64; ++pass) {
        bool inserted = false;
        covering = 0.0;
        for (std::uint64_t k = 0; k < n_cert; ++k) {
            Point p = cert.at(k);
            if (allowed && !(*allowed)(p)) continue;
            double d = set.points.empty() ? kPi : grid.min_dist(p, set.points);
            if (d >= eps) {
                if (try_insert(p)) {
                    inserted = true;
                    continue;
                }
            }
            covering = std::max(covering, d);
        }
        if (!inserted) break;
    }
    set.covering_radius = covering;
    set.min_pairwise = min_pairwise_distance(set.points);

    if (set.points.empty()) throw std::runtime_error("separated set: empty result");
    if (set.min_pairwise < eps - 1e-12)
        throw std::runtime_error("separated set: separation verification failed");
    if (!allowed && set.covering_radius >= eps)
        throw std::runtime_error("separated set: maximality verification failed");
    return set;
}

} // namespace

SeparatedSet build_maximal_separated_set(int dim, double eps, std::uint64_t seed) {
    return build_impl(dim, eps, seed, nullptr);
}

SeparatedSet build_separated_set_in_region(int dim, double eps, std::uint64_t seed,
                                           const std::function<bool(const Point&)>& allowed) {
    return build_impl(dim, eps, seed, &allowed);
}

SeparatedSet separated_set_from_points(int dim, std::vector<Point> pts, double eps,
                                       std::uint64_t seed) {
    SeparatedSet set;
    set.dim = dim;
    set.points = std::move(pts);
    set.separation = eps;
    set.seed = seed;
    set.min_pairwise = min_pairwise_distance(set.points);
    if (set.min_pairwise < eps - 1e-12)
        throw std::invalid_argument("separated_set_from_points: separation below eps");
    SphereStream cert(dim, seed, 1);
    double expected = (dim == 2) ? 2.0 * kPi / eps : 16.0 / (eps * eps);
    std::uint64_t n_cert = static_cast<std::uint64_t>(std::min(2.0e6, 96.0 * expected)) + 64;
    double covering = 0.0;
    for (std::uint64_t k = 0; k < n_cert; ++k) {
        double best = kPi;
        Point p = cert.at(k);
        for (const auto& q : set.points)
            best = std::min(best, std::acos(std::clamp(dot(p, q), -1.0, 1.0)));
        covering = std::max(covering, best);
    }
    set.covering_radius = covering;
    if (set.covering_radius >= eps)
        throw std::invalid_argument("separated_set_from_points: set is not maximal");
    return set;
}

double min_pairwise_distance(const std::vector<Point>& pts) {
    double best = kPi;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
            best = std::min(best, std::acos(std::clamp(dot(pts[i], pts[j]), -1.0, 1.0)));
    return pts.size() < 2 ? kPi : best;
}

double covering_radius_against(const std::vector<Point>& pts, const std::vector<Point>& probes) {
    double worst = 0.0;
    for (const auto& p : probes) {
        double best = kPi;
        for (const auto& q : pts)
            best = std::min(best, std::acos(std::clamp(dot(p, q), -1.0, 1.0)));
        worst = std::max(worst, best);
    }
    return worst;
}

namespace {

std::vector<double> panel_boundaries(std::vector<double> splits, double lo, double hi) {
    std::vector<double> b{lo, hi};
    for (double s : splits) {
        if (s > lo + 1e-14 && s < hi - 1e-14) b.push_back(s);
    }
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end(), [](double a, double c) { return std::abs(a - c) < 1e-13; }),
            b.end());
    return b;
}

double integrate_circle(const ScalarField& f, const ScalarField& w,
                        const std::vector<double>& splits, int levels, int order) {
    std::vector<double> sp;
    for (double s : splits) {
        double a = std::fmod(s, 2.0 * kPi);
        if (a < 0) a += 2.0 * kPi;
        sp.push_back(a);
    }
    auto b = panel_boundaries(sp, 0.0, 2.0 * kPi);
    double total = 0.0;
    auto g = [&](double theta) {
        Point p = from_angle(theta);
        return f(p) * w(p);
    };
    for (std::size_t i = 0; i + 1 < b.size(); ++i)
        total += integrate_graded(g, b[i], b[i + 1], true, true, levels, order);
    return total / (2.0 * kPi);
}

double integrate_sphere3(const ScalarField& f, const ScalarField& w,
                         const std::vector<double>& split_t, const std::vector<double>& split_phi,
                         int levels, int order) {
    auto bt = panel_boundaries(split_t, -1.0, 1.0);
    auto bp = panel_boundaries(split_phi, 0.0, 2.0 * kPi);
    Quad1D qt, qp;
    for (std::size_t i = 0; i + 1 < bt.size(); ++i) {
        Quad1D seg = graded_panels(bt[i], bt[i + 1], true, true, levels, order);
        qt.nodes.insert(qt.nodes.end(), seg.nodes.begin(), seg.nodes.end());
        qt.weights.insert(qt.weights.end(), seg.weights.begin(), seg.weights.end());
    }
    for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
        Quad1D seg = graded_panels(bp[i], bp[i + 1], true, true, levels, order);
        qp.nodes.insert(qp.nodes.end(), seg.nodes.begin(), seg.nodes.end());
        qp.weights.insert(qp.weights.end(), seg.weights.begin(), seg.weights.end());
    }
    double total = 0.0;
    for (std::size_t i = 0; i < qt.nodes.size(); ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < qp.nodes.size(); ++j) {
            Point p = from_spherical(qt.nodes[i], qp.nodes[j]);
            row += qp.weights[j] * f(p) * w(p);
        }
        total += qt.weights[i] * row;
    }
    return total / (4.0 * kPi);
}

} // namespace

IntegralResult reference_integrate(const ScalarField& f, const ScalarField& weight, int dim,
                                   int level, const std::vector<double>& split_angles_d2,
                                   const std::vector<double>& split_t_d3,
                                   const std::vector<double>& split_phi_d3) {
    if (dim != 2 && dim != 3) throw std::invalid_argument("reference_integrate: dim must be 2 or 3");
    if (level < 0) level = 0;
    auto run = [&](int lv) {
        int levels = 18 + 5 * lv;
        int order = 8 + 2 * lv;
        if (dim == 2) return integrate_circle(f, weight, split_angles_d2, levels, order);
        return integrate_sphere3(f, weight, split_t_d3, split_phi_d3, levels, order);
    };
    IntegralResult res;
    res.value = run(level);
    res.prev_value = run(level == 0 ? 1 : level - 1);
    res.est_error = std::abs(res.value - res.prev_value);
    return res;
}

} // namespace dunkl
