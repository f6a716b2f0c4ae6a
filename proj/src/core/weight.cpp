#include "core/weight.hpp"

#include "core/quadrature.hpp"
#include "core/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace dunkl {

Point reflect(const Point& x, const Point& v) {
    double vv = dot(v, v);
    if (vv == 0.0) throw std::domain_error("reflect: zero direction");
    double s = 2.0 * dot(x, v) / vv;
    Point r = x;
    for (int i = 0; i < 3; ++i) r.c[static_cast<std::size_t>(i)] -= s * v.c[static_cast<std::size_t>(i)];
    return r;
}

namespace {

bool same_dir(const Point& a, const Point& b, double tol) {
    double plus = 0.0, minus = 0.0;
    for (int i = 0; i < 3; ++i) {
        plus = std::max(plus, std::abs(a[i] - b[i]));
        minus = std::max(minus, std::abs(a[i] + b[i]));
    }
    return plus <= tol || minus <= tol;
}

int find_root(const std::vector<Point>& roots, const Point& p, double tol) {
    for (std::size_t i = 0; i < roots.size(); ++i)
        if (same_dir(roots[i], p, tol)) return static_cast<int>(i);
    return -1;
}

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int a) { return parent[static_cast<std::size_t>(a)] == a ? a : parent[static_cast<std::size_t>(a)] = find(parent[static_cast<std::size_t>(a)]); }
    void unite(int a, int b) { parent[static_cast<std::size_t>(find(a))] = find(b); }
};

} // namespace

RootSystem make_root_system(int dim, std::vector<Point> roots, std::vector<double> kappa) {
    if (dim != 2 && dim != 3) throw std::invalid_argument("root system: dim must be 2 or 3");
    if (roots.size() != kappa.size())
        throw std::invalid_argument("root system: roots and multiplicities must align");
    if (roots.empty()) throw std::invalid_argument("root system: at least one positive root required");
    for (auto& r : roots) {
        if (r.dim != dim) throw std::invalid_argument("root system: root dimension mismatch");
        r = normalized(r);
    }
    for (double k : kappa)
        if (k < 0.0) throw std::invalid_argument("root system: multiplicities must be >= 0");
    for (std::size_t i = 0; i < roots.size(); ++i)
        for (std::size_t j = i + 1; j < roots.size(); ++j)
            if (same_dir(roots[i], roots[j], 1e-10))
                throw std::invalid_argument("root system: duplicate positive root");

    const double tol = 1e-10;
    UnionFind uf(roots.size());
    for (std::size_t i = 0; i < roots.size(); ++i) {
        for (std::size_t j = 0; j < roots.size(); ++j) {
            Point img = reflect(roots[i], roots[j]);
            int k = find_root(roots, img, tol);
            if (k < 0) throw std::invalid_argument("root system: not closed under its reflections");
            uf.unite(static_cast<int>(i), k);
        }
    }
    for (std::size_t i = 0; i < roots.size(); ++i)
        for (std::size_t j = 0; j < roots.size(); ++j)
            if (uf.find(static_cast<int>(i)) == uf.find(static_cast<int>(j)) &&
                std::abs(kappa[i] - kappa[j]) > 1e-12)
                throw std::invalid_argument(
                    "root system: multiplicities must be constant on conjugacy classes");

    bool axes = true;
    for (const auto& r : roots) {
        int nz = 0;
        for (int i = 0; i < dim; ++i)
            if (std::abs(std::abs(r[i]) - 1.0) <= 1e-12) ++nz;
        bool axis = false;
        for (int i = 0; i < dim; ++i) {
            bool ok = std::abs(std::abs(r[i]) - 1.0) <= 1e-12;
            for (int j = 0; j < dim; ++j)
                if (j != i && std::abs(r[j]) > 1e-12) ok = false;
            if (ok) axis = true;
        }
        (void)nz;
        if (!axis) { axes = false; break; }
    }

    RootSystem rs;
    rs.dim = dim;
    rs.positive_roots = std::move(roots);
    rs.multiplicities = std::move(kappa);
    rs.tag = axes ? GroupTag::Z2d : GroupTag::GeneralVerified;
    return rs;
}

RootSystem z2d_root_system(const std::vector<double>& kappa) {
    int dim = static_cast<int>(kappa.size());
    std::vector<Point> roots;
    for (int i = 0; i < dim; ++i)
        roots.push_back(make_point(dim, i == 0 ? 1.0 : 0.0, i == 1 ? 1.0 : 0.0, i == 2 ? 1.0 : 0.0));
    return make_root_system(dim, roots, kappa);
}

RootSystem parse_root_system(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int dim = 0;
    std::vector<Point> roots;
    std::vector<double> kappa;
    while (std::getline(in, line)) {
        auto first = line.find_first_not_of(" \t\r\n");
        if (first == std::string::npos) continue;
        line = line.substr(first);
        if (line.empty() || line[0] == '#') continue;
        if (line.rfind("d=", 0) == 0) {
            dim = std::stoi(line.substr(2));
            continue;
        }
        std::istringstream ls(line);
        std::string word;
        ls >> word;
        if (word != "root") throw std::invalid_argument("root system text: expected 'root' line");
        if (dim == 0) throw std::invalid_argument("root system text: missing 'd=' header");
        std::vector<double> coords(static_cast<std::size_t>(dim));
        for (auto& c : coords)
            if (!(ls >> c)) throw std::invalid_argument("root system text: malformed root coordinates");
        ls >> word;
        if (word != "kappa") throw std::invalid_argument("root system text: expected 'kappa'");
        double k;
        if (!(ls >> k)) throw std::invalid_argument("root system text: malformed kappa");
        roots.push_back(make_point(dim, coords[0], coords[1], dim == 3 ? coords[2] : 0.0));
        kappa.push_back(k);
    }
    if (dim == 0) throw std::invalid_argument("root system text: missing 'd=' header");
    return make_root_system(dim, std::move(roots), std::move(kappa));
}

std::string format_root_system(const RootSystem& rs) {
    std::ostringstream out;
    out.precision(17);
    out << "d=" << rs.dim << "\n";
    for (std::size_t i = 0; i < rs.positive_roots.size(); ++i) {
        out << "root";
        for (int j = 0; j < rs.dim; ++j) out << " " << rs.positive_roots[i][j];
        out << " kappa " << rs.multiplicities[i] << "\n";
    }
    return out.str();
}

DunklWeight::DunklWeight(RootSystem rs, int norm_level) : rs_(std::move(rs)) {
    gamma_ = std::accumulate(rs_.multiplicities.begin(), rs_.multiplicities.end(), 0.0);
    lambda_ = 0.5 * (rs_.dim - 2) + gamma_;

    if (rs_.tag == GroupTag::Z2d) {
        axis_kappa_.assign(static_cast<std::size_t>(rs_.dim), 0.0);
        for (std::size_t i = 0; i < rs_.positive_roots.size(); ++i) {
            for (int j = 0; j < rs_.dim; ++j)
                if (std::abs(std::abs(rs_.positive_roots[i][j]) - 1.0) <= 1e-12)
                    axis_kappa_[static_cast<std::size_t>(j)] += rs_.multiplicities[i];
        }
    }

    if (gamma_ == 0.0) {
        norm_const_ = 1.0;
    } else if (rs_.tag == GroupTag::Z2d) {
        // a_d^kappa = Gamma(d/2) prod Gamma(k_i + 1/2) / (Gamma(1/2)^d Gamma(d/2 + |k|))
        double lg = std::lgamma(0.5 * rs_.dim) - rs_.dim * std::lgamma(0.5) -
                    std::lgamma(0.5 * rs_.dim + gamma_);
        for (double k : axis_kappa_) lg += std::lgamma(k + 0.5);
        norm_const_ = std::exp(lg);
    } else {
        auto one = [](const Point&) { return 1.0; };
        auto w2 = [this](const Point& x) { return eval(x); };
        norm_const_ = reference_integrate(one, w2, rs_.dim, norm_level, split_angles_d2(),
                                          split_t_d3(), split_phi_d3())
                          .value;
    }
    if (!(norm_const_ > 0.0)) throw std::runtime_error("DunklWeight: normalization must be positive");
}

DunklWeight DunklWeight::z2d(const std::vector<double>& kappa) {
    return DunklWeight(z2d_root_system(kappa));
}

const std::vector<double>& DunklWeight::z2d_kappa() const {
    if (rs_.tag != GroupTag::Z2d)
        throw std::logic_error("z2d_kappa: root system is not Z_2^d");
    return axis_kappa_;
}

double DunklWeight::eval(const Point& x) const {
    double prod = 1.0;
    for (std::size_t i = 0; i < rs_.positive_roots.size(); ++i) {
        double k = rs_.multiplicities[i];
        if (k == 0.0) continue;
        prod *= std::pow(std::abs(dot(x, rs_.positive_roots[i])), 2.0 * k);
    }
    return prod;
}

std::vector<double> DunklWeight::split_angles_d2() const {
    std::vector<double> out;
    if (rs_.dim != 2) return out;
    for (std::size_t i = 0; i < rs_.positive_roots.size(); ++i) {
        if (rs_.multiplicities[i] == 0.0) continue;
        double a = std::atan2(rs_.positive_roots[i][1], rs_.positive_roots[i][0]);
        out.push_back(a + 0.5 * kPi);
        out.push_back(a - 0.5 * kPi);
        out.push_back(a + 1.5 * kPi);
    }
    return out;
}

std::vector<double> DunklWeight::split_t_d3() const {
    std::vector<double> out;
    if (rs_.dim != 3 || rs_.tag != GroupTag::Z2d) return out;
    if (axis_kappa_.size() == 3 && axis_kappa_[2] > 0.0) out.push_back(0.0);
    return out;
}

std::vector<double> DunklWeight::split_phi_d3() const {
    std::vector<double> out;
    if (rs_.dim != 3 || rs_.tag != GroupTag::Z2d) return out;
    if (axis_kappa_[0] > 0.0) {
        out.push_back(0.5 * kPi);
        out.push_back(1.5 * kPi);
    }
    if (axis_kappa_[1] > 0.0) {
        out.push_back(0.0);
        out.push_back(kPi);
    }
    return out;
}

SphereGrid weighted_circle_grid(const DunklWeight& w, int max_product_degree) {
    if (w.dim() != 2) throw std::invalid_argument("weighted_circle_grid: d = 2 only");
    SphereGrid grid;
    const double inv_a = 1.0 / w.norm_const();
    if (w.is_unweighted()) {
        int m = 2 * max_product_degree + 9;
        for (int i = 0; i < m; ++i) {
            grid.points.push_back(from_angle(2.0 * kPi * i / m));
            grid.weights.push_back(1.0 / m);
        }
        return grid;
    }
    std::vector<double> splits;
    for (double s : w.split_angles_d2()) {
        double a = std::fmod(s, 2.0 * kPi);
        if (a < 0) a += 2.0 * kPi;
        splits.push_back(a);
    }
    splits.push_back(0.0);
    splits.push_back(2.0 * kPi);
    std::sort(splits.begin(), splits.end());
    splits.erase(std::unique(splits.begin(), splits.end(),
                             [](double a, double b) { return std::abs(a - b) < 1e-13; }),
                 splits.end());
    const int D = max_product_degree + 6;
    const Quad1D& gl = gauss_legendre(10);
    auto add_segment = [&](double lo, double hi) {
        int pieces = 1 + static_cast<int>(std::ceil((hi - lo) * D / 8.0));
        for (int p = 0; p < pieces; ++p) {
            double a = lo + (hi - lo) * p / pieces;
            double b = lo + (hi - lo) * (p + 1) / pieces;
            double c = 0.5 * (b - a), mid = 0.5 * (a + b);
            for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
                double theta = mid + c * gl.nodes[i];
                Point pt = from_angle(theta);
                grid.points.push_back(pt);
                grid.weights.push_back(c * gl.weights[i] * w.eval(pt) * inv_a / (2.0 * kPi));
            }
        }
    };
    const int levels = 36;
    for (std::size_t s = 0; s + 1 < splits.size(); ++s) {
        double lo = splits[s], hi = splits[s + 1], mid = 0.5 * (lo + hi);
        double t = 1.0;
        for (int j = 0; j < levels; ++j) {
            double t2 = 0.5 * t;
            add_segment(lo + (mid - lo) * t2, lo + (mid - lo) * t);
            add_segment(hi - (hi - mid) * t, hi - (hi - mid) * t2);
            t = t2;
        }
        add_segment(lo, lo + (mid - lo) * t);
        add_segment(hi - (hi - mid) * t, hi);
    }
    return grid;
}

namespace {

// Cap integral in the cap's own polar frame (d = 3); composite tensor rule,
// accuracy scales with `level`.
double cap_integral_d3(const DunklWeight& w, const Cap& cap, int level) {
    Point axis = cap.center;
    // orthonormal frame {u, v, axis}
    Point u = std::abs(axis[2]) < 0.9 ? make_point(3, 0, 0, 1) : make_point(3, 1, 0, 0);
    double proj = dot(u, axis);
    for (int i = 0; i < 3; ++i) u[i] -= proj * axis[i];
    u = normalized(u);
    Point v = make_point(3, axis[1] * u[2] - axis[2] * u[1], axis[2] * u[0] - axis[0] * u[2],
                         axis[0] * u[1] - axis[1] * u[0]);

    int np_rho = 8 + 4 * level;
    int np_psi = 16 + 8 * level;
    const Quad1D& gl = gauss_legendre(8);
    double total = 0.0;
    for (int ip = 0; ip < np_rho; ++ip) {
        double r0 = cap.radius * ip / np_rho, r1 = cap.radius * (ip + 1) / np_rho;
        for (std::size_t a = 0; a < gl.nodes.size(); ++a) {
            double rho = 0.5 * (r0 + r1) + 0.5 * (r1 - r0) * gl.nodes[a];
            double wr = 0.5 * (r1 - r0) * gl.weights[a] * std::sin(rho);
            double ring = 0.0;
            for (int jp = 0; jp < np_psi; ++jp) {
                double p0 = 2.0 * kPi * jp / np_psi, p1 = 2.0 * kPi * (jp + 1) / np_psi;
                for (std::size_t b = 0; b < gl.nodes.size(); ++b) {
                    double psi = 0.5 * (p0 + p1) + 0.5 * (p1 - p0) * gl.nodes[b];
                    double wp = 0.5 * (p1 - p0) * gl.weights[b];
                    Point y;
                    y.dim = 3;
                    double cr = std::cos(rho), sr = std::sin(rho);
                    double cp = std::cos(psi), sp = std::sin(psi);
                    for (int i = 0; i < 3; ++i)
                        y[i] = cr * axis[i] + sr * (cp * u[i] + sp * v[i]);
                    ring += wp * w.eval(y);
                }
            }
            total += wr * ring;
        }
    }
    return total / (4.0 * kPi);
}

} // namespace

double cap_measure(const DunklWeight& w, const Cap& cap, int level) {
    if (!(cap.radius > 0.0) || cap.radius > kPi + 1e-12)
        throw std::domain_error("cap_measure: invalid cap radius");
    double r = std::min(cap.radius, kPi);
    if (w.is_unweighted()) {
        if (w.dim() == 2) return r / kPi;
        return 0.5 * (1.0 - std::cos(r));
    }
    if (w.dim() == 2) {
        double theta0 = std::atan2(cap.center[1], cap.center[0]);
        auto g = [&](double t) { return w.eval(from_angle(t)); };
        // split the arc at weight zeros
        std::vector<double> cuts{theta0 - r, theta0 + r};
        for (double s : w.split_angles_d2()) {
            for (int shift = -2; shift <= 2; ++shift) {
                double a = s + 2.0 * kPi * shift;
                if (a > theta0 - r + 1e-14 && a < theta0 + r - 1e-14) cuts.push_back(a);
            }
        }
        std::sort(cuts.begin(), cuts.end());
        double total = 0.0;
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
            total += integrate_graded(g, cuts[i], cuts[i + 1], true, true, 24 + 4 * level, 10);
        return total / (2.0 * kPi);
    }
    return cap_integral_d3(w, cap, level);
}

double cap_measure_model(const DunklWeight& w, const Point& x, int n) {
    if (n < 1) throw std::domain_error("cap_measure_model: n must be >= 1");
    require_unit(x, "cap_measure_model");
    double val = std::pow(static_cast<double>(n), -(w.dim() - 1));
    const auto& rs = w.roots();
    for (std::size_t i = 0; i < rs.positive_roots.size(); ++i) {
        double k = rs.multiplicities[i];
        if (k == 0.0) continue;
        val *= std::pow(std::abs(dot(x, rs.positive_roots[i])) + 1.0 / n, 2.0 * k);
    }
    return val;
}

double w_n_approx(const DunklWeight& w, const Point& x, int n, int level) {
    if (n < 1) throw std::domain_error("w_n_approx: n must be >= 1");
    return std::pow(static_cast<double>(n), w.dim() - 1) *
           cap_measure(w, make_cap(x, 1.0 / n), level);
}

std::vector<Cap> default_doubling_grid(int dim, std::uint64_t seed, int n_centers) {
    Rng rng(seed);
    std::vector<Cap> grid;
    const double radii[] = {kPi / 64.0, kPi / 16.0, kPi / 4.0};
    for (int i = 0; i < n_centers; ++i) {
        Point c = dim == 2 ? from_angle(rng.uniform(0.0, 2.0 * kPi))
                           : from_spherical(rng.uniform(-1.0, 1.0), rng.uniform(0.0, 2.0 * kPi));
        for (double r : radii) grid.push_back(make_cap(c, r));
    }
    return grid;
}

DoublingReport doubling_diagnostics(const DunklWeight& w, const std::vector<Cap>& grid,
                                    int max_depth, int level) {
    DoublingReport rep;
    rep.estimated_s_w = 0.0;
    rep.doubling_L = 0.0;
    for (const auto& cap : grid) {
        double base = cap_measure(w, cap, level);
        rep.samples.push_back({cap.center, cap.radius, 0, 1.0});
        double prev = base;
        for (int m = 1; m <= max_depth; ++m) {
            double r = cap.radius * std::pow(2.0, m);
            if (r > kPi) break;
            double val = cap_measure(w, make_cap(cap.center, r), level);
            double ratio = val / base;
            rep.samples.push_back({cap.center, cap.radius, m, ratio});
            rep.estimated_s_w = std::max(rep.estimated_s_w, std::log2(std::max(ratio, 1.0)) / m);
            rep.doubling_L = std::max(rep.doubling_L, val / prev);
            prev = val;
        }
    }
    // shifted-center comparability on pairs drawn from the grid centers
    double cmax = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        for (std::size_t j = 0; j < grid.size(); j += 3) {
            const Point& x = grid[i].center;
            const Point& y = grid[j].center;
            for (int n : {8, 32}) {
                double wx = cap_measure(w, make_cap(x, 1.0 / n), level);
                double wy = cap_measure(w, make_cap(y, 1.0 / n), level);
                double d = geodesic_distance(x, y);
                double bound = std::pow(1.0 + n * d, rep.estimated_s_w) * wy;
                cmax = std::max(cmax, wx / bound);
            }
        }
    }
    rep.comparability_C = cmax;
    return rep;
}

double lemma31_ratio(const std::vector<double>& cubature_weights, int dim, double gamma_kappa,
                     double beta, int n) {
    if (n < 1) throw std::domain_error("lemma31_ratio: n must be >= 1");
    if (!(beta > 0.0)) throw std::domain_error("lemma31_ratio: beta must be positive");
    if (gamma_kappa > 0.0 && beta >= 1.0 / (2.0 * gamma_kappa))
        throw std::domain_error("lemma31_ratio: beta must lie below 1/(2 gamma_kappa)");
    double sum = 0.0;
    for (double lw : cubature_weights) {
        if (!(lw > 0.0)) throw std::domain_error("lemma31_ratio: weights must be positive");
        sum += std::pow(lw, -beta);
    }
    return sum / std::pow(static_cast<double>(n), (dim - 1) * (1.0 + beta));
}

} // namespace dunkl
