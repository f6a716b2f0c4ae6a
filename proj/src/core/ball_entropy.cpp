#include "core/ball_entropy.hpp"

#include "core/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dunkl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void validate_pq(double p, double q) {
    if (!(p >= 1.0) || !(q >= 1.0))
        throw std::domain_error("ball entropy: p, q must lie in [1, inf]");
}

void validate_spec(const BallSpec& s) {
    if (s.m < 1) throw std::invalid_argument("BallSpec: m >= 1 required");
    validate_pq(s.p, s.q);
    if (!s.weights.empty()) {
        if (static_cast<int>(s.weights.size()) != s.m)
            throw std::invalid_argument("BallSpec: weight length mismatch");
        for (double w : s.weights)
            if (!(w > 0.0)) throw std::invalid_argument("BallSpec: weights must be positive");
    }
}

// after the weight-cancelling isometry the problem is e(D B_p^m, l_q^m) with
// D_i = w_i^(1/q - 1/p)
std::vector<double> diag_scales(const BallSpec& s) {
    std::vector<double> D(static_cast<std::size_t>(s.m), 1.0);
    if (s.weights.empty()) return D;
    double e = (s.q == kInf ? 0.0 : 1.0 / s.q) - (s.p == kInf ? 0.0 : 1.0 / s.p);
    for (std::size_t i = 0; i < D.size(); ++i) D[i] = std::pow(s.weights[i], e);
    return D;
}

double lq_norm(const std::vector<double>& x, double q) {
    if (q == kInf) {
        double m = 0.0;
        for (double v : x) m = std::max(m, std::abs(v));
        return m;
    }
    double s = 0.0;
    for (double v : x) s += std::pow(std::abs(v), q);
    return std::pow(s, 1.0 / q);
}

double diag_opnorm(const std::vector<double>& D, double p, double q) {
    // operator norm of diag(D): l_p -> l_q
    if (p <= q) {
        double m = 0.0;
        for (double d : D) m = std::max(m, d);
        return m;
    }
    double r = (q == kInf) ? p : 1.0 / (1.0 / q - 1.0 / p);
    if (p == kInf) r = q;
    double s = 0.0;
    for (double d : D) s += std::pow(d, r);
    return std::pow(s, 1.0 / r);
}

double log2_binom(int m, int s) {
    return (std::lgamma(m + 1.0) - std::lgamma(s + 1.0) - std::lgamma(m - s + 1.0)) /
           std::log(2.0);
}

// log2 count of lattice points within the reachability budget; costs are
// binned downward so the count never undercounts. Returns +inf when the
// count certainly exceeds `log2_cap` or the DP would be too large.
double lattice_log2_count(double h, double p, int m, bool offset, double log2_cap) {
    if (p == kInf) {
        double per = offset ? 2.0 * (std::floor(1.0 / h) + 1.0)
                            : 2.0 * std::floor(1.0 / h + 0.5) + 1.0;
        return m * std::log2(per);
    }
    int nmax = static_cast<int>(std::ceil(1.0 / h)) + 2;
    if (nmax > 20000) return kInf;
    const int B = 2048;
    // per-value binned costs
    std::vector<double> mult(static_cast<std::size_t>(B) + 1, 0.0);
    auto bin_of = [&](double cost) { return static_cast<int>(std::floor(cost * B)); };
    int zero_vals = 0;
    for (int n = 0; n <= nmax; ++n) {
        double cost, cnt;
        if (offset) {
            if (n == 0) continue;
            cost = std::pow((n - 1.0) * h, p);
            cnt = 2.0;
        } else {
            cost = n == 0 ? 0.0 : std::pow((n - 0.5) * h, p);
            cnt = n == 0 ? 1.0 : 2.0;
        }
        if (cost > 1.0 + 1e-12) break;
        int b = std::min(bin_of(cost), B);
        mult[static_cast<std::size_t>(b)] += cnt;
        (void)zero_vals;
    }
    std::vector<double> dp(static_cast<std::size_t>(B) + 1, 0.0), nx(static_cast<std::size_t>(B) + 1, 0.0);
    dp[0] = 1.0;
    const double cap = std::pow(2.0, std::min(log2_cap + 2.0, 900.0));
    for (int c = 0; c < m; ++c) {
        std::fill(nx.begin(), nx.end(), 0.0);
        for (int b = 0; b <= B; ++b) {
            if (dp[static_cast<std::size_t>(b)] == 0.0) continue;
            for (int v = 0; v + b <= B; ++v) {
                if (mult[static_cast<std::size_t>(v)] == 0.0) continue;
                nx[static_cast<std::size_t>(v + b)] += dp[static_cast<std::size_t>(b)] * mult[static_cast<std::size_t>(v)];
            }
        }
        dp.swap(nx);
        double tot = 0.0;
        for (double v : dp) tot += v;
        if (tot > cap) return kInf;
    }
    double tot = 0.0;
    for (double v : dp) tot += v;
    return std::log2(std::max(tot, 1.0));
}

struct LatticeSearch {
    double h = 0.0;
    double log2_count = 0.0;
    bool offset = false;
    bool found = false;
};

LatticeSearch search_lattice_step(double p, int m, int k, double log2_extra = 0.0) {
    // smallest h (finest lattice) with log2 count + extra <= k, per variant
    LatticeSearch best;
    for (bool offset : {false, true}) {
        double lo = 1.0 / (1 << 20), hi = 4.0;
        if (lattice_log2_count(hi, p, m, offset, static_cast<double>(k)) + log2_extra >
            static_cast<double>(k))
            continue; // even one cell per axis does not fit
        for (int it = 0; it < 60; ++it) {
            double mid = std::sqrt(lo * hi);
            double c = lattice_log2_count(mid, p, m, offset, static_cast<double>(k));
            if (c + log2_extra <= static_cast<double>(k)) hi = mid;
            else lo = mid;
            if (hi / lo < 1.0 + 1e-9) break;
        }
        double cnt = lattice_log2_count(hi, p, m, offset, static_cast<double>(k));
        if (!best.found || hi < best.h) best = {hi, cnt + log2_extra, offset, true};
    }
    return best;
}

// deterministic cloud of points of D B_p (u-space grid + extreme points)
std::vector<std::vector<double>> ball_cloud(const std::vector<double>& D, double p, int m,
                                            std::size_t target, std::uint64_t seed,
                                            bool strict_inside, double* slack_u) {
    std::vector<std::vector<double>> pts;
    std::vector<double> u(static_cast<std::size_t>(m), 0.0);
    pts.push_back(std::vector<double>(static_cast<std::size_t>(m), 0.0));
    for (int i = 0; i < m; ++i) {
        for (double s : {1.0, -1.0}) {
            std::vector<double> x(static_cast<std::size_t>(m), 0.0);
            x[static_cast<std::size_t>(i)] = s * D[static_cast<std::size_t>(i)];
            pts.push_back(x);
        }
    }
    if (m <= 3) {
        int n_side = std::max(2, static_cast<int>(std::floor(std::pow(static_cast<double>(target), 1.0 / m))));
        n_side = std::min(n_side, 16384);
        double hg = 2.0 / n_side;
        if (slack_u) *slack_u = 0.5 * hg;
        std::vector<int> idx(static_cast<std::size_t>(m), 0);
        while (true) {
            double np = 0.0;
            for (int i = 0; i < m; ++i) {
                u[static_cast<std::size_t>(i)] = -1.0 + hg * idx[static_cast<std::size_t>(i)];
                np = (p == kInf) ? std::max(np, std::abs(u[static_cast<std::size_t>(i)]))
                                 : np + std::pow(std::abs(u[static_cast<std::size_t>(i)]), p);
            }
            double nrm = (p == kInf) ? np : std::pow(np, 1.0 / p);
            double lim = strict_inside ? 1.0 : 1.0 + 0.5 * hg * std::pow(static_cast<double>(m), p == kInf ? 0.0 : 1.0 / p);
            if (nrm <= lim) {
                std::vector<double> x(static_cast<std::size_t>(m));
                for (int i = 0; i < m; ++i) x[static_cast<std::size_t>(i)] = u[static_cast<std::size_t>(i)] * D[static_cast<std::size_t>(i)];
                pts.push_back(std::move(x));
            }
            int axis = 0;
            for (; axis < m; ++axis) {
                if (++idx[static_cast<std::size_t>(axis)] <= n_side) break;
                idx[static_cast<std::size_t>(axis)] = 0;
            }
            if (axis == m) break;
        }
        return pts;
    }
    // higher dimensions: seeded uniform samples of the ball
    if (slack_u) *slack_u = 0.0;
    Rng rng(seed ^ 0xb0a11ULL);
    while (pts.size() < target) {
        double sum = 0.0;
        std::vector<double> x(static_cast<std::size_t>(m));
        if (p == kInf) {
            for (auto& v : x) v = rng.uniform(-1.0, 1.0);
        } else {
            for (auto& v : x) {
                double g = rng.gamma(1.0 / p);
                v = (rng.uniform() < 0.5 ? -1.0 : 1.0) * std::pow(g, 1.0 / p);
                sum += g;
            }
            double denom = std::pow(sum + rng.exponential(), 1.0 / p);
            for (auto& v : x) v /= denom;
        }
        for (int i = 0; i < m; ++i) x[static_cast<std::size_t>(i)] *= D[static_cast<std::size_t>(i)];
        pts.push_back(std::move(x));
    }
    return pts;
}

double dist_q(const std::vector<double>& a, const std::vector<double>& b, double q) {
    if (q == kInf) {
        double m = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
        return m;
    }
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::pow(std::abs(a[i] - b[i]), q);
    return std::pow(s, 1.0 / q);
}

} // namespace

double weighted_norm(const std::vector<double>& x, const std::vector<double>& w, double p) {
    validate_pq(p, p);
    if (p == kInf) {
        double m = 0.0;
        for (double v : x) m = std::max(m, std::abs(v));
        return m;
    }
    if (x.size() != w.size()) throw std::invalid_argument("weighted_norm: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += std::pow(std::abs(x[i]), p) * w[i];
    return std::pow(s, 1.0 / p);
}

IsometryResult isometry_U(const std::vector<double>& x, const std::vector<double>& w, double p,
                          double q) {
    validate_pq(p, q);
    if (!(p <= q)) throw std::domain_error("isometry_U: requires p <= q");
    if (x.size() != w.size()) throw std::invalid_argument("isometry_U: length mismatch");
    IsometryResult r;
    r.v.resize(x.size());
    r.ux.resize(x.size());
    double iq = q == kInf ? 0.0 : 1.0 / q;
    double ratio = (p == kInf || q == kInf) ? (p == kInf ? 1.0 : 0.0) : p / q;
    if (p == kInf) ratio = 1.0; // p = q = inf
    for (std::size_t i = 0; i < x.size(); ++i) {
        r.v[i] = std::pow(w[i], 1.0 - ratio);
        r.ux[i] = x[i] * std::pow(w[i], iq);
    }
    return r;
}

SortedWeightBound sorted_weight_bound(std::vector<double> w, double gamma) {
    if (!(gamma > 0.0)) throw std::domain_error("sorted_weight_bound: gamma must be positive");
    for (double v : w)
        if (!(v > 0.0)) throw std::invalid_argument("sorted_weight_bound: weights must be positive");
    std::sort(w.begin(), w.end());
    const double m = static_cast<double>(w.size());
    double hyp = 0.0;
    for (double v : w) hyp += std::pow(v, -gamma);
    SortedWeightBound out;
    out.hypothesis_holds = hyp <= m * (1.0 + 1e-12);
    out.worst_margin = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) {
        double bound = std::pow(m / (static_cast<double>(j) + 1.0), 1.0 / gamma);
        out.worst_margin = std::max(out.worst_margin, (1.0 / w[j]) / bound);
    }
    out.bound_holds = out.hypothesis_holds && out.worst_margin <= 1.0 + 1e-12;
    return out;
}

DyadicReduction dyadic_reduce(const BallSpec& spec, double gamma, int k_budget) {
    validate_spec(spec);
    if (!(gamma > 0.0)) throw std::domain_error("dyadic_reduce: gamma must be positive");
    if (!(spec.p <= spec.q)) throw std::domain_error("dyadic_reduce: requires p <= q");
    DyadicReduction out;
    out.sorted_weights = spec.weights.empty()
                             ? std::vector<double>(static_cast<std::size_t>(spec.m), 1.0)
                             : spec.weights;
    std::sort(out.sorted_weights.begin(), out.sorted_weights.end());
    double hyp = 0.0;
    for (double v : out.sorted_weights) hyp += std::pow(v, -gamma);
    out.hypothesis_holds = hyp <= spec.m * (1.0 + 1e-12);

    const int m = spec.m;
    int j0 = 0;
    while ((2 << j0) <= m) ++j0; // 2^(j0) <= m < 2^(j0+1) with j0 >= 0
    std::vector<int> sizes;
    if (m == 1) {
        sizes = {1};
    } else if (j0 <= 1) {
        sizes = {m};
    } else {
        sizes.push_back(2);
        for (int k = 2; k <= j0 - 1; ++k) sizes.push_back(1 << (k - 1));
        sizes.push_back(m - (1 << (j0 - 1)));
    }
    double dpq = (spec.p == kInf ? 0.0 : 1.0 / spec.p) - (spec.q == kInf ? 0.0 : 1.0 / spec.q);
    int offset = 0;
    for (std::size_t k = 0; k < sizes.size(); ++k) {
        DyadicBlock b;
        b.index = static_cast<int>(k) + 1;
        b.offset = offset;
        b.size = sizes[k];
        b.scale = std::pow(static_cast<double>(m) / std::pow(2.0, static_cast<double>(k)),
                           dpq / gamma);
        b.sub_budget = static_cast<int>(std::floor(static_cast<double>(k_budget) * sizes[k] / m));
        out.blocks.push_back(b);
        offset += sizes[k];
    }
    return out;
}

double schuett_value(int k, int m, double p, double q) {
    if (k < 1 || m < 1) throw std::invalid_argument("schuett_value: k, m >= 1 required");
    validate_pq(p, q);
    double ip = p == kInf ? 0.0 : 1.0 / p;
    double iq = q == kInf ? 0.0 : 1.0 / q;
    if (q < p) return std::pow(2.0, -static_cast<double>(k) / (2.0 * m)) * std::pow(m, iq - ip);
    double kb = static_cast<double>(k);
    if (kb >= 2.0 * m)
        return std::pow(2.0, -kb / (2.0 * m)) * std::pow(m, iq - ip);
    if (kb < std::log2(2.0 * m)) return 1.0;
    return std::pow(std::log2(1.0 + static_cast<double>(m) / kb) / kb, ip - iq);
}

double remark37_bound(int n, int m, double p, double q, double gamma) {
    if (n < 1 || m < 1) throw std::invalid_argument("remark37_bound: n, m >= 1 required");
    validate_pq(p, q);
    if (!(gamma > 0.0)) throw std::domain_error("remark37_bound: gamma must be positive");
    double ip = p == kInf ? 0.0 : 1.0 / p;
    double iq = q == kInf ? 0.0 : 1.0 / q;
    double dpq = ip - iq;
    double front = std::pow(static_cast<double>(m) / n, dpq / gamma);
    double nb = static_cast<double>(n);
    if (nb >= 2.0 * m) return front * std::pow(2.0, -nb / (8.0 * m)) * std::pow(m, -dpq);
    if (nb <= std::log2(2.0 * m)) return front;
    return front * std::pow(nb, -dpq);
}

double log_ball_volume(int m, double p) {
    if (p == kInf) return m * std::log(2.0);
    return m * std::log(2.0 * std::exp(std::lgamma(1.0 + 1.0 / p))) -
           std::lgamma(1.0 + static_cast<double>(m) / p);
}

UpperCertificate entropy_upper(const BallSpec& spec, int k, std::uint64_t seed) {
    validate_spec(spec);
    if (k < 0) throw std::invalid_argument("entropy_upper: k must be >= 0");
    if (spec.m > 24) throw std::invalid_argument("entropy_upper: desk scale limits m <= 24");
    std::vector<double> D = diag_scales(spec);
    const int m = spec.m;
    const double p = spec.p, q = spec.q;

    UpperCertificate best;
    best.method = UpperMethod::net;
    best.radius = diag_opnorm(D, p, q); // one center at the origin, exact
    best.log2_count = 0.0;
    best.centers = {std::vector<double>(static_cast<std::size_t>(m), 0.0)};

    bool uniform = spec.weights.empty();
    double D0 = D[0];

    if (k >= 1 && m == 1) {
        UpperCertificate c;
        c.method = UpperMethod::lattice;
        c.step = std::pow(2.0, 1.0 - k);
        c.radius = D0 * std::pow(2.0, -static_cast<double>(k));
        c.log2_count = k;
        if (c.radius < best.radius) best = c;
    } else if (k >= 1) {
        LatticeSearch ls = search_lattice_step(p, m, k);
        if (ls.found) {
            UpperCertificate c;
            c.method = UpperMethod::lattice;
            c.step = ls.h;
            c.log2_count = ls.log2_count;
            std::vector<double> err(static_cast<std::size_t>(m));
            for (int i = 0; i < m; ++i) err[static_cast<std::size_t>(i)] = 0.5 * ls.h * D[static_cast<std::size_t>(i)];
            c.radius = lq_norm(err, q);
            if (c.radius < best.radius) best = c;
        }
        if (uniform && p < q) {
            for (int s = 1; s <= m; ++s) {
                double extra = log2_binom(m, s);
                if (extra > k) continue;
                double tail;
                if (s == m) tail = 0.0;
                else if (q == kInf) tail = std::pow(s + 1.0, -1.0 / p);
                else tail = std::pow(p / (q - p), 1.0 / q) *
                            std::pow(static_cast<double>(s), -(1.0 / p - 1.0 / q));
                LatticeSearch sub = search_lattice_step(p, s, k, extra);
                if (!sub.found) continue;
                double quant = (q == kInf) ? 0.5 * sub.h
                                           : 0.5 * sub.h * std::pow(static_cast<double>(s), 1.0 / q);
                double radius = D0 * (tail + quant);
                if (radius < best.radius) {
                    best = UpperCertificate{};
                    best.method = UpperMethod::schuett_construction;
                    best.step = sub.h;
                    best.sparsity = s;
                    best.log2_count = sub.log2_count;
                    best.radius = radius;
                }
            }
        }
    }

    if (m <= 3 && k <= 8) {
        double slack_u = 0.0;
        auto cloud = ball_cloud(D, p, m, 200000, seed, false, &slack_u);
        std::vector<double> serr(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i) serr[static_cast<std::size_t>(i)] = slack_u * D[static_cast<std::size_t>(i)];
        double slack = lq_norm(serr, q);
        std::size_t T = static_cast<std::size_t>(1) << k;
        // farthest-point traversal (Gonzalez)
        std::vector<std::size_t> centers;
        std::vector<double> mind(cloud.size(), kInf);
        std::size_t cur = 0; // start at the origin entry
        double worst = kInf;
        for (std::size_t t = 0; t < T && t < cloud.size(); ++t) {
            centers.push_back(cur);
            worst = 0.0;
            std::size_t nxt = cur;
            for (std::size_t i = 0; i < cloud.size(); ++i) {
                double d = dist_q(cloud[i], cloud[cur], q);
                mind[i] = std::min(mind[i], d);
                if (mind[i] > worst) {
                    worst = mind[i];
                    nxt = i;
                }
            }
            cur = nxt;
        }
        double radius = worst + slack;
        if (radius < best.radius) {
            best = UpperCertificate{};
            best.method = UpperMethod::net;
            best.radius = radius;
            best.log2_count = centers.empty() ? 0.0 : std::log2(static_cast<double>(centers.size()));
            best.sample_slack = slack;
            for (std::size_t c : centers) best.centers.push_back(cloud[c]);
        }
    }
    return best;
}

LowerCertificate entropy_lower(const BallSpec& spec, int k, std::uint64_t seed) {
    validate_spec(spec);
    if (k < 0) throw std::invalid_argument("entropy_lower: k must be >= 0");
    if (spec.m > 24) throw std::invalid_argument("entropy_lower: desk scale limits m <= 24");
    std::vector<double> D = diag_scales(spec);
    const int m = spec.m;
    const double p = spec.p, q = spec.q;

    LowerCertificate best;
    best.method = LowerMethod::volume;
    double logv = 0.0;
    for (double d : D) logv += std::log(d);
    logv += log_ball_volume(m, p) - log_ball_volume(m, q);
    best.value = std::pow(2.0, -static_cast<double>(k) / m) * std::exp(logv / m);

    auto consider_packing = [&](double value, int points, double mind,
                                const std::vector<std::vector<double>>* pts) {
        if (value > best.value) {
            best.method = LowerMethod::packing;
            best.value = value;
            best.points = points;
            best.min_pair_dist = mind;
            best.packing.clear();
            if (pts && pts->size() <= 4096) best.packing = *pts;
        }
    };

    // axis chain: 2^k + 1 collinear points along the widest axis
    {
        double dmax = 0.0;
        for (double d : D) dmax = std::max(dmax, d);
        if (k <= 40) {
            double spacing = 2.0 * dmax / std::pow(2.0, static_cast<double>(k));
            consider_packing(0.5 * spacing * (1.0 - 1e-12), (1 << std::min(k, 30)) + 1, spacing,
                             nullptr);
        }
    }
    // +/- basis vectors (2m points, pairwise distance >= 2^(1/q) min D)
    if ((1 << std::min(k, 30)) < 2 * m) {
        double mind = kInf;
        for (int i = 0; i < m; ++i) {
            mind = std::min(mind, 2.0 * D[static_cast<std::size_t>(i)]);
            for (int j = i + 1; j < m; ++j) {
                double dij = q == kInf
                                 ? std::max(D[static_cast<std::size_t>(i)], D[static_cast<std::size_t>(j)])
                                 : std::pow(std::pow(D[static_cast<std::size_t>(i)], q) +
                                                std::pow(D[static_cast<std::size_t>(j)], q),
                                            1.0 / q);
                mind = std::min(mind, dij);
            }
        }
        consider_packing(0.5 * mind * (1.0 - 1e-12), 2 * m, mind, nullptr);
    }
    // greedy farthest-point packing over a sampled cloud
    if (k <= 13) {
        std::size_t T = (static_cast<std::size_t>(1) << k) + 1;
        std::size_t cloud_target = std::min<std::size_t>(m <= 3 ? 120000 : 24000,
                                                         std::max<std::size_t>(6 * T, 6000));
        auto cloud = ball_cloud(D, p, m, cloud_target, seed, true, nullptr);
        if (cloud.size() >= T && T * cloud.size() <= 40000000) {
            std::size_t budget = 12000000;
            int restarts = static_cast<int>(std::clamp<std::size_t>(budget / (T * cloud.size() + 1), 1, 64));
            Rng rng(seed ^ 0x9ac4ULL);
            double bestmind = 0.0;
            std::vector<std::size_t> bestsel;
            for (int r = 0; r < restarts; ++r) {
                std::size_t cur = r == 0 ? 1 % cloud.size() : rng.below(cloud.size());
                std::vector<double> mind(cloud.size(), kInf);
                std::vector<std::size_t> sel;
                double dlast = kInf;
                for (std::size_t t = 0; t < T; ++t) {
                    sel.push_back(cur);
                    double worst = 0.0;
                    std::size_t nxt = cur;
                    for (std::size_t i = 0; i < cloud.size(); ++i) {
                        double d = dist_q(cloud[i], cloud[cur], q);
                        mind[i] = std::min(mind[i], d);
                        if (mind[i] > worst) {
                            worst = mind[i];
                            nxt = i;
                        }
                    }
                    if (t + 1 < T) dlast = worst;
                    cur = nxt;
                }
                if (dlast > bestmind) {
                    bestmind = dlast;
                    bestsel = sel;
                }
            }
            if (bestmind > 0.0 && bestmind < kInf) {
                std::vector<std::vector<double>> pts;
                for (std::size_t i : bestsel) pts.push_back(cloud[i]);
                consider_packing(0.5 * bestmind * (1.0 - 1e-12), static_cast<int>(T), bestmind,
                                 &pts);
            }
        }
    }
    return best;
}

EntropyBracket entropy_bracket(const BallSpec& spec, int k, std::uint64_t seed) {
    EntropyBracket br;
    br.k = k;
    br.upper_cert = entropy_upper(spec, k, seed);
    br.lower_cert = entropy_lower(spec, k, seed);
    br.upper = br.upper_cert.radius;
    br.lower = br.lower_cert.value;
    br.upper_method = br.upper_cert.method;
    br.lower_method = br.lower_cert.method;
    if (br.lower > br.upper * (1.0 + 1e-9))
        throw std::runtime_error("entropy_bracket: lower bound exceeded upper bound");
    br.lower = std::min(br.lower, br.upper);
    return br;
}

} // namespace dunkl
