#include "core/runner.hpp"

#include "core/ball_entropy.hpp"
#include "core/harmonics.hpp"
#include "core/rng.hpp"
#include "core/sobolev.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>

namespace dunkl {

using nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_pq(const json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    const auto& v = j.at(key);
    if (v.is_string()) {
        std::string s = v.get<std::string>();
        if (s == "inf" || s == "infinity" || s == "Inf") return kInf;
        throw std::invalid_argument(std::string("config: bad norm index '") + s + "'");
    }
    return v.get<double>();
}

json pq_to_json(double p) {
    if (p == kInf) return json("inf");
    return json(p);
}

std::uint64_t seed_of(const json& j, std::uint64_t override_seed, bool has_override) {
    if (has_override) return override_seed;
    return j.value("seed", static_cast<std::uint64_t>(0));
}

DunklWeight weight_from_json(const json& cfg) {
    if (cfg.contains("root_system")) {
        return DunklWeight(parse_root_system(cfg.at("root_system").get<std::string>()));
    }
    if (cfg.contains("root_system_file")) {
        std::ifstream in(cfg.at("root_system_file").get<std::string>());
        if (!in) throw std::invalid_argument("config: cannot open root_system_file");
        std::stringstream ss;
        ss << in.rdbuf();
        return DunklWeight(parse_root_system(ss.str()));
    }
    if (cfg.contains("kappa")) {
        std::vector<double> kappa = cfg.at("kappa").get<std::vector<double>>();
        if (cfg.contains("d") && cfg.at("d").get<int>() != static_cast<int>(kappa.size()))
            throw std::invalid_argument("config: d and kappa length disagree");
        return DunklWeight::z2d(kappa);
    }
    if (!cfg.contains("d")) throw std::invalid_argument("config: need d with kappa or a root system");
    int d = cfg.at("d").get<int>();
    return DunklWeight::z2d(std::vector<double>(static_cast<std::size_t>(d), 0.0));
}

json point_to_json(const Point& p) {
    json a = json::array();
    for (int i = 0; i < p.dim; ++i) a.push_back(p[i]);
    return a;
}

Point point_from_json(const json& a, int dim) {
    return make_point(dim, a.at(0).get<double>(), a.at(1).get<double>(),
                      dim == 3 ? a.at(2).get<double>() : 0.0);
}

PipelineConfig pipeline_from_json(const json& cfg) {
    PipelineConfig pc{weight_from_json(cfg),
                      cfg.value("r", 2.0),
                      parse_pq(cfg, "p", 2.0),
                      parse_pq(cfg, "q", 2.0),
                      cfg.value("rho", 0.1),
                      cfg.value("beta", 0.0),
                      {}};
    if (cfg.contains("n_grid")) pc.n_grid = cfg.at("n_grid").get<std::vector<int>>();
    validate_pipeline_config(pc);
    return pc;
}

json run_nodes(const json& cfg, std::uint64_t seed, std::string* csv) {
    int d = cfg.at("d").get<int>();
    double eps = cfg.at("eps").get<double>();
    SeparatedSet set = build_maximal_separated_set(d, eps, seed);
    json out;
    out["d"] = d;
    out["eps"] = eps;
    out["seed"] = seed;
    out["count"] = set.points.size();
    out["separation"] = set.separation;
    out["min_pairwise"] = set.min_pairwise;
    out["covering_radius"] = set.covering_radius;
    if (set.points.size() <= 4096) {
        json pts = json::array();
        for (const auto& p : set.points) pts.push_back(point_to_json(p));
        out["points"] = pts;
    }
    if (csv) {
        std::string s = d == 2 ? "x,y\n" : "x,y,z\n";
        for (const auto& p : set.points) {
            s += fmt_double(p[0]) + "," + fmt_double(p[1]);
            if (d == 3) s += "," + fmt_double(p[2]);
            s += "\n";
        }
        *csv = s;
    }
    return out;
}

json run_cubature(const json& cfg, std::uint64_t seed, std::string* csv) {
    DunklWeight w = weight_from_json(cfg);
    int degree = cfg.at("degree").get<int>();
    double delta = cfg.value("delta", 0.25);
    double tol = cfg.value("tol", 1e-8);
    CubatureRule rule = solve_with_retry(w, degree, delta, tol, seed);
    json out = json::parse(rule_to_json(rule, w));
    double mass = 0.0;
    for (double lw : rule.weights) mass += lw;
    out["mass"] = mass;
    out["exactness_200"] = exactness_check(rule, w, degree, cfg.value("trials", 200), seed + 1);
    if (csv) {
        std::string s = w.dim() == 2 ? "x,y,weight\n" : "x,y,z,weight\n";
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            const auto& p = rule.nodes[i];
            s += fmt_double(p[0]) + "," + fmt_double(p[1]);
            if (w.dim() == 3) s += "," + fmt_double(p[2]);
            s += "," + fmt_double(rule.weights[i]) + "\n";
        }
        *csv = s;
    }
    return out;
}

json run_mz(const json& cfg, std::uint64_t seed, std::string* csv) {
    DunklWeight w = weight_from_json(cfg);
    int n = cfg.at("n").get<int>();
    double delta = cfg.value("delta", w.dim() == 3 ? 1.0 : 0.25);
    double tol = cfg.value("tol", 1e-8);
    int trials = cfg.value("trials", 200);
    CubatureRule rule;
    if (cfg.contains("rule_file")) {
        std::ifstream in(cfg.at("rule_file").get<std::string>());
        if (!in) throw std::invalid_argument("config: cannot open rule_file");
        std::stringstream ss;
        ss << in.rdbuf();
        rule = rule_from_json(ss.str());
        if (rule.dim != w.dim()) throw std::invalid_argument("rule_file: dimension mismatch");
    } else {
        rule = solve_with_retry(w, 3 * n, delta, tol, seed);
    }
    std::vector<double> ps;
    if (cfg.contains("p_list"))
        for (const auto& v : cfg.at("p_list")) ps.push_back(parse_pq(json{{"p", v}}, "p", 2.0));
    else
        ps = {1.0, 2.0, kInf};
    json out;
    out["n"] = n;
    out["rule_degree"] = rule.exact_degree;
    out["rule_nodes"] = rule.nodes.size();
    out["trials"] = trials;
    json brackets = json::array();
    std::string s = "p,lo,hi\n";
    for (double p : ps) {
        MzBracket br = mz_check(rule, w, n, p, trials, seed + 17);
        json b;
        b["p"] = pq_to_json(p);
        b["lo"] = br.lo;
        b["hi"] = br.hi;
        brackets.push_back(b);
        s += (p == kInf ? std::string("inf") : fmt_double(p)) + "," + fmt_double(br.lo) + "," +
             fmt_double(br.hi) + "\n";
    }
    out["brackets"] = brackets;
    if (csv) *csv = s;
    return out;
}

// named test-corpus fields: constant, coordinate-monomial(alpha),
// cap-indicator(center, radius), bump(center, scale),
// band-limited-random(degree, seed)
ScalarField field_from_json(const json& spec, const DunklWeight& w, std::uint64_t seed,
                            std::shared_ptr<HarmonicAnalyzer>* keep_alive) {
    std::string type = spec.at("type").get<std::string>();
    if (type == "constant") return constant_field(spec.value("value", 1.0));
    if (type == "coordinate-monomial")
        return coordinate_monomial_field(spec.at("alpha").get<std::vector<int>>());
    if (type == "cap-indicator")
        return cap_indicator_field(point_from_json(spec.at("center"), w.dim()),
                                   spec.at("radius").get<double>());
    if (type == "bump")
        return bump_field(point_from_json(spec.at("center"), w.dim()),
                          spec.at("scale").get<double>());
    if (type == "band-limited-random") {
        int degree = spec.at("degree").get<int>();
        auto an = std::make_shared<HarmonicAnalyzer>(w, degree);
        Expansion e = an->random_bandlimited(degree, spec.value("seed", seed));
        std::vector<double> raw = an->to_raw_coeffs(e);
        if (keep_alive) *keep_alive = an;
        return [an, raw](const Point& x) { return an->eval_raw(raw, x); };
    }
    throw std::invalid_argument("config: unknown corpus field type '" + type + "'");
}

json run_kernel(const json& cfg, std::uint64_t seed, std::string* csv) {
    DunklWeight w = weight_from_json(cfg);
    int n = cfg.at("n").get<int>();
    int pairs = cfg.value("pairs", 8);
    Rng rng(seed);
    json out;
    out["n"] = n;
    json table = json::array();
    std::string s = "k,x_angle_or_ct,y_angle_or_ct,P_k,L_rows\n";
    std::vector<std::pair<Point, Point>> xy;
    for (int i = 0; i < pairs; ++i) {
        Point x = w.dim() == 2 ? from_angle(rng.uniform(0.0, 2.0 * kPi))
                               : from_spherical(rng.uniform(-1.0, 1.0), rng.uniform(0.0, 2.0 * kPi));
        Point y = w.dim() == 2 ? from_angle(rng.uniform(0.0, 2.0 * kPi))
                               : from_spherical(rng.uniform(-1.0, 1.0), rng.uniform(0.0, 2.0 * kPi));
        xy.push_back({x, y});
    }
    for (int k = 0; k <= n; ++k) {
        json row;
        row["k"] = k;
        json vals = json::array();
        for (auto& [x, y] : xy) vals.push_back(kernel_P(w, k, x, y));
        row["P"] = vals;
        table.push_back(row);
    }
    out["kernel_table"] = table;
    json lrow = json::array();
    for (auto& [x, y] : xy) lrow.push_back(kernel_L(w, std::max(1, n), x, y));
    out["L_n"] = lrow;

    // eta_n reproduction of a random polynomial in Pi_n (where the
    // orthonormal machinery applies), plus eta_n residuals on the corpus
    if (w.dim() == 2 || w.is_unweighted()) {
        HarmonicAnalyzer an(w, 2 * std::max(1, n));
        Expansion f = an.random_bandlimited(n, seed + 5);
        Expansion g = an.eta_n(f, std::max(1, n));
        double worst = 0.0;
        for (int i = 0; i < 64; ++i) {
            Point x = w.dim() == 2 ? from_angle(2.0 * kPi * i / 64.0)
                                   : from_spherical(-1.0 + 2.0 * (i + 0.5) / 64.0, 2.39996 * i);
            worst = std::max(worst, std::abs(an.eval(f, x) - an.eval(g, x)));
        }
        out["eta_reproduction_sup_error"] = worst;

        if (cfg.contains("corpus")) {
            json rows = json::array();
            for (const auto& spec : cfg.at("corpus")) {
                std::shared_ptr<HarmonicAnalyzer> keep;
                ScalarField field = field_from_json(spec, w, seed, &keep);
                Expansion fc = an.expand(field);
                Expansion gc = an.eta_n(fc, std::max(1, n));
                Expansion diff = fc;
                for (std::size_t j = 0; j < diff.coeffs.size(); ++j)
                    diff.coeffs[j] -= gc.coeffs[j];
                json row;
                row["type"] = spec.at("type");
                row["eta_residual_l1"] = an.norm(diff, 1.0);
                row["eta_residual_l2"] = an.norm2(diff);
                rows.push_back(row);
            }
            out["corpus"] = rows;
        }
    }
    if (csv) {
        for (int k = 0; k <= n; ++k) {
            s += std::to_string(k);
            for (const auto& v : table[static_cast<std::size_t>(k)]["P"])
                s += "," + fmt_double(v.get<double>());
            s += "\n";
        }
        *csv = s;
    }
    return out;
}

json run_lemma31(const json& cfg, std::uint64_t seed, std::string* csv) {
    DunklWeight w = weight_from_json(cfg);
    std::vector<double> mults = cfg.value("beta_multipliers", std::vector<double>{0.25, 0.5, 0.75, 0.95});
    std::vector<int> ns = cfg.value("n_list", std::vector<int>{8, 16, 32, 64});
    double delta = cfg.value("delta", w.dim() == 3 ? 1.0 : 0.25);
    double tol = cfg.value("tol", 1e-8);
    double cap = w.gamma_kappa() > 0.0 ? 1.0 / (2.0 * w.gamma_kappa()) : 1.0;
    json out;
    out["beta_cap"] = cap;
    json rows = json::array();
    std::string s = "beta,n,ratio\n";
    std::vector<CubatureRule> rules;
    for (int n : ns) rules.push_back(solve_with_retry(w, n, delta, tol, seed));
    for (double m : mults) {
        double beta = m * cap;
        json row;
        row["beta"] = beta;
        json ratios = json::array();
        double lo = kInf, hi = 0.0;
        for (std::size_t i = 0; i < ns.size(); ++i) {
            double ratio = lemma31_ratio(rules[i], w, beta, ns[i]);
            ratios.push_back(ratio);
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
            s += fmt_double(beta) + "," + std::to_string(ns[i]) + "," + fmt_double(ratio) + "\n";
        }
        row["ratios"] = ratios;
        row["max_over_min"] = hi / lo;
        rows.push_back(row);
    }
    out["n_list"] = ns;
    out["rows"] = rows;
    if (csv) *csv = s;
    return out;
}

json run_ball_entropy(const json& cfg, std::uint64_t seed, std::string* csv) {
    BallSpec spec;
    spec.m = cfg.at("m").get<int>();
    spec.p = parse_pq(cfg, "p", 1.0);
    spec.q = parse_pq(cfg, "q", 2.0);
    if (cfg.contains("weights")) spec.weights = cfg.at("weights").get<std::vector<double>>();
    std::vector<int> ks = cfg.value("k_list", std::vector<int>{1, 2, 4, 8});
    json out;
    out["m"] = spec.m;
    out["p"] = pq_to_json(spec.p);
    out["q"] = pq_to_json(spec.q);
    json rows = json::array();
    std::string s = "k,lower,upper,schuett,lower_method,upper_method\n";
    for (int k : ks) {
        EntropyBracket br = entropy_bracket(spec, k, seed);
        json row;
        row["k"] = k;
        row["lower"] = br.lower;
        row["upper"] = br.upper;
        row["schuett"] = k >= 1 ? schuett_value(k, spec.m, spec.p, spec.q) : 1.0;
        row["lower_method"] = br.lower_method == LowerMethod::packing ? "packing" : "volume";
        row["upper_method"] = br.upper_method == UpperMethod::net
                                  ? "net"
                                  : (br.upper_method == UpperMethod::lattice ? "lattice"
                                                                             : "schuett_construction");
        row["upper_log2_count"] = br.upper_cert.log2_count;
        if (!br.upper_cert.centers.empty() && br.upper_cert.centers.size() <= 4096)
            row["centers"] = br.upper_cert.centers;
        if (!br.lower_cert.packing.empty() && br.lower_cert.packing.size() <= 4096)
            row["packing"] = br.lower_cert.packing;
        rows.push_back(row);
        s += std::to_string(k) + "," + fmt_double(br.lower) + "," + fmt_double(br.upper) + "," +
             fmt_double(row["schuett"].get<double>()) + "," +
             row["lower_method"].get<std::string>() + "," +
             row["upper_method"].get<std::string>() + "\n";
    }
    out["brackets"] = rows;
    if (csv) *csv = s;
    return out;
}

json run_sobolev_upper(const json& cfg, std::uint64_t, std::string* csv) {
    PipelineConfig pc = pipeline_from_json(cfg);
    if (pc.n_grid.empty()) throw std::invalid_argument("config: n_grid required");
    json out;
    json vals = json::array();
    std::string s = "n,upper\n";
    std::vector<long long> ns;
    std::vector<double> us;
    for (int n : pc.n_grid) {
        double v = upper_bound_value(n, pc);
        vals.push_back({{"n", n}, {"upper", v}});
        ns.push_back(n);
        us.push_back(v);
        s += std::to_string(n) + "," + fmt_double(v) + "\n";
    }
    out["values"] = vals;
    if (ns.size() >= 4) {
        RateReport rep = rate_regression(ns, us, -pc.r / (pc.weight.dim() - 1));
        out["slope"] = rep.slope;
        out["target_exponent"] = rep.target_exponent;
    }
    if (csv) *csv = s;
    return out;
}

json run_sobolev_lower(const json& cfg, std::uint64_t seed, std::string* csv) {
    PipelineConfig pc = pipeline_from_json(cfg);
    if (pc.n_grid.empty()) throw std::invalid_argument("config: n_grid required");
    json out;
    json vals = json::array();
    std::string s = "n,lower,factor,l,N,embed_K\n";
    for (int n : pc.n_grid) {
        LowerBoundResult lb = lower_bound_value(n, pc, seed);
        vals.push_back({{"n", n},
                        {"lower", lb.value},
                        {"factor", lb.factor},
                        {"l", lb.l},
                        {"N", lb.N},
                        {"embed_K", lb.embed_K},
                        {"ball_lower", lb.ball_lower}});
        s += std::to_string(n) + "," + fmt_double(lb.value) + "," + fmt_double(lb.factor) + "," +
             std::to_string(lb.l) + "," + std::to_string(lb.N) + "," + fmt_double(lb.embed_K) +
             "\n";
    }
    out["values"] = vals;
    if (csv) *csv = s;
    return out;
}

json run_rate(const json& cfg, std::uint64_t seed, std::string* csv) {
    PipelineConfig pc = pipeline_from_json(cfg);
    if (pc.n_grid.size() < 4) throw std::invalid_argument("config: rate needs >= 4 grid points");
    json out;
    std::vector<long long> ns;
    std::vector<double> uppers;
    std::vector<double> lowers;
    for (int n : pc.n_grid) {
        ns.push_back(n);
        uppers.push_back(upper_bound_value(n, pc));
        if (n <= 12 && n >= 2) {
            lowers.push_back(lower_bound_value(n, pc, seed).value);
        } else {
            lowers.push_back(std::numeric_limits<double>::quiet_NaN());
        }
    }
    double target = -pc.r / (pc.weight.dim() - 1);
    RateReport rep = rate_regression(ns, uppers, target);
    out["target_exponent"] = target;
    out["slope"] = rep.slope;
    out["intercept"] = rep.intercept;
    out["max_residual"] = rep.max_residual;
    json vals = json::array();
    std::string s = "n,upper,lower,slope_so_far\n";
    for (std::size_t i = 0; i < ns.size(); ++i) {
        json row;
        row["n"] = ns[i];
        row["upper"] = uppers[i];
        if (!std::isnan(lowers[i])) row["lower"] = lowers[i];
        double slope_so_far = std::numeric_limits<double>::quiet_NaN();
        if (i + 1 >= 2) {
            std::vector<long long> nn(ns.begin(), ns.begin() + static_cast<std::ptrdiff_t>(i) + 1);
            std::vector<double> vv(uppers.begin(), uppers.begin() + static_cast<std::ptrdiff_t>(i) + 1);
            double sx = 0, sy = 0, sxx = 0, sxy = 0;
            for (std::size_t j = 0; j < nn.size(); ++j) {
                double x = std::log(static_cast<double>(nn[j])), y = std::log(vv[j]);
                sx += x; sy += y; sxx += x * x; sxy += x * y;
            }
            double m = static_cast<double>(nn.size());
            slope_so_far = (m * sxy - sx * sy) / (m * sxx - sx * sx);
            row["slope_so_far"] = slope_so_far;
        }
        vals.push_back(row);
        s += std::to_string(ns[i]) + "," + fmt_double(uppers[i]) + ",";
        if (!std::isnan(lowers[i])) s += fmt_double(lowers[i]);
        s += ",";
        if (!std::isnan(slope_so_far)) s += fmt_double(slope_so_far);
        s += "\n";
    }
    out["trace"] = vals;
    if (csv) *csv = s;
    return out;
}

} // namespace

std::string rule_to_json(const CubatureRule& rule, const DunklWeight& w) {
    json out;
    out["schema_version"] = 1;
    out["d"] = rule.dim;
    if (w.is_z2d()) out["kappa"] = w.z2d_kappa();
    else out["root_system"] = format_root_system(w.roots());
    out["exact_degree"] = rule.exact_degree;
    out["residual"] = rule.residual;
    out["separation"] = rule.separation;
    out["covering_radius"] = rule.covering_radius;
    out["seed"] = rule.seed;
    out["delta"] = rule.delta;
    out["weight_model_bracket"] = {rule.weight_model_bracket[0], rule.weight_model_bracket[1]};
    json nodes = json::array();
    for (const auto& p : rule.nodes) nodes.push_back(point_to_json(p));
    out["nodes"] = nodes;
    out["weights"] = rule.weights;
    return out.dump();
}

CubatureRule rule_from_json(const std::string& text) {
    json in = json::parse(text);
    CubatureRule rule;
    rule.dim = in.at("d").get<int>();
    rule.exact_degree = in.at("exact_degree").get<int>();
    rule.residual = in.at("residual").get<double>();
    rule.separation = in.at("separation").get<double>();
    rule.covering_radius = in.value("covering_radius", 0.0);
    rule.seed = in.value("seed", static_cast<std::uint64_t>(0));
    rule.delta = in.value("delta", 0.0);
    if (in.contains("weight_model_bracket")) {
        rule.weight_model_bracket[0] = in.at("weight_model_bracket").at(0).get<double>();
        rule.weight_model_bracket[1] = in.at("weight_model_bracket").at(1).get<double>();
    }
    for (const auto& p : in.at("nodes")) rule.nodes.push_back(point_from_json(p, rule.dim));
    rule.weights = in.at("weights").get<std::vector<double>>();
    if (rule.weights.size() != rule.nodes.size())
        throw std::invalid_argument("rule_from_json: nodes/weights mismatch");
    return rule;
}

DunklWeight weight_from_config_json(const std::string& config_json) {
    return weight_from_json(json::parse(config_json));
}

RunResult run_command(const std::string& command, const std::string& config_json,
                      std::uint64_t seed_override, bool has_seed_override, bool want_csv) {
    RunResult res;
    json cfg;
    try {
        cfg = config_json.empty() ? json::object() : json::parse(config_json);
    } catch (const std::exception& e) {
        res.status = RunStatus::invalid_config;
        res.message = std::string("config parse error: ") + e.what();
        return res;
    }
    try {
        std::uint64_t seed = seed_of(cfg, seed_override, has_seed_override);
        std::string csv;
        std::string* csvp = want_csv ? &csv : nullptr;
        json out;
        if (command == "nodes") out = run_nodes(cfg, seed, csvp);
        else if (command == "cubature") out = run_cubature(cfg, seed, csvp);
        else if (command == "mz") out = run_mz(cfg, seed, csvp);
        else if (command == "kernel") out = run_kernel(cfg, seed, csvp);
        else if (command == "lemma31") out = run_lemma31(cfg, seed, csvp);
        else if (command == "ball-entropy") out = run_ball_entropy(cfg, seed, csvp);
        else if (command == "sobolev-upper") out = run_sobolev_upper(cfg, seed, csvp);
        else if (command == "sobolev-lower") out = run_sobolev_lower(cfg, seed, csvp);
        else if (command == "rate") out = run_rate(cfg, seed, csvp);
        else {
            res.status = RunStatus::invalid_config;
            res.message = "unknown command: " + command;
            return res;
        }
        out["schema_version"] = 1;
        out["command"] = command;
        out["seed"] = seed;
        res.json = out.dump(2) + "\n";
        res.csv = csv;
        return res;
    } catch (const construction_error& e) {
        res.status = RunStatus::infeasible;
        res.message = e.what();
    } catch (const capability_error& e) {
        res.status = RunStatus::capability;
        res.message = e.what();
    } catch (const json::exception& e) {
        res.status = RunStatus::invalid_config;
        res.message = e.what();
    } catch (const std::invalid_argument& e) {
        res.status = RunStatus::invalid_config;
        res.message = e.what();
    } catch (const std::domain_error& e) {
        res.status = RunStatus::invalid_config;
        res.message = e.what();
    } catch (const std::exception& e) {
        res.status = RunStatus::assertion_failed;
        res.message = e.what();
    }
    return res;
}

} // namespace dunkl
