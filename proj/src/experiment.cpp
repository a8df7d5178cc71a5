#include "hyperlin/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "hyperlin/conjugacy.hpp"
#include "hyperlin/funceq.hpp"
#include "hyperlin/holder.hpp"
#include "hyperlin/manifolds.hpp"
#include "hyperlin/numerics.hpp"
#include "hyperlin/whitney.hpp"

namespace hyperlin::experiment {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_double(const KeyValues& kv, const std::string& key, double def) {
    auto it = kv.find(key);
    if (it == kv.end()) return def;
    try {
        return std::stod(it->second);
    } catch (...) {
        throw ConfigError("config field '" + key + "': not a number: " + it->second);
    }
}

long parse_long(const KeyValues& kv, const std::string& key, long def) {
    auto it = kv.find(key);
    if (it == kv.end()) return def;
    try {
        return std::stol(it->second);
    } catch (...) {
        throw ConfigError("config field '" + key + "': not an integer: " + it->second);
    }
}

std::string parse_string(const KeyValues& kv, const std::string& key,
                         const std::string& def) {
    auto it = kv.find(key);
    return it == kv.end() ? def : it->second;
}

}  // namespace

KeyValues parse_config_text(const std::string& text) {
    KeyValues kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty())
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": empty key or value");
        kv[key] = val;
    }
    return kv;
}

KeyValues parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

const std::vector<std::string>& known_experiments() {
    static const std::vector<std::string> list = {
        "linearize",       "flatten",         "funceq", "whitney",
        "holder",          "poincare-sharpness", "siegel-sharpness", "curves"};
    return list;
}

ExperimentConfig validate_config(const KeyValues& raw) {
    ExperimentConfig c;
    c.experiment = parse_string(raw, "experiment", "");
    bool known = false;
    for (const auto& e : known_experiments()) known = known || e == c.experiment;
    if (!known)
        throw ConfigError("config field 'experiment': unknown experiment '" +
                          c.experiment + "'");

    const std::string fam = parse_string(raw, "map.family", "axis-bump");
    if (fam == "linear") c.family = MapFamily::Linear;
    else if (fam == "axis-bump") c.family = MapFamily::AxisBump;
    else if (fam == "poincare-counterexample") c.family = MapFamily::PoincareCounterexample;
    else if (fam == "siegel-counterexample") c.family = MapFamily::SiegelCounterexample;
    else throw ConfigError("config field 'map.family': unknown family '" + fam + "'");

    c.params.lambda1 = parse_double(raw, "map.lambda1", 0.25);
    c.params.lambda2 = parse_double(raw, "map.lambda2", 0.5);
    c.params.alpha = parse_double(raw, "map.alpha", 1.0);
    if (!(c.params.alpha > 0.0 && c.params.alpha <= 1.0))
        throw ConfigError("config field 'map.alpha': must lie in (0,1]");
    if (spectral::classify_domain(c.params) == spectral::DomainKind::Invalid)
        throw ConfigError(
            "config field 'map.lambda1/map.lambda2': eigenvalues must be "
            "hyperbolic (nonzero, off the unit circle)");
    const spectral::Normalized norm = spectral::normalize_to_contraction(c.params);
    c.params = norm.params;
    c.inverted_for_contraction = norm.flipped;

    c.bump.inner_radius = parse_double(raw, "bump.inner_radius", 0.1);
    c.bump.outer_radius = parse_double(raw, "bump.outer_radius", 0.2);
    try {
        c.bump.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config field 'bump.*': ") + e.what());
    }

    c.grid.radius = parse_double(raw, "grid.radius", 0.05);
    c.grid.n = static_cast<int>(parse_long(raw, "grid.n", 101));
    try {
        c.grid.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config field 'grid.*': ") + e.what());
    }
    const bool needs_local_grid =
        c.experiment == "linearize" || c.experiment == "flatten";
    if (needs_local_grid && c.grid.radius > c.bump.inner_radius)
        throw ConfigError("config field 'grid.radius': " +
                          std::to_string(c.grid.radius) +
                          " exceeds bump.inner_radius " +
                          std::to_string(c.bump.inner_radius) +
                          " (conjugacy runs need the unmodified region)");

    c.tol = parse_double(raw, "tol", 1e-10);
    if (!(c.tol > 0)) throw ConfigError("config field 'tol': must be > 0");
    c.max_iter = static_cast<int>(parse_long(raw, "max_iter", 200));
    if (c.max_iter < 1) throw ConfigError("config field 'max_iter': must be >= 1");
    c.seed = static_cast<std::uint64_t>(parse_long(raw, "seed", 1));
    c.threads = static_cast<int>(parse_long(raw, "threads", 1));
    if (c.threads < 1) throw ConfigError("config field 'threads': must be >= 1");

    c.xi = parse_double(raw, "sharpness.xi", 0.5 * c.bump.inner_radius);
    c.omega = parse_double(raw, "sharpness.omega", 0.25 * c.bump.inner_radius);
    if (!(c.xi > 0) || c.xi > c.bump.inner_radius)
        throw ConfigError("config field 'sharpness.xi': must lie in (0, bump.inner_radius]");
    if (!(c.omega > 0) || c.omega > c.bump.inner_radius)
        throw ConfigError("config field 'sharpness.omega': must lie in (0, bump.inner_radius]");
    c.level_min_k = static_cast<int>(parse_long(raw, "sharpness.min_k", 6));
    c.level_max_k = static_cast<int>(parse_long(raw, "sharpness.max_k", 16));
    if (c.level_min_k < 0 || c.level_max_k <= c.level_min_k)
        throw ConfigError("config field 'sharpness.min_k/max_k': need 0 <= min_k < max_k");
    c.beta_probe_delta = parse_double(raw, "sharpness.beta_delta", 0.1);

    c.quantile = parse_double(raw, "holder.quantile", 0.95);
    if (!(c.quantile > 0.0 && c.quantile <= 1.0))
        throw ConfigError("config field 'holder.quantile': must lie in (0,1]");
    c.pairs_per_bin = parse_long(raw, "holder.pairs_per_bin", 10000);
    if (c.pairs_per_bin < 100)
        throw ConfigError("config field 'holder.pairs_per_bin': must be >= 100");

    c.figure = static_cast<int>(parse_long(raw, "curves.figure", 0));
    if (c.figure < 0 || c.figure > 4)
        throw ConfigError("config field 'curves.figure': must be 0 (auto) or 1..4");
    c.alpha_min = parse_double(raw, "curves.alpha_min", 0.05);
    c.alpha_max = parse_double(raw, "curves.alpha_max", 1.0);
    c.alpha_count = static_cast<int>(parse_long(raw, "curves.alpha_count", 96));
    if (!(c.alpha_min > 0.0 && c.alpha_min <= c.alpha_max && c.alpha_max <= 1.0))
        throw ConfigError("config field 'curves.alpha_min/max': need 0 < min <= max <= 1");
    if (c.alpha_count < 2) throw ConfigError("config field 'curves.alpha_count': need >= 2");

    c.axis_radius = parse_double(raw, "funceq.radius", 0.1);
    if (!(c.axis_radius > 0)) throw ConfigError("config field 'funceq.radius': must be > 0");
    c.axis_nodes = static_cast<int>(parse_long(raw, "funceq.nodes", 1025));
    if (c.axis_nodes < 33) throw ConfigError("config field 'funceq.nodes': need >= 33");
    c.synthetic_coefficients = parse_string(raw, "funceq.synthetic", "false") == "true";
    c.perturbation = parse_double(raw, "funceq.perturbation", 0.1);

    // normalized echo
    c.echo = raw;
    c.echo["experiment"] = c.experiment;
    c.echo["map.family"] = fam;
    c.echo["map.lambda1"] = format_double(c.params.lambda1);
    c.echo["map.lambda2"] = format_double(c.params.lambda2);
    c.echo["map.alpha"] = format_double(c.params.alpha);
    c.echo["map.inverted_for_contraction"] = c.inverted_for_contraction ? "true" : "false";
    c.echo["bump.inner_radius"] = format_double(c.bump.inner_radius);
    c.echo["bump.outer_radius"] = format_double(c.bump.outer_radius);
    c.echo["grid.radius"] = format_double(c.grid.radius);
    c.echo["grid.n"] = std::to_string(c.grid.n);
    c.echo["tol"] = format_double(c.tol);
    c.echo["max_iter"] = std::to_string(c.max_iter);
    c.echo["seed"] = std::to_string(c.seed);
    c.echo["sharpness.xi"] = format_double(c.xi);
    c.echo["sharpness.omega"] = format_double(c.omega);
    return c;
}

maps::PlanarMap build_map(const ExperimentConfig& cfg) {
    switch (cfg.family) {
        case MapFamily::Linear:
            return maps::linear_map(cfg.params.lambda1, cfg.params.lambda2);
        case MapFamily::AxisBump:
            return maps::make_axis_bump_map(cfg.params, cfg.bump);
        case MapFamily::PoincareCounterexample:
            return maps::make_poincare_counterexample(cfg.params, cfg.bump);
        case MapFamily::SiegelCounterexample:
            return maps::make_siegel_counterexample(cfg.params, cfg.bump);
    }
    throw ConfigError("build_map: unknown family");
}

namespace {

void parallel_for(int threads, long count, const std::function<void(long)>& body) {
    if (threads <= 1 || count < 64) {
        for (long k = 0; k < count; ++k) body(k);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<long> next{0};
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&]() {
            for (long k = next.fetch_add(64); k < count; k = next.fetch_add(64))
                for (long j = k; j < std::min(count, k + 64); ++j) body(j);
        });
    }
    for (auto& th : pool) th.join();
}

using conjugacy::IterationOptions;

IterationOptions iter_options(const ExperimentConfig& cfg) {
    IterationOptions opt;
    opt.tol = cfg.tol;
    opt.max_n = cfg.max_iter;
    opt.support_radius = cfg.family == MapFamily::Linear ? 1e-9
                                                         : 2.0 * cfg.bump.outer_radius;
    return opt;
}

Table field_table(const std::string& name, const std::string& prov,
                  const VectorField2D& phi, const MatrixField2D& dphi) {
    Table t{name, prov, {"x1", "x2", "phi1", "phi2", "dphi11", "dphi12", "dphi21",
                         "dphi22"}, {}};
    const GridSpec& g = phi.grid;
    t.rows.reserve(g.size());
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j) {
            const Vec2 x = g.point(i, j);
            const Vec2 v = phi.at(i, j);
            const Mat2 d = dphi.at(i, j);
            t.rows.push_back({x.x1, x.x2, v.x1, v.x2, d.a11, d.a12, d.a21, d.a22});
        }
    return t;
}

ResultBundle run_curves(const ExperimentConfig& cfg) {
    ResultBundle b;
    const int figure = cfg.figure == 0 ? spectral::figure_for(cfg.params) : cfg.figure;
    std::vector<double> grid(cfg.alpha_count);
    for (int i = 0; i < cfg.alpha_count; ++i)
        grid[i] = cfg.alpha_min +
                  (cfg.alpha_max - cfg.alpha_min) * i / (cfg.alpha_count - 1);
    // breakpoints belong in the table when they fall inside the range
    spectral::SpectralParams p1 = cfg.params;
    p1.alpha = 1.0;
    const spectral::DerivedExponents d = spectral::derived_exponents(p1);
    if (figure <= 2)
        for (double bp : {d.alpha0, d.alpha1})
            if (bp > cfg.alpha_min && bp < cfg.alpha_max) grid.push_back(bp);
    std::sort(grid.begin(), grid.end());
    const auto rows = spectral::sharpness_curve(figure, cfg.params, grid);
    Table t{"curve", "spectral.sharpness_curve",
            {"alpha", "beta", "differentiable_only", "open_endpoint"}, {}};
    for (const auto& r : rows)
        t.rows.push_back({r.alpha, r.beta, r.differentiable_only ? 1.0 : 0.0,
                          r.open_endpoint ? 1.0 : 0.0});
    b.tables.push_back(std::move(t));
    b.scalars["figure"] = figure;
    b.scalars["alpha0"] = d.alpha0;
    b.scalars["alpha1"] = d.alpha1;
    b.scalars["sigma"] = d.sigma;
    return b;
}

ResultBundle run_linearize(const ExperimentConfig& cfg) {
    ResultBundle b;
    const maps::PlanarMap map = build_map(cfg);
    const auto kind = spectral::classify_domain(cfg.params);
    const IterationOptions opt = iter_options(cfg);
    conjugacy::ConjugacyResult res;
    if (kind == spectral::DomainKind::Siegel) {
        res = conjugacy::linearize_siegel(map, cfg.grid, opt);
        b.notes["operation"] = "conjugacy.linearize_siegel";
    } else {
        res = conjugacy::linearize_poincare(map, cfg.grid, opt);
        b.notes["operation"] = "conjugacy.linearize_poincare";
    }
    b.scalars["residual_sup"] = res.residual_sup;
    b.scalars["iterations"] = res.iterations;
    b.scalars["converged"] = res.converged ? 1.0 : 0.0;
    b.scalars["rate_fit"] = res.rate_fit;
    b.scalars["eta_measured"] = cfg.family == MapFamily::Linear
                                    ? 0.0
                                    : maps::measure_eta(map, cfg.bump);
    Table hist{"cauchy_history", b.notes["operation"], {"n", "sup_difference"}, {}};
    for (std::size_t i = 0; i < res.cauchy_history.size(); ++i)
        hist.rows.push_back({static_cast<double>(i + 1), res.cauchy_history[i]});
    b.tables.push_back(std::move(hist));
    b.tables.push_back(field_table("phi_field", b.notes["operation"], res.phi, res.dphi));
    return b;
}

ResultBundle run_flatten(const ExperimentConfig& cfg) {
    ResultBundle b;
    const maps::PlanarMap map = build_map(cfg);
    manifolds::PsiOptions popt{cfg.tol, cfg.max_iter};
    manifolds::GraphOptions gopt;
    gopt.radius = 2.0 * cfg.bump.outer_radius;
    gopt.tol = cfg.tol;
    const manifolds::FlatteningResult fl = manifolds::flatten_poincare(map, popt, gopt);
    b.notes["operation"] = "manifolds.flatten_poincare";
    b.scalars["axis_residual"] = fl.axis_residual;
    b.scalars["linearity_residual"] = fl.linearity_residual;
    b.scalars["graph_defect"] = fl.graph.invariance_defect;
    b.scalars["graph_dg0"] = fl.graph.dg0;
    b.scalars["graph_iterations"] = fl.graph.iterations;
    const Mat2 dtheta0 = fl.theta.jacobian({0.0, 0.0});
    b.scalars["dtheta_origin_defect"] = op_norm(dtheta0 - Mat2::identity());
    Table g{"invariant_graph", "manifolds.compute_invariant_graph", {"x2", "g"}, {}};
    const auto& tab = fl.graph.g;
    for (std::size_t i = 0; i < tab.y.size(); i += 4)
        g.rows.push_back({tab.coord(i), tab.y[i]});
    b.tables.push_back(std::move(g));

    const manifolds::PsiField psi = manifolds::compute_psi(map, cfg.grid, popt);
    b.scalars["psi_identity_residual"] = psi.identity_residual;
    b.scalars["psi_rate"] = psi.rate;
    return b;
}

ResultBundle run_funceq(const ExperimentConfig& cfg) {
    ResultBundle b;
    funceq::SolveOptions opt;
    opt.radius = cfg.axis_radius;
    opt.nodes = cfg.axis_nodes;
    opt.tol = cfg.tol;
    opt.max_iter = cfg.max_iter;

    funceq::AxisSystemResult sys;
    if (cfg.synthetic_coefficients) {
        funceq::AxisCoefficients coeffs;
        coeffs.lambda1 = cfg.params.lambda1;
        coeffs.lambda2 = cfg.params.lambda2;
        coeffs.alpha = cfg.params.alpha;
        const double eps = cfg.perturbation;
        const double R = cfg.axis_radius;
        const double l1 = cfg.params.lambda1, l2 = cfg.params.lambda2;
        coeffs.f = [l1, eps, R](double s) {
            return l1 * (s + 0.5 * eps * s * s / R);
        };
        coeffs.a11 = [l1, eps, R](double s) { return l1 * (1.0 + eps * s / R); };
        coeffs.a12 = [eps, R](double s) {
            const double t = s / R;
            return std::abs(t) < 1 ? eps * std::exp(-1.0 / (1.0 - t * t)) : 0.0;
        };
        coeffs.a22 = [l2, eps, R](double s) {
            return l2 * (1.0 + 0.5 * eps * std::sin(s / R));
        };
        sys.diag_first = funceq::solve_fe_diag(coeffs, funceq::DiagonalKind::P11, opt);
        sys.diag_second = funceq::solve_fe_diag(coeffs, funceq::DiagonalKind::P22, opt);
        sys.offdiag = funceq::solve_fe_offdiag(coeffs, sys.diag_first.solution, opt);
        sys.jets.j11 = sys.diag_first.solution;
        sys.jets.j22 = sys.diag_second.solution;
        sys.jets.joff = sys.offdiag.solution;
        b.notes["coefficients"] = "synthetic perturbation";
    } else {
        const maps::PlanarMap map = build_map(cfg);
        sys = funceq::solve_axis_system(map, funceq::Axis::X1, cfg.params.alpha, opt);
        b.notes["coefficients"] = "map axis data";
    }
    b.notes["operation"] = "funceq.solve_axis_system";
    b.scalars["p11_residual"] = sys.diag_first.equation_residual;
    b.scalars["p22_residual"] = sys.diag_second.equation_residual;
    b.scalars["p12_residual"] = sys.offdiag.equation_residual;
    b.scalars["t1_measured_ratio"] = sys.diag_first.measured_ratio;
    b.scalars["t1_theory_ratio"] = sys.diag_first.theory_ratio;
    b.scalars["t2_measured_ratio"] = sys.offdiag.measured_ratio;
    b.scalars["t2_theory_ratio"] = sys.offdiag.theory_ratio;
    b.scalars["matrix_identity_residual"] = sys.matrix_identity_residual;
    b.scalars["p11_holder_seminorm"] = sys.jets.j11.holder_seminorm;
    b.scalars["p12_holder_seminorm"] = sys.jets.joff.holder_seminorm;
    Table t{"axis_jets", "funceq.solve_axis_system", {"s", "p11", "p12", "p22"}, {}};
    const auto& tab = sys.jets.j11.table;
    for (std::size_t i = 0; i < tab.y.size(); i += 8) {
        const double s = tab.coord(i);
        t.rows.push_back({s, sys.jets.j11(s), sys.jets.joff(s), sys.jets.j22(s)});
    }
    b.tables.push_back(std::move(t));
    return b;
}

ResultBundle run_whitney(const ExperimentConfig& cfg) {
    ResultBundle b;
    const maps::PlanarMap map = build_map(cfg);
    funceq::SolveOptions opt;
    opt.radius = cfg.axis_radius;
    opt.nodes = cfg.axis_nodes;
    opt.tol = cfg.tol;
    opt.max_iter = cfg.max_iter;
    const auto sys1 = funceq::solve_axis_system(map, funceq::Axis::X1, cfg.params.alpha, opt);
    const auto sys2 = funceq::solve_axis_system(map, funceq::Axis::X2, cfg.params.alpha, opt);
    const whitney::PsiStarJets jets = whitney::jet_from_axis_data(
        sys1.jets, sys2.jets, std::min(sys1.jets.j11.radius(), sys2.jets.j11.radius()),
        cfg.params.alpha);

    const whitney::WhitneyCheck chk1 = whitney::check_whitney_conditions(jets.first);
    const whitney::ExtensionField ext1 =
        whitney::whitney_extend(jets.first, cfg.grid, cfg.params.alpha);
    const whitney::ExtensionField ext2 =
        whitney::whitney_extend(jets.second, cfg.grid, cfg.params.alpha);
    const whitney::PsiStarResult psi = whitney::assemble_psi_star(
        ext1, ext2, map, 0.5 * jets.first.radius);

    b.notes["operation"] = "whitney.whitney_extend + assemble_psi_star";
    b.scalars["cube_count"] = ext1.cube_count;
    b.scalars["holder_constant"] = ext1.attained_holder_constant;
    b.scalars["axis_value_residual"] = psi.verification.axis_value_residual;
    b.scalars["axis_deriv_residual"] = psi.verification.axis_deriv_residual;
    b.scalars["origin_jacobian_defect"] = psi.verification.origin_jacobian_defect;
    Table cases{"whitney_cases", "whitney.check_whitney_conditions",
                {"case", "r00_ratio", "r10_ratio", "r01_ratio", "count"}, {}};
    for (int k = 0; k < 4; ++k)
        cases.rows.push_back({static_cast<double>(k), chk1.cases[k].r00_ratio,
                              chk1.cases[k].r10_ratio, chk1.cases[k].r01_ratio,
                              static_cast<double>(chk1.cases[k].count)});
    b.tables.push_back(std::move(cases));
    Table vals{"extension_field", "whitney.whitney_extend",
               {"x1", "x2", "value", "grad1", "grad2"}, {}};
    for (int i = 0; i < cfg.grid.n; i += 4)
        for (int j = 0; j < cfg.grid.n; j += 4) {
            const Vec2 x = cfg.grid.point(i, j);
            vals.rows.push_back({x.x1, x.x2, ext1.value.at(i, j),
                                 ext1.gradient.at(i, j).x1, ext1.gradient.at(i, j).x2});
        }
    b.tables.push_back(std::move(vals));
    return b;
}

MatrixField2D siegel_dphi_field(const ExperimentConfig& cfg, const maps::PlanarMap& map) {
    MatrixField2D field(cfg.grid);
    const IterationOptions opt = iter_options(cfg);
    const GridSpec g = cfg.grid;
    parallel_for(cfg.threads, static_cast<long>(g.size()), [&](long k) {
        const int i = static_cast<int>(k) / g.n, j = static_cast<int>(k) % g.n;
        field.values[k] = conjugacy::siegel_dphi_at(map, g.point(i, j), opt);
    });
    return field;
}

ResultBundle run_holder(const ExperimentConfig& cfg) {
    ResultBundle b;
    const maps::PlanarMap map = build_map(cfg);
    const auto kind = spectral::classify_domain(cfg.params);
    MatrixField2D field(cfg.grid);
    if (kind == spectral::DomainKind::Siegel) {
        field = siegel_dphi_field(cfg, map);
        b.notes["field"] = "siegel pointwise derivative limits";
    } else {
        const auto res = conjugacy::linearize_poincare(map, cfg.grid, iter_options(cfg));
        field = res.dphi;
        b.notes["field"] = "poincare iterate derivative field";
    }
    holder::SamplerConfig scfg;
    scfg.seed = cfg.seed;
    scfg.pairs_per_bin = cfg.pairs_per_bin;
    scfg.quantile = cfg.quantile;
    const holder::HolderEstimate est = holder::estimate_holder_exponent(field, scfg);
    b.notes["operation"] = "holder.estimate_holder_exponent";
    b.scalars["beta_hat"] = est.beta_hat;
    b.scalars["constant_hat"] = est.constant_hat;
    b.scalars["r2"] = est.regression_r2;
    b.scalars["pair_count"] = static_cast<double>(est.pair_count);
    b.scalars["distance_decades"] = est.distance_decades;
    b.scalars["degenerate"] = est.degenerate ? 1.0 : 0.0;
    Table bins{"envelope_bins", "holder.estimate_holder_exponent",
               {"distance", "envelope"}, {}};
    for (std::size_t i = 0; i < est.bin_distance.size(); ++i)
        bins.rows.push_back({est.bin_distance[i], est.bin_envelope[i]});
    b.tables.push_back(std::move(bins));
    return b;
}

ResultBundle run_poincare_sharpness(const ExperimentConfig& cfg) {
    ResultBundle b;
    if (spectral::classify_domain(cfg.params) != spectral::DomainKind::PoincareContraction)
        throw ConfigError("poincare-sharpness: parameters must be a Poincare contraction");
    const maps::PlanarMap map = build_map(cfg);
    const IterationOptions opt = iter_options(cfg);
    auto phi1 = conjugacy::poincare_phi1_evaluator(map, opt);
    std::vector<double> levels;
    for (int k = cfg.level_min_k; k <= cfg.level_max_k; ++k)
        levels.push_back(std::ldexp(1.0, -k));
    const auto above = conjugacy::one_sided_quotients(phi1, cfg.xi, true, levels);
    const auto below = conjugacy::one_sided_quotients(phi1, cfg.xi, false, levels);
    Table t{"one_sided_quotients", "conjugacy.one_sided_quotients",
            {"level", "from_above", "from_below"}, {}};
    double min_above = std::numeric_limits<double>::infinity(), max_below = 0.0;
    for (std::size_t i = 0; i < above.size(); ++i) {
        t.rows.push_back({above[i].level, above[i].quotient, below[i].quotient});
        min_above = std::min(min_above, above[i].quotient);
        max_below = std::max(max_below, std::abs(below[i].quotient));
    }
    b.tables.push_back(std::move(t));
    const auto d = spectral::derived_exponents(cfg.params);
    b.scalars["alpha0"] = d.alpha0;
    b.scalars["alpha"] = cfg.params.alpha;
    b.scalars["xi"] = cfg.xi;
    b.scalars["min_from_above"] = min_above;
    b.scalars["max_abs_from_below"] = max_below;
    // log-log fit of the from-above quotients against the predicted exponent
    std::vector<double> lx, ly;
    for (const auto& r : above)
        if (r.quotient > 0) {
            lx.push_back(std::log(r.level));
            ly.push_back(std::log(r.quotient));
        }
    if (lx.size() >= 2) {
        b.scalars["above_loglog_slope"] = num::fit_line(lx, ly).slope;
        b.scalars["predicted_slope"] = cfg.params.alpha / d.alpha0 - 1.0;
    }
    b.notes["operation"] = "conjugacy.one_sided_quotients";
    return b;
}

ResultBundle run_siegel_sharpness(const ExperimentConfig& cfg) {
    ResultBundle b;
    if (spectral::classify_domain(cfg.params) != spectral::DomainKind::Siegel)
        throw ConfigError("siegel-sharpness: parameters must be a saddle");
    const maps::PlanarMap map = build_map(cfg);
    const IterationOptions opt = iter_options(cfg);
    const double beta_theory = spectral::siegel_beta(cfg.params);

    // derivative field + envelope estimate
    const MatrixField2D field = siegel_dphi_field(cfg, map);
    holder::SamplerConfig scfg;
    scfg.seed = cfg.seed;
    scfg.pairs_per_bin = cfg.pairs_per_bin;
    scfg.quantile = cfg.quantile;
    const holder::HolderEstimate est = holder::estimate_holder_exponent(field, scfg);

    // pointwise modulus at the axis anchor (0, omega) along e1
    auto dphi = [&](const Vec2& p) { return conjugacy::siegel_dphi_at(map, p, opt); };
    std::vector<double> levels;
    for (int k = cfg.level_min_k; k <= cfg.level_max_k; ++k)
        levels.push_back(cfg.grid.radius * std::ldexp(1.0, -k));
    const auto rows =
        holder::local_modulus(dphi, {0.0, cfg.omega}, {1.0, 0.0}, levels);
    Table t{"local_modulus", "holder.local_modulus", {"distance", "diff_norm"}, {}};
    for (const auto& r : rows) t.rows.push_back({r.distance, r.diff_norm});
    b.tables.push_back(std::move(t));

    const double bhi = beta_theory + cfg.beta_probe_delta;
    const double blo = beta_theory - cfg.beta_probe_delta;
    b.scalars["beta_theory"] = beta_theory;
    b.scalars["beta_hat"] = est.beta_hat;
    b.scalars["estimate_r2"] = est.regression_r2;
    b.scalars["growth_above"] = holder::quotient_growth(rows, bhi);
    b.scalars["growth_below"] = holder::quotient_growth(rows, blo);
    std::vector<double> ld, lv;
    for (const auto& r : rows)
        if (r.diff_norm > 0) {
            ld.push_back(std::log(r.distance));
            lv.push_back(std::log(r.diff_norm));
        }
    if (ld.size() >= 2) b.scalars["modulus_exponent_fit"] = num::fit_line(ld, lv).slope;

    // iterate bound fit |pi1 F^n(x)| <= M |l1|^n |x1| over seeded samples
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> U(-cfg.grid.radius, cfg.grid.radius);
    double M = 0.0;
    for (int s = 0; s < 200; ++s) {
        Vec2 x{U(rng), U(rng)};
        if (std::abs(x.x1) < 1e-6) continue;
        Vec2 z = x;
        double pw = 1.0;
        for (int n = 1; n <= 24; ++n) {
            z = map.eval(z);
            pw *= std::abs(cfg.params.lambda1);
            M = std::max(M, std::abs(z.x1) / (pw * std::abs(x.x1)));
        }
    }
    b.scalars["iterate_bound_M"] = M;
    b.notes["operation"] = "holder.estimate_holder_exponent + holder.local_modulus";
    return b;
}

}  // namespace

ResultBundle run(const ExperimentConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    ResultBundle b;
    if (cfg.experiment == "curves") b = run_curves(cfg);
    else if (cfg.experiment == "linearize") b = run_linearize(cfg);
    else if (cfg.experiment == "flatten") b = run_flatten(cfg);
    else if (cfg.experiment == "funceq") b = run_funceq(cfg);
    else if (cfg.experiment == "whitney") b = run_whitney(cfg);
    else if (cfg.experiment == "holder") b = run_holder(cfg);
    else if (cfg.experiment == "poincare-sharpness") b = run_poincare_sharpness(cfg);
    else if (cfg.experiment == "siegel-sharpness") b = run_siegel_sharpness(cfg);
    else throw ConfigError("run: unknown experiment " + cfg.experiment);
    b.config = cfg;
    b.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return b;
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void write_bundle(const ResultBundle& bundle, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    {
        std::ofstream echo(fs::path(out_dir) / "config-echo.txt");
        for (const auto& [k, v] : bundle.config.echo) echo << k << " = " << v << "\n";
    }
    for (const Table& t : bundle.tables) {
        std::ofstream csv(fs::path(out_dir) / (t.name + ".csv"));
        for (std::size_t c = 0; c < t.columns.size(); ++c)
            csv << (c ? "," : "") << t.columns[c];
        csv << "\n";
        for (const auto& row : t.rows) {
            for (std::size_t c = 0; c < row.size(); ++c)
                csv << (c ? "," : "") << format_double(row[c]);
            csv << "\n";
        }
    }
    nlohmann::json j;
    j["artifact_version"] = bundle.artifact_version;
    j["experiment"] = bundle.config.experiment;
    j["wall_seconds"] = bundle.wall_seconds;
    j["config"] = bundle.config.echo;
    for (const auto& [k, v] : bundle.scalars) j["scalars"][k] = v;
    for (const auto& [k, v] : bundle.notes) j["notes"][k] = v;
    nlohmann::json prov = nlohmann::json::object();
    for (const Table& t : bundle.tables) prov[t.name] = t.provenance;
    j["provenance"] = prov;
    std::ofstream out(fs::path(out_dir) / "summary.json");
    out << j.dump(2) << "\n";
}

}  // namespace hyperlin::experiment
