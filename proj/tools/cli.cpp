#include "cli.hpp"

#include "config.hpp"
#include "svg.hpp"

#include "rtlab/asymptotics.hpp"
#include "rtlab/hypo.hpp"
#include "rtlab/io.hpp"
#include "rtlab/lyapunov.hpp"
#include "rtlab/parallel.hpp"
#include "rtlab/quadrature.hpp"
#include "rtlab/steady.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

namespace rtlab::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json report_json(const CheckReport& r) {
    json c = json::object();
    for (const auto& [k, v] : r.constants) c[k] = v;
    return {{"name", r.name},
            {"passed", r.passed},
            {"max_violation", r.max_violation},
            {"tolerance", r.tolerance},
            {"constants", c},
            {"notes", r.notes}};
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open for writing: " + path.string());
    os << j.dump(2) << '\n';
}

CheckReport retolerance(CheckReport r, double tol) {
    r.tolerance = tol;
    r.set_violation(r.max_violation);
    return r;
}

struct Context {
    RunConfig cfg;
    fs::path out;
    std::ostream& log;
};

Field load_steady(const Context& ctx) {
    const fs::path path = ctx.out / "steady.field";
    Field G;
    try {
        G = read_field(path.string());
    } catch (const IoError& e) {
        throw ConfigError(std::string(e.what()) + " (run `rtlab steady` first)");
    }
    return G;
}

Field initial_field(const Context& ctx, const Field* G) {
    const auto& in = ctx.cfg.simulate.initial;
    if (in.kind == "bump") return maxwellian_bump(ctx.cfg.grid, ctx.cfg.model, in.x0, in.width);
    Field f = *G;
    const PhaseGrid& g = f.grid();
    for (int i = 0; i < g.nx; ++i) f.values().row(i) *= 1.0 + in.amplitude * std::sin(g.x(i) / in.wavelength);
    return f;
}

int cmd_simulate(Context& ctx) {
    const RunConfig& c = ctx.cfg;
    const bool need_G = c.simulate.distances || c.simulate.entropy || c.simulate.initial.kind == "perturbed_steady";
    Field G;
    if (need_G) {
        G = load_steady(ctx);
        if (!G.grid().same_shape(c.grid)) throw ConfigError("steady.field grid differs from the configured grid");
    }
    const Field f0 = initial_field(ctx, need_G ? &G : nullptr);
    std::vector<Probe> probes{{"mass", [](double, const Field& f) { return f.mass(); }}};
    if (c.simulate.distances) {
        const WeightedNorm l1 = WeightedNorm::l1_unit(c.grid), linf = WeightedNorm::linf_over(G.values());
        probes.push_back({"l1_dist_to_G", [&, l1](double, const Field& f) {
                              return norm(Field(f.grid(), f.values() - G.values()), l1);
                          }});
        probes.push_back({"linf_over_G", [&, linf](double, const Field& f) { return norm(f, linf); }});
    }
    if (c.simulate.entropy) {
        const EllipticConfig ec{c.ell(), 1e-9};
        probes.push_back({"entropy", [&, ec](double, const Field& f) { return entropy(f, G, c.entropy_eps, ec).H; }});
    }
    const Trajectory tr = run(f0, c.solver, c.model, probes, {c.simulate.probe_stride, 0});
    Table t;
    t.header = {"t"};
    t.header.insert(t.header.end(), tr.names.begin(), tr.names.end());
    for (std::size_t k = 0; k < tr.t.size(); ++k) {
        std::vector<double> row{tr.t[k]};
        row.insert(row.end(), tr.rows[k].begin(), tr.rows[k].end());
        t.rows.push_back(std::move(row));
    }
    write_csv((ctx.out / "trajectory.csv").string(), t);
    json s = {{"records", tr.t.size()}, {"t_final", tr.t.back()}, {"columns", t.header}, {"config", to_json(c)}};
    s["final"] = json::object();
    for (std::size_t k = 0; k < tr.names.size(); ++k) s["final"][tr.names[k]] = tr.rows.back()[k];
    write_json(ctx.out / "summary.json", s);
    ctx.log << "simulate: " << tr.t.size() << " records written to " << (ctx.out / "trajectory.csv").string() << '\n';
    return Ok;
}

json steady_json(const SteadyResult& r) {
    return {{"method", r.method == SteadyMethod::Evolution ? "evolution" : "fixed_point"},
            {"residual", r.residual},
            {"iterations", r.iterations},
            {"last_change", r.last_change},
            {"converged", r.converged},
            {"elapsed_time", r.elapsed_time}};
}

int cmd_steady(Context& ctx) {
    const RunConfig& c = ctx.cfg;
    std::optional<SteadyResult> evo, fix;
    if (c.steady.method != "fixed_point") evo = steady_by_evolution(c.model, c.grid, c.solver, c.steady.tol, c.steady.t_max);
    if (c.steady.method != "evolution") fix = steady_by_fixed_point(c.model, c.grid, c.steady.tol);
    const SteadyResult& primary = evo ? *evo : *fix;
    write_field((ctx.out / "steady.field").string(), primary.G);
    if (evo && fix) write_field((ctx.out / "steady_fixed_point.field").string(), fix->G);

    const MomentSet m = moments(primary.G, c.model);
    Table t;
    t.header = {"x", "rho", "p2", "p4", "theta", "ratio"};
    const Eigen::ArrayXd xs = c.grid.xs();
    for (int i = 0; i < c.grid.nx; ++i)
        t.rows.push_back({xs(i), m.rho(i), m.p2(i), m.p4(i), m.theta(i), m.rho(i) * m.p4(i) / (m.p2(i) * m.p2(i))});
    write_csv((ctx.out / "density.csv").string(), t);

    json j;
    j["methods"] = json::array();
    if (evo) j["methods"].push_back(steady_json(*evo));
    if (fix) j["methods"].push_back(steady_json(*fix));
    j["reports"] = json::array();
    j["reports"].push_back(report_json(positivity_check(primary.G)));
    const double lo = c.verify.window_lo, hi = c.verify.window_hi;
    if (hi < c.grid.x_max) {
        try {
            j["reports"].push_back(report_json(tail_bounds_check(primary.G, c.model, lo, hi, c.tolerance("tails"))));
            j["reports"].push_back(report_json(moment_asymptotics_check(primary.G, c.model, lo, hi)));
        } catch (const std::invalid_argument& e) {
            j["fit_error"] = e.what();
        }
    }
    int code = Ok;
    if (evo && fix) {
        const double d = norm(Field(c.grid, evo->G.values() - fix->G.values()), WeightedNorm::l1_unit(c.grid));
        CheckReport a = CheckReport::make("steady_agreement", d, c.steady.agreement_tol);
        j["reports"].push_back(report_json(a));
        if (!a.passed) code = CheckFailed;
    }
    write_json(ctx.out / "steady.json", j);
    ctx.log << "steady: wrote steady.field, density.csv, steady.json\n";
    return code;
}

// int_0^inf g(t) e^{-X t} dt for polynomial g by adaptive quadrature.
double integrate_watson_oracle(const std::vector<double>& poly, double X) {
    auto g = [&](double t) {
        double s = 0.0;
        for (std::size_t n = poly.size(); n-- > 0;) s = s * t + poly[n];
        return s * std::exp(-X * t);
    };
    return integrate_upper(g, 0.0, 1e-13);
}

// Periodic fixed point of the configured stepper on the small grid.
Field dynamics_steady(const RunConfig& c) {
    PhaseGrid g = c.verify.small_grid;
    g.bc = Boundary::Periodic;
    return steady_by_evolution(c.model, g, c.solver, 1e-14, 1e5).G;
}

std::vector<CheckReport> verify_one(const Context& ctx, const std::string& which, json& extra) {
    const RunConfig& c = ctx.cfg;
    const double tol = c.tolerance(which);
    std::vector<CheckReport> out;
    if (which == "lyapunov" || which == "poly-lyapunov") {
        const WeightSpec w = which == "lyapunov" ? c.exponential_weight() : c.polynomial_weight();
        DriftReport d = drift_check(w, c.model, c.verify.drift_grid, tol);
        CheckReport r = d.to_check(which, tol);
        r.constants["B"] = w.B;
        if (which == "lyapunov") {
            const ExponentialBounds b = exponential_bounds(w, c.model);
            r.constants["B_closed_form"] = WeightSpec::exponential_B(w.a, w.nu, c.model.chi);
            r.constants["delta1"] = b.delta1;
            r.constants["delta1_alt"] = b.delta1_alt;
            r.constants["delta2"] = b.delta2;
        } else {
            r.constants["B_threshold"] = WeightSpec::polynomial_B_threshold(w.k, c.model.chi);
        }
        out.push_back(r);
    } else if (which == "coercivity") {
        const Field G = steady_by_fixed_point(c.model, c.verify.small_grid, 1e-13).G;
        out.push_back(coercivity_suite(G, c.model, c.verify.random_fields, c.seed, tol));
    } else if (which == "poincare") {
        const Field G = steady_by_fixed_point(c.model, c.verify.small_grid, 1e-12).G;
        const Field Gf = steady_by_fixed_point(c.model, c.verify.small_grid.refined(), 1e-12).G;
        out.push_back(retolerance(poincare_estimate(G, Gf, c.model, poincare_family(0.5 * c.verify.small_grid.x_max)), tol));
    } else if (which == "minorisation") {
        MinorisationReport m = minorisation_constants(c.model, c.verify.X0, c.verify.V0);
        minorisation_cross_check(m, c.model, c.verify.minorisation_grid, c.verify.minorisation_seeds, c.seed);
        CheckReport r = CheckReport::make("minorisation", 0.5 - m.sim_min_ratio, tol);
        r.constants = {{"T", m.T},
                       {"X0", m.X0},
                       {"V0", m.V0},
                       {"C0", m.C0},
                       {"alpha_density", m.alpha_density},
                       {"alpha_density_statement", m.alpha_density_statement},
                       {"alpha", m.alpha},
                       {"sim_min", m.sim_min},
                       {"sim_min_ratio", m.sim_min_ratio},
                       {"seeds", m.seeds}};
        r.notes = m.notes;
        out.push_back(r);
    } else if (which == "sandwich") {
        out.push_back(convolution_sandwich_check(load_steady(ctx), c.model, tol));
    } else if (which == "tails") {
        out.push_back(tail_bounds_check(load_steady(ctx), c.model, c.verify.window_lo, c.verify.window_hi, tol));
    } else if (which == "moments") {
        const Field G = load_steady(ctx);
        out.push_back(retolerance(moment_asymptotics_check(G, c.model, c.verify.window_lo, c.verify.window_hi), tol));
        CheckReport v = vg_equivalence_check(G, c.model);
        v.constants["hyp_matrix_sup"] = vg_gradient_condition(G, c.model);
        out.push_back(v);
    } else if (which == "dissipation") {
        const Field G = dynamics_steady(c);
        const PhaseGrid& g = G.grid();
        const Field f0 = maxwellian_bump(g, c.model, 0.5 * g.x_max, 0.1 * g.x_max);
        SolverConfig sc = c.solver;
        sc.t_final = c.verify.dissipation_t_final;
        const SolverConfig adj = sc.adjusted(g);
        const int stride = std::max(1, static_cast<int>(std::round(0.1 / adj.dt)));
        const Trajectory tr = run(f0, sc, c.model, {}, {stride, stride});
        const EllipticConfig ec{c.ell(), 1e-9};
        DissipationResult d = c.entropy_eps > 0.0 ? dissipation_check(tr.snapshot_t, tr.snapshots, G, c.entropy_eps, ec, 1.0)
                                                  : dissipation_select(tr.snapshot_t, tr.snapshots, G, ec, 1.0);
        out.push_back(retolerance(d.report, tol));
        Table t;
        t.header = {"t", "H", "Hdot", "l2_norm_sq", "micro", "macro_weighted"};
        for (const auto& r : d.records) t.rows.push_back({r.t, r.H, r.Hdot, r.l2_norm_sq, r.micro, r.macro_weighted});
        write_csv((ctx.out / "entropy.csv").string(), t);
    } else if (which == "contraction") {
        const Field G = dynamics_steady(c);
        const PhaseGrid& g = G.grid();
        SolverConfig sc = c.solver;
        sc.t_final = c.verify.contraction_t_final;
        const ContractionWeights w{c.exponential_weight(), c.polynomial_weight()};
        Field wave = G;
        for (int i = 0; i < g.nx; ++i) wave.values().row(i) *= 1.0 + 0.1 * std::sin(g.x(i) / 10.0);
        const Field bump = maxwellian_bump(g, c.model, 0.0, 0.1 * g.x_max);
        for (const auto& [name, f0] : {std::pair<std::string, const Field&>{"contraction_wave", wave},
                                       std::pair<std::string, const Field&>{"contraction_bump", bump}}) {
            const Trajectory tr = run(f0, sc, c.model, {}, {1, 1});
            CheckReport r = contraction_checks(tr.snapshot_t, tr.snapshots, G, c.model, w);
            r.name = name;
            out.push_back(retolerance(r, tol));
        }
    } else if (which == "asymptotics") {
        Table t;
        t.header = {"n", "y", "quadrature", "asymptotic", "ratio"};
        double worst = 0.0;
        const std::vector<double> ys{10.0, 30.0, 50.0, 100.0, 300.0};
        CheckReport r;
        for (int n : {0, 1, 2}) {
            for (const auto& row : laplace_table(n, 1.0, ys, Regime::Large)) {
                t.rows.push_back({double(n), row.y, row.quadrature, row.asymptotic, row.ratio});
                if (row.y >= 50.0) {
                    const double e = std::abs(row.ratio - 1.0);
                    worst = std::max(worst, e);
                    r.constants["rel_err_n" + std::to_string(n) + "_y" + std::to_string(int(row.y))] = e;
                }
            }
        }
        write_csv((ctx.out / "asymptotics.csv").string(), t);
        r.name = "asymptotics_large_y";
        r.tolerance = tol;
        r.set_violation(worst);
        out.push_back(r);
        const LaplaceSpec small{0, 1.0, 1e-12};
        const double q = laplace_quadrature(small), a = laplace_asymptotic(small, Regime::Small);
        CheckReport lg = CheckReport::make("asymptotics_log_law", std::abs(q / a - 1.0), tol);
        lg.constants["y"] = small.y;
        lg.constants["quadrature"] = q;
        lg.constants["asymptotic"] = a;
        out.push_back(lg);
        double werr = 0.0;
        for (double X : {0.5, 2.0, 20.0}) {
            const std::vector<double> poly{1.0, 2.0, 0.5};
            const double exact = watson_partial_sum(poly, 1.0, X);
            const double quad = integrate_watson_oracle(poly, X);
            werr = std::max(werr, std::abs(exact - quad) / std::abs(quad));
        }
        out.push_back(CheckReport::make("watson_exact_polynomial", werr, 1e-10));
        extra["asymptotics_table"] = (ctx.out / "asymptotics.csv").string();
    } else {
        throw ConfigError("unknown check: " + which);
    }
    return out;
}

int cmd_verify(Context& ctx, const std::vector<std::string>& which) {
    json j;
    j["reports"] = json::array();
    bool all = true;
    for (const auto& w : which) {
        if (!known_checks().count(w)) throw ConfigError("unknown check: " + w);
        json extra = json::object();
        for (const CheckReport& r : verify_one(ctx, w, extra)) {
            j["reports"].push_back(report_json(r));
            all = all && r.passed;
            ctx.log << (r.passed ? "PASS " : "FAIL ") << r.name << " max_violation=" << r.max_violation
                    << " tolerance=" << r.tolerance << '\n';
        }
        for (auto& [k, v] : extra.items()) j[k] = v;
    }
    std::string stem = "verify";
    for (const auto& w : which) stem += "_" + w;
    write_json(ctx.out / (stem + ".json"), j);
    return all ? Ok : CheckFailed;
}

Plot density_plot(const Table& d, const json& steady) {
    Plot p;
    p.title = "steady density";
    p.x_label = "x";
    p.y_label = "rho_G";
    p.log_y = true;
    Series s;
    s.label = "rho_G";
    for (std::size_t k = 0; k < d.rows.size(); ++k)
        if (d.rows[k][0] > 0.0) s.x.push_back(d.rows[k][0]), s.y.push_back(d.rows[k][1]);
    p.series.push_back(s);
    double nu = 0.0, beta = 0.0, C = 0.0;
    for (const auto& r : steady.value("reports", json::array()))
        if (r.value("name", "") == "tail_bounds") {
            nu = r["constants"].value("nu_predicted", 0.0);
            beta = r["constants"].value("beta_predicted", 0.0);
        }
    if (nu > 0.0 && !s.x.empty()) {
        const std::size_t mid = s.x.size() / 2;
        C = s.y[mid] / (std::pow(s.x[mid], beta) * std::exp(-nu * std::sqrt(s.x[mid])));
        Series o;
        o.label = "C x^beta exp(-nu sqrt x)";
        o.color = "#d62728";
        o.dashed = true;
        for (double x : s.x) o.x.push_back(x), o.y.push_back(C * std::pow(x, beta) * std::exp(-nu * std::sqrt(x)));
        p.series.push_back(o);
    }
    return p;
}

Plot ratio_plot(const Table& d, const json& steady) {
    Plot p;
    p.title = "rho p4 / p2^2";
    p.x_label = "x";
    p.y_label = "ratio";
    Series s;
    s.label = "ratio";
    for (const auto& row : d.rows)
        if (row[0] > 0.0) s.x.push_back(row[0]), s.y.push_back(row[5]);
    p.series.push_back(s);
    for (const auto& r : steady.value("reports", json::array()))
        if (r.value("name", "") == "moment_asymptotics") {
            const double ell = r["constants"].value("ell_hat", 0.0), C = r["constants"].value("ratio_prefactor", 0.0);
            Series o;
            o.label = "C <x>^ell";
            o.color = "#d62728";
            o.dashed = true;
            for (double x : s.x) o.x.push_back(x), o.y.push_back(C * std::pow(std::sqrt(1 + x * x), ell));
            p.series.push_back(o);
        }
    return p;
}

int cmd_report(Context& ctx) {
    if (!fs::is_directory(ctx.out)) throw ConfigError("missing output directory: " + ctx.out.string());
    json agg;
    agg["reports"] = json::array();
    agg["sources"] = json::array();
    bool any = false, all = true;
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(ctx.out))
        if (e.path().extension() == ".json" && e.path().filename() != "report.json") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
        std::ifstream is(f);
        json j;
        try {
            j = json::parse(is);
        } catch (const json::parse_error&) {
            continue;
        }
        if (!j.contains("reports")) continue;
        any = true;
        agg["sources"].push_back(f.filename().string());
        for (const auto& r : j["reports"]) {
            agg["reports"].push_back(r);
            all = all && r.value("passed", false);
        }
    }
    if (!any) throw ConfigError("no check reports found in " + ctx.out.string());
    agg["all_passed"] = all;
    if (fs::exists(ctx.out / "density.csv")) {
        const Table d = read_csv((ctx.out / "density.csv").string());
        json steady = json::object();
        if (fs::exists(ctx.out / "steady.json")) {
            std::ifstream is(ctx.out / "steady.json");
            steady = json::parse(is);
        }
        write_svg((ctx.out / "density.svg").string(), density_plot(d, steady));
        write_svg((ctx.out / "ratio.svg").string(), ratio_plot(d, steady));
    }
    if (fs::exists(ctx.out / "entropy.csv")) {
        const Table e = read_csv((ctx.out / "entropy.csv").string());
        Plot p;
        p.title = "entropy decay";
        p.x_label = "t";
        p.y_label = "H";
        p.log_y = true;
        p.series.push_back({e.column("t"), e.column("H"), "H(t)"});
        write_svg((ctx.out / "entropy.svg").string(), p);
    }
    write_json(ctx.out / "report.json", agg);
    ctx.log << "report: " << agg["reports"].size() << " checks aggregated\n";
    return Ok;
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"run-and-tumble kinetic laboratory"};
    app.require_subcommand(1);
    std::string config_path, out_dir;
    int threads = 0;
    std::optional<std::uint64_t> seed;
    app.add_option("--config", config_path, "JSON configuration file");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--threads", threads, "worker threads")->check(CLI::NonNegativeNumber);
    app.add_option("--seed", seed, "seed for random-field suites");
    auto* sim = app.add_subcommand("simulate", "evolve the configured initial datum");
    auto* st = app.add_subcommand("steady", "compute the steady state");
    auto* ver = app.add_subcommand("verify", "run named checks");
    std::vector<std::string> which;
    ver->add_option("which", which, "checks to run")->required();
    auto* rep = app.add_subcommand("report", "aggregate reports and draw plots");
    for (auto* s : {sim, st, ver, rep}) s->fallthrough();
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return Ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return ConfigFailure;
    }
    try {
        RunConfig cfg = config_path.empty() ? from_json(json::object()) : load_config(config_path);
        if (seed) cfg.seed = *seed;
        if (const char* env = std::getenv("OUTPUT_DIR"); env && *env) cfg.output_dir = env;
        if (!out_dir.empty()) cfg.output_dir = out_dir;
        if (threads > 0) set_thread_count(threads);
        Context ctx{cfg, fs::path(cfg.output_dir), out};
        if (*rep) return cmd_report(ctx);
        fs::create_directories(ctx.out);
        if (*sim) return cmd_simulate(ctx);
        if (*st) return cmd_steady(ctx);
        return cmd_verify(ctx, which);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return ConfigFailure;
    } catch (const IoError& e) {
        err << "io error: " << e.what() << '\n';
        return ConfigFailure;
    } catch (const NumericalFailure& e) {
        err << "numerical failure: " << e.what() << '\n';
        return NumericalError;
    } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << '\n';
        return ConfigFailure;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << '\n';
        return NumericalError;
    }
}

int run(int argc, const char* const* argv) { return run(argc, argv, std::cout, std::cerr); }

} // namespace rtlab::cli
