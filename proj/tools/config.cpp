#include "config.hpp"

#include <fstream>

namespace rtlab::cli {

using nlohmann::json;

const std::map<std::string, double>& known_checks() {
    static const std::map<std::string, double> checks = {
        {"lyapunov", 1e-9},  {"poly-lyapunov", 1e-9}, {"coercivity", 1e-6}, {"poincare", 0.20},
        {"minorisation", 0.0}, {"sandwich", 0.02},    {"tails", 0.10},      {"moments", 1.0},
        {"dissipation", 0.0}, {"contraction", 1.0},   {"asymptotics", 0.05},
    };
    return checks;
}

double RunConfig::tolerance(const std::string& check) const {
    if (auto it = checks.find(check); it != checks.end()) return it->second;
    return known_checks().at(check);
}

WeightSpec RunConfig::exponential_weight() const {
    const auto& w = exp_weight;
    const double B = w.B ? *w.B : WeightSpec::exponential_B(w.a, w.nu, model.chi);
    return WeightSpec::exponential(w.a, w.b, w.nu, B * w.B_scale);
}

WeightSpec RunConfig::polynomial_weight() const {
    const auto& w = poly_weight;
    const double B = w.B ? *w.B : 1.01 * WeightSpec::polynomial_B_threshold(w.k, model.chi);
    return WeightSpec::polynomial(w.k, B * w.B_scale);
}

void RunConfig::validate() const {
    try {
        model.validate();
        grid.validate();
        solver.validate();
        verify.drift_grid.validate();
        verify.small_grid.validate();
        verify.minorisation_grid.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    for (const auto& [name, tol] : checks) {
        if (!known_checks().count(name)) throw ConfigError("unknown check: " + name);
        if (!(tol >= 0.0)) throw ConfigError("tolerance must be nonnegative for check " + name);
    }
    if (steady.method != "evolution" && steady.method != "fixed_point" && steady.method != "both")
        throw ConfigError("steady.method must be evolution, fixed_point or both");
    if (!(steady.tol > 0.0) || !(steady.agreement_tol > 0.0)) throw ConfigError("steady tolerances must be positive");
    if (simulate.initial.kind != "bump" && simulate.initial.kind != "perturbed_steady")
        throw ConfigError("simulate.initial.kind must be bump or perturbed_steady");
    if (!(simulate.initial.width > 0.0)) throw ConfigError("simulate.initial.width must be positive");
    if (simulate.probe_stride < 1) throw ConfigError("simulate.probe_stride must be >= 1");
    if (entropy_eps < 0.0) throw ConfigError("entropy.eps must be >= 0");
    if (entropy_ell > 0.0 && !(entropy_ell < 2.0 / (1.0 + model.gamma)))
        throw ConfigError("entropy.ell must lie in (0, 2/(1+gamma))");
    if (verify.random_fields < 1 || verify.minorisation_seeds < 1) throw ConfigError("verify counts must be >= 1");
    if (!(verify.window_lo > 0.0 && verify.window_hi > verify.window_lo))
        throw ConfigError("verify window must satisfy 0 < lo < hi");
}

namespace {

std::string boundary_name(Boundary b) { return b == Boundary::Periodic ? "periodic" : "absorbing"; }

Boundary boundary_from(const std::string& s) {
    if (s == "periodic") return Boundary::Periodic;
    if (s == "absorbing") return Boundary::AbsorbingOutflow;
    throw ConfigError("boundary must be absorbing or periodic, got " + s);
}

json grid_json(const PhaseGrid& g) {
    return {{"x_max", g.x_max}, {"v_max", g.v_max}, {"nx", g.nx}, {"nv", g.nv}, {"boundary", boundary_name(g.bc)}};
}

PhaseGrid grid_from(const json& j, PhaseGrid g) {
    g.x_max = j.value("x_max", g.x_max);
    g.v_max = j.value("v_max", g.v_max);
    g.nx = j.value("nx", g.nx);
    g.nv = j.value("nv", g.nv);
    if (j.contains("boundary")) g.bc = boundary_from(j.at("boundary").get<std::string>());
    return g;
}

json psi_json(const Psi& p) {
    switch (p.kind) {
    case PsiKind::Sign: return {{"kind", "sign"}};
    case PsiKind::SmoothTanh: return {{"kind", "tanh"}, {"scale", p.scale}};
    case PsiKind::Table: return {{"kind", "table"}, {"z", p.table_z}, {"value", p.table_value}};
    }
    return {};
}

Psi psi_from(const json& j) {
    const std::string kind = j.value("kind", "sign");
    if (kind == "sign") return Psi::sign();
    if (kind == "tanh") return Psi::smooth_tanh(j.value("scale", 1.0));
    if (kind == "table")
        return Psi::table(j.at("z").get<std::vector<double>>(), j.at("value").get<std::vector<double>>());
    throw ConfigError("psi.kind must be sign, tanh or table, got " + kind);
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> optional_from(const json& j, const char* key, std::optional<double> fallback) {
    if (!j.contains(key)) return fallback;
    if (j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<double>();
}

} // namespace

json to_json(const RunConfig& c) {
    json j;
    j["model"] = {{"gamma", c.model.gamma}, {"chi", c.model.chi}, {"dim", c.model.dim}, {"psi", psi_json(c.model.psi)}};
    j["grid"] = grid_json(c.grid);
    j["solver"] = {{"dt", c.solver.dt},
                   {"t_final", c.solver.t_final},
                   {"cfl_max", c.solver.cfl_max},
                   {"splitting", c.solver.splitting == Splitting::Strang ? "strang" : "lie"}};
    j["weight"] = {{"exponential",
                    {{"a", c.exp_weight.a},
                     {"b", c.exp_weight.b},
                     {"nu", c.exp_weight.nu},
                     {"B", optional_json(c.exp_weight.B)},
                     {"B_scale", c.exp_weight.B_scale}}},
                   {"polynomial",
                    {{"k", c.poly_weight.k}, {"B", optional_json(c.poly_weight.B)}, {"B_scale", c.poly_weight.B_scale}}}};
    j["entropy"] = {{"eps", c.entropy_eps}, {"ell", c.entropy_ell}};
    j["checks"] = json::object();
    for (const auto& [k, v] : c.checks) j["checks"][k] = v;
    j["output_dir"] = c.output_dir;
    j["seed"] = c.seed;
    const auto& in = c.simulate.initial;
    j["simulate"] = {{"initial",
                      {{"kind", in.kind},
                       {"x0", in.x0},
                       {"width", in.width},
                       {"amplitude", in.amplitude},
                       {"wavelength", in.wavelength}}},
                     {"probe_stride", c.simulate.probe_stride},
                     {"distances", c.simulate.distances},
                     {"entropy", c.simulate.entropy}};
    j["steady"] = {{"method", c.steady.method},
                   {"tol", c.steady.tol},
                   {"t_max", c.steady.t_max},
                   {"agreement_tol", c.steady.agreement_tol}};
    const auto& v = c.verify;
    j["verify"] = {{"drift_grid", grid_json(v.drift_grid)},
                   {"small_grid", grid_json(v.small_grid)},
                   {"window", {v.window_lo, v.window_hi}},
                   {"X0", v.X0},
                   {"V0", v.V0},
                   {"minorisation_seeds", v.minorisation_seeds},
                   {"minorisation_grid", grid_json(v.minorisation_grid)},
                   {"random_fields", v.random_fields},
                   {"dissipation_t_final", v.dissipation_t_final},
                   {"contraction_t_final", v.contraction_t_final}};
    return j;
}

RunConfig from_json(const json& j) {
    RunConfig c;
    try {
        if (!j.is_object()) throw ConfigError("config root must be an object");
        if (j.contains("model")) {
            const json& m = j.at("model");
            c.model.gamma = m.value("gamma", c.model.gamma);
            c.model.chi = m.value("chi", c.model.chi);
            c.model.dim = m.value("dim", c.model.dim);
            if (m.contains("psi")) c.model.psi = psi_from(m.at("psi"));
        }
        if (j.contains("grid")) c.grid = grid_from(j.at("grid"), c.grid);
        if (j.contains("solver")) {
            const json& s = j.at("solver");
            c.solver.dt = s.value("dt", c.solver.dt);
            c.solver.t_final = s.value("t_final", c.solver.t_final);
            c.solver.cfl_max = s.value("cfl_max", c.solver.cfl_max);
            const std::string sp = s.value("splitting", std::string("lie"));
            if (sp != "lie" && sp != "strang") throw ConfigError("solver.splitting must be lie or strang");
            c.solver.splitting = sp == "strang" ? Splitting::Strang : Splitting::Lie;
        }
        if (j.contains("weight")) {
            const json& w = j.at("weight");
            if (w.contains("exponential")) {
                const json& e = w.at("exponential");
                c.exp_weight.a = e.value("a", c.exp_weight.a);
                c.exp_weight.b = e.value("b", c.exp_weight.b);
                c.exp_weight.nu = e.value("nu", c.exp_weight.nu);
                c.exp_weight.B = optional_from(e, "B", c.exp_weight.B);
                c.exp_weight.B_scale = e.value("B_scale", c.exp_weight.B_scale);
            }
            if (w.contains("polynomial")) {
                const json& p = w.at("polynomial");
                c.poly_weight.k = p.value("k", c.poly_weight.k);
                c.poly_weight.B = optional_from(p, "B", c.poly_weight.B);
                c.poly_weight.B_scale = p.value("B_scale", c.poly_weight.B_scale);
            }
        }
        if (j.contains("entropy")) {
            c.entropy_eps = j.at("entropy").value("eps", c.entropy_eps);
            c.entropy_ell = j.at("entropy").value("ell", c.entropy_ell);
        }
        if (j.contains("checks")) {
            const json& ch = j.at("checks");
            if (ch.is_array()) {
                for (const auto& e : ch) {
                    if (e.is_string()) c.checks[e.get<std::string>()] = known_checks().count(e.get<std::string>())
                                                                           ? known_checks().at(e.get<std::string>())
                                                                           : 0.0;
                    else c.checks[e.at("name").get<std::string>()] = e.at("tolerance").get<double>();
                }
            } else {
                for (const auto& [k, v] : ch.items()) c.checks[k] = v.get<double>();
            }
        }
        c.output_dir = j.value("output_dir", c.output_dir);
        c.seed = j.value("seed", c.seed);
        if (j.contains("simulate")) {
            const json& s = j.at("simulate");
            if (s.contains("initial")) {
                const json& in = s.at("initial");
                auto& d = c.simulate.initial;
                d.kind = in.value("kind", d.kind);
                d.x0 = in.value("x0", d.x0);
                d.width = in.value("width", d.width);
                d.amplitude = in.value("amplitude", d.amplitude);
                d.wavelength = in.value("wavelength", d.wavelength);
            }
            c.simulate.probe_stride = s.value("probe_stride", c.simulate.probe_stride);
            c.simulate.distances = s.value("distances", c.simulate.distances);
            c.simulate.entropy = s.value("entropy", c.simulate.entropy);
        }
        if (j.contains("steady")) {
            const json& s = j.at("steady");
            c.steady.method = s.value("method", c.steady.method);
            c.steady.tol = s.value("tol", c.steady.tol);
            c.steady.t_max = s.value("t_max", c.steady.t_max);
            c.steady.agreement_tol = s.value("agreement_tol", c.steady.agreement_tol);
        }
        if (j.contains("verify")) {
            const json& v = j.at("verify");
            auto& d = c.verify;
            if (v.contains("drift_grid")) d.drift_grid = grid_from(v.at("drift_grid"), d.drift_grid);
            if (v.contains("small_grid")) d.small_grid = grid_from(v.at("small_grid"), d.small_grid);
            if (v.contains("minorisation_grid"))
                d.minorisation_grid = grid_from(v.at("minorisation_grid"), d.minorisation_grid);
            if (v.contains("window")) {
                const auto w = v.at("window").get<std::vector<double>>();
                if (w.size() != 2) throw ConfigError("verify.window must have two entries");
                d.window_lo = w[0];
                d.window_hi = w[1];
            }
            d.X0 = v.value("X0", d.X0);
            d.V0 = v.value("V0", d.V0);
            d.minorisation_seeds = v.value("minorisation_seeds", d.minorisation_seeds);
            d.random_fields = v.value("random_fields", d.random_fields);
            d.dissipation_t_final = v.value("dissipation_t_final", d.dissipation_t_final);
            d.contraction_t_final = v.value("contraction_t_final", d.contraction_t_final);
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    c.validate();
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot read config file: " + path);
    json j;
    try {
        j = json::parse(is);
    } catch (const json::parse_error& e) {
        throw ConfigError("config " + path + ": " + e.what());
    }
    return from_json(j);
}

} // namespace rtlab::cli
