#pragma once

#include "rtlab/grid.hpp"
#include "rtlab/lyapunov.hpp"
#include "rtlab/solver.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

namespace rtlab::cli {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ExponentialWeightConfig {
    double a = 0.5, b = 0.25, nu = 1e-2;
    std::optional<double> B; // closed-form value when absent
    double B_scale = 1.0;
};

struct PolynomialWeightConfig {
    double k = 2.0;
    std::optional<double> B; // 1.01 times the threshold when absent
    double B_scale = 1.0;
};

struct InitialConfig {
    std::string kind = "bump"; // bump | perturbed_steady
    double x0 = 0.0;           // bump centre
    double width = 5.0;        // bump half-width
    double amplitude = 0.1;    // perturbed_steady: G (1 + amplitude sin(x / wavelength))
    double wavelength = 10.0;
};

struct SimulateConfig {
    InitialConfig initial;
    int probe_stride = 10;
    bool distances = false; // l1_dist_to_G and linf_over_G columns, need the steady file
    bool entropy = false;
};

struct SteadyConfig {
    std::string method = "both"; // evolution | fixed_point | both
    double tol = 1e-9;
    double t_max = 20000.0;
    double agreement_tol = 5e-3;
};

struct VerifyConfig {
    PhaseGrid drift_grid{500.0, 20.0, 400, 80, Boundary::AbsorbingOutflow};
    PhaseGrid small_grid{50.0, 10.0, 100, 40, Boundary::Periodic};
    double window_lo = 200.0, window_hi = 1500.0;
    double X0 = 10.0, V0 = 5.0;
    int minorisation_seeds = 20;
    PhaseGrid minorisation_grid{100.0, 20.0, 400, 160, Boundary::AbsorbingOutflow};
    int random_fields = 100;
    double dissipation_t_final = 20.0;
    double contraction_t_final = 100.0;
};

struct RunConfig {
    ModelParams model;
    PhaseGrid grid;
    SolverConfig solver;
    ExponentialWeightConfig exp_weight;
    PolynomialWeightConfig poly_weight;
    double entropy_eps = 0.0; // 0 selects eps by halving
    double entropy_ell = -1.0; // negative: 1/(1+gamma)
    std::map<std::string, double> checks; // name -> tolerance
    std::string output_dir = "out";
    std::uint64_t seed = 1;
    SimulateConfig simulate;
    SteadyConfig steady;
    VerifyConfig verify;

    void validate() const;
    WeightSpec exponential_weight() const;
    WeightSpec polynomial_weight() const;
    double ell() const { return entropy_ell > 0.0 ? entropy_ell : 1.0 / (1.0 + model.gamma); }
    /// Configured tolerance for a check, else its default.
    double tolerance(const std::string& check) const;
};

/// Names accepted by `verify` and their default tolerances.
const std::map<std::string, double>& known_checks();

nlohmann::json to_json(const RunConfig& c);
RunConfig from_json(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

} // namespace rtlab::cli
