#pragma once

#include "rtlab/report.hpp"
#include "rtlab/solver.hpp"

#include <vector>

namespace rtlab {

enum class SteadyMethod { Evolution, FixedPoint };

struct SteadyResult {
    Field G;                          // mass 1, symmetric under (x, v) -> (-x, -v)
    double residual = 0.0;            // || apply_generator(G) ||_L1
    SteadyMethod method = SteadyMethod::Evolution;
    int iterations = 0;               // unit-time chunks or sweeps
    double last_change = 0.0;         // stopping quantity at exit
    bool converged = false;
    double elapsed_time = 0.0;        // evolution: physical time marched
    std::vector<double> iterate_mass; // fixed point: mass before each renormalisation
};

/// March f0 = M(v) 1{|x| <= 1} until ||f(t+1) - f(t)||_L1 < tol, then symmetrise. With absorbing
/// outflow the state is rescaled to unit mass after every unit of time.
SteadyResult steady_by_evolution(const ModelParams& p, const PhaseGrid& grid, const SolverConfig& cfg,
                                 double tol, double t_max = 20000.0);

/// Iterate the two-branch one-dimensional representation formula with theta from the previous
/// iterate; each cell integrates exp(-int Lambda/|v|) exactly with theta and Lambda constant
/// per cell. Stops when ||G_{n+1} - G_n||_L1 < tol.
SteadyResult steady_by_fixed_point(const ModelParams& p, const PhaseGrid& grid, double tol,
                                   int max_sweeps = 100000);

double generator_residual(const Field& G, const ModelParams& p);

/// Passes iff min_x rho_G > 0.
CheckReport positivity_check(const Field& G);

/// rho * phi1 <= rho <= rho * phi2 on |x| <= interior * x_max up to relative slack.
CheckReport convolution_sandwich_check(const Field& G, const ModelParams& p, double slack = 0.02,
                                       double interior = 0.8);

/// Same inequalities for a bare density profile on a uniform x grid (d = 1).
CheckReport convolution_sandwich_check(const Eigen::ArrayXd& rho, double dx, const ModelParams& p,
                                       double slack = 0.02, double interior = 0.8);

/// ln rho = c + beta ln x - nu x^{gamma/(1+gamma)} on the window; passes iff
/// |nu_hat - nu_pred| / nu_pred <= delta.
CheckReport tail_bounds_check(const Field& G, const ModelParams& p, double x_lo, double x_hi,
                              double delta = 0.10, double ell = -1.0);

/// (gamma + 1)/gamma (1 + chi)^{gamma/(1+gamma)}.
double predicted_tail_rate(const ModelParams& p);

/// ell - gamma/(1+gamma) (d - 1/2).
double predicted_tail_power(const ModelParams& p, double ell);

/// Positive-x samples (x, ln y) of an x profile on the window.
void window_samples(const PhaseGrid& g, const Eigen::ArrayXd& y, double x_lo, double x_hi,
                    std::vector<double>& xs, std::vector<double>& logs);

} // namespace rtlab
