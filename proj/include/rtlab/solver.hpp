#pragma once

#include "rtlab/grid.hpp"

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rtlab {

struct NumericalFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Splitting { Lie, Strang };

struct SolverConfig {
    double dt = 0.01;
    double t_final = 1.0;
    double cfl_max = 0.9;
    Splitting splitting = Splitting::Lie;

    void validate() const;
    /// Copy with dt reduced to satisfy dt * v_max / dx <= cfl_max.
    SolverConfig adjusted(const PhaseGrid& g) const;
};

/// Precomputed relaxation and upwind coefficients for one (grid, model, dt).
class Stepper {
public:
    Stepper(const PhaseGrid& g, const ModelParams& p, const SolverConfig& cfg);

    /// One full step (Lie: transport after collision; Strang: half, transport, half).
    void advance(Eigen::ArrayXXd& f) const;
    void collide(Eigen::ArrayXXd& f, bool half) const;
    void transport(Eigen::ArrayXXd& f) const;

    double dt() const { return dt_; }
    const PhaseGrid& grid() const { return grid_; }

private:
    struct Relaxation {
        Eigen::ArrayXXd decay; // exp(-Lambda dt)
        Eigen::ArrayXXd gain;  // (1 - exp(-Lambda dt)) M / Lambda
        Eigen::ArrayXd norm;   // sum_j gain
    };
    static Relaxation build(const Eigen::ArrayXXd& lam, const Eigen::ArrayXd& m, double dt);
    void relax(Eigen::ArrayXXd& f, const Relaxation& r) const;

    PhaseGrid grid_;
    double dt_;
    Splitting splitting_;
    Relaxation full_, half_;
    Eigen::ArrayXd courant_; // v_j dt / dx
};

/// Exact per-column relaxation toward M(v) Theta / Lambda with Lambda frozen.
/// The gain amplitude is the frozen-Theta value rescaled so that the column mass is
/// preserved to rounding.
Field collision_step(const Field& f, double dt, const ModelParams& p);

/// Conservative first-order upwind transport; requires |v| dt / dx <= 1.
Field transport_step(const Field& f, double dt);

Field step(const Field& f, const SolverConfig& cfg, const ModelParams& p);

/// f0(x - v t, v) exp(-int_0^t Lambda ds) with linear interpolation in x and a
/// 32-node Gauss rule per characteristic (split where x - v s crosses 0).
Field b0_semigroup(const Field& f0, double t, const ModelParams& p);

/// Semi-discrete operator: -v D_upwind f + M Theta - Lambda f.
Field apply_generator(const Field& f, const ModelParams& p);

struct Probe {
    std::string name;
    std::function<double(double, const Field&)> fn;
};

struct RunOptions {
    int probe_stride = 1;    // steps between diagnostic records
    int snapshot_stride = 0; // steps between stored fields, 0 disables
};

struct Trajectory {
    std::vector<std::string> names;
    std::vector<double> t;
    std::vector<std::vector<double>> rows;
    std::vector<double> snapshot_t;
    std::vector<Field> snapshots;
    Field final_state;

    std::vector<double> column(const std::string& name) const;
};

Trajectory run(const Field& f0, const SolverConfig& cfg, const ModelParams& p,
               const std::vector<Probe>& probes, const RunOptions& opts = {});

} // namespace rtlab
