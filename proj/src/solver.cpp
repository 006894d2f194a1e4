#include "rtlab/solver.hpp"

#include "rtlab/parallel.hpp"
#include "rtlab/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace rtlab {

void SolverConfig::validate() const {
    if (!(dt > 0.0)) throw std::invalid_argument("solver: dt must be positive");
    if (!(t_final >= 0.0)) throw std::invalid_argument("solver: t_final must be nonnegative");
    if (!(cfl_max > 0.0 && cfl_max <= 1.0)) throw std::invalid_argument("solver: cfl_max must lie in (0, 1]");
}

SolverConfig SolverConfig::adjusted(const PhaseGrid& g) const {
    SolverConfig out = *this;
    const double max_dt = cfl_max * g.dx() / (g.v_max - 0.5 * g.dv());
    if (out.dt > max_dt) out.dt = max_dt;
    return out;
}

Stepper::Relaxation Stepper::build(const Eigen::ArrayXXd& lam, const Eigen::ArrayXd& m, double dt) {
    Relaxation r;
    r.decay = (-lam * dt).exp();
    r.gain = ((1.0 - r.decay) / lam).rowwise() * m.transpose();
    r.norm = r.gain.rowwise().sum();
    return r;
}

Stepper::Stepper(const PhaseGrid& g, const ModelParams& p, const SolverConfig& cfg)
    : grid_(g), dt_(cfg.dt), splitting_(cfg.splitting) {
    g.validate();
    const Eigen::ArrayXXd lam = lambda_table(g, p);
    const Eigen::ArrayXd m = discrete_maxwellian(g, p);
    full_ = build(lam, m, dt_);
    if (splitting_ == Splitting::Strang) half_ = build(lam, m, 0.5 * dt_);
    courant_ = g.vs() * (dt_ / g.dx());
}

void Stepper::relax(Eigen::ArrayXXd& f, const Relaxation& r) const {
    const int nv = grid_.nv;
    parallel_for(grid_.nx, [&](int b, int e) {
        const int n = e - b;
        Eigen::ArrayXd lost = Eigen::ArrayXd::Zero(n);
        for (int j = 0; j < nv; ++j)
            lost += (1.0 - r.decay.col(j).segment(b, n)) * f.col(j).segment(b, n);
        const Eigen::ArrayXd amp = lost / r.norm.segment(b, n);
        for (int j = 0; j < nv; ++j)
            f.col(j).segment(b, n) =
                r.decay.col(j).segment(b, n) * f.col(j).segment(b, n) + r.gain.col(j).segment(b, n) * amp;
    });
}

void Stepper::collide(Eigen::ArrayXXd& f, bool half) const { relax(f, half ? half_ : full_); }

void Stepper::transport(Eigen::ArrayXXd& f) const {
    if (courant_.abs().maxCoeff() > 1.0 + 1e-12)
        throw std::invalid_argument("solver: CFL number exceeds 1, reduce dt");
    const int nx = grid_.nx;
    const bool periodic = grid_.bc == Boundary::Periodic;
    parallel_for(grid_.nv, [&](int b, int e) {
        for (int j = b; j < e; ++j) {
            const double c = std::abs(courant_(j));
            double* col = f.col(j).data();
            if (courant_(j) > 0.0) {
                const double inflow = periodic ? col[nx - 1] : 0.0;
                for (int i = nx - 1; i > 0; --i) col[i] = (1.0 - c) * col[i] + c * col[i - 1];
                col[0] = (1.0 - c) * col[0] + c * inflow;
            } else {
                const double inflow = periodic ? col[0] : 0.0;
                for (int i = 0; i < nx - 1; ++i) col[i] = (1.0 - c) * col[i] + c * col[i + 1];
                col[nx - 1] = (1.0 - c) * col[nx - 1] + c * inflow;
            }
        }
    });
}

void Stepper::advance(Eigen::ArrayXXd& f) const {
    if (splitting_ == Splitting::Lie) {
        collide(f, false);
        transport(f);
    } else {
        collide(f, true);
        transport(f);
        collide(f, true);
    }
}

Field collision_step(const Field& f, double dt, const ModelParams& p) {
    SolverConfig cfg;
    cfg.dt = dt;
    Stepper s(f.grid(), p, cfg);
    Eigen::ArrayXXd out = f.values();
    s.collide(out, false);
    return Field(f.grid(), std::move(out));
}

Field transport_step(const Field& f, double dt) {
    const PhaseGrid& g = f.grid();
    ModelParams p;
    SolverConfig cfg;
    cfg.dt = dt;
    Stepper s(g, p, cfg);
    Eigen::ArrayXXd out = f.values();
    s.transport(out);
    return Field(g, std::move(out));
}

Field step(const Field& f, const SolverConfig& cfg, const ModelParams& p) {
    Stepper s(f.grid(), p, cfg);
    Eigen::ArrayXXd out = f.values();
    s.advance(out);
    if (!out.allFinite()) throw NumericalFailure("step: non-finite value produced");
    return Field(f.grid(), std::move(out));
}

Field b0_semigroup(const Field& f0, double t, const ModelParams& p) {
    const PhaseGrid& g = f0.grid();
    if (t < 0.0) throw std::invalid_argument("b0_semigroup: t must be nonnegative");
    if (t == 0.0) return f0;
    const GaussRule& rule = gauss_legendre(32);
    const auto& F = f0.values();
    const double dx = g.dx();
    auto interp = [&](double xf, int j) {
        if (g.bc == Boundary::Periodic) {
            const double L = 2.0 * g.x_max;
            xf = std::fmod(xf + g.x_max, L);
            if (xf < 0.0) xf += L;
            xf -= g.x_max;
        } else if (xf < -g.x_max || xf > g.x_max) {
            return 0.0;
        }
        const double s = (xf + g.x_max) / dx - 0.5;
        int i0 = static_cast<int>(std::floor(s));
        const double w = s - i0;
        auto at = [&](int i) {
            if (g.bc == Boundary::Periodic) return F(((i % g.nx) + g.nx) % g.nx, j);
            return F(std::clamp(i, 0, g.nx - 1), j);
        };
        return (1.0 - w) * at(i0) + w * at(i0 + 1);
    };
    auto decay_integral = [&](double x, double v, double a, double b) {
        const double h = 0.5 * (b - a), c = 0.5 * (a + b);
        double sum = 0.0;
        for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
            const double s = c + h * rule.nodes[k];
            sum += rule.weights[k] * tumbling_rate_at(x - v * s, v, p);
        }
        return sum * h;
    };
    Eigen::ArrayXXd out(g.nx, g.nv);
    parallel_for(g.nv, [&](int b, int e) {
        for (int j = b; j < e; ++j) {
            const double v = g.v(j);
            for (int i = 0; i < g.nx; ++i) {
                const double x = g.x(i);
                const double base = interp(x - v * t, j);
                if (base == 0.0) {
                    out(i, j) = 0.0;
                    continue;
                }
                const double cross = x / v;
                double integral;
                if (cross > 0.0 && cross < t)
                    integral = decay_integral(x, v, 0.0, cross) + decay_integral(x, v, cross, t);
                else
                    integral = decay_integral(x, v, 0.0, t);
                out(i, j) = base * std::exp(-integral);
            }
        }
    });
    return Field(g, std::move(out));
}

Field apply_generator(const Field& f, const ModelParams& p) {
    const PhaseGrid& g = f.grid();
    const Eigen::ArrayXXd lam = lambda_table(g, p);
    const Eigen::ArrayXd m = discrete_maxwellian(g, p);
    const auto& F = f.values();
    const Eigen::ArrayXd theta = (F * lam).rowwise().sum() * g.dv();
    Eigen::ArrayXXd out = (theta.matrix() * m.matrix().transpose()).array() - lam * F;
    const bool periodic = g.bc == Boundary::Periodic;
    const int nx = g.nx;
    for (int j = 0; j < g.nv; ++j) {
        const double v = g.v(j);
        const double c = std::abs(v) / g.dx();
        for (int i = 0; i < nx; ++i) {
            double up;
            if (v > 0.0)
                up = i > 0 ? F(i - 1, j) : (periodic ? F(nx - 1, j) : 0.0);
            else
                up = i < nx - 1 ? F(i + 1, j) : (periodic ? F(0, j) : 0.0);
            out(i, j) -= c * (F(i, j) - up);
        }
    }
    return Field(g, std::move(out));
}

std::vector<double> Trajectory::column(const std::string& name) const {
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw std::out_of_range("trajectory has no column " + name);
    const std::size_t k = static_cast<std::size_t>(it - names.begin());
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r[k]);
    return out;
}

Trajectory run(const Field& f0, const SolverConfig& cfg_in, const ModelParams& p,
               const std::vector<Probe>& probes, const RunOptions& opts) {
    cfg_in.validate();
    const PhaseGrid& g = f0.grid();
    SolverConfig cfg = cfg_in.adjusted(g);
    const long steps = cfg.t_final > 0.0 ? static_cast<long>(std::ceil(cfg.t_final / cfg.dt - 1e-9)) : 0;
    if (steps > 0) cfg.dt = cfg.t_final / steps;
    Trajectory traj;
    for (const auto& pr : probes) traj.names.push_back(pr.name);
    Field cur = f0;
    auto record = [&](double t) {
        std::vector<double> row;
        row.reserve(probes.size());
        for (const auto& pr : probes) row.push_back(pr.fn(t, cur));
        traj.t.push_back(t);
        traj.rows.push_back(std::move(row));
    };
    record(0.0);
    if (opts.snapshot_stride > 0) {
        traj.snapshot_t.push_back(0.0);
        traj.snapshots.push_back(cur);
    }
    if (steps > 0) {
        Stepper stepper(g, p, cfg);
        const int stride = std::max(1, opts.probe_stride);
        for (long n = 1; n <= steps; ++n) {
            stepper.advance(cur.values());
            const double t = n * cfg.dt;
            const bool probe_now = n % stride == 0 || n == steps;
            const bool snap_now = opts.snapshot_stride > 0 && (n % opts.snapshot_stride == 0 || n == steps);
            if (probe_now || snap_now || n % 64 == 0) {
                if (!cur.values().allFinite())
                    throw NumericalFailure("run: non-finite value at t = " + std::to_string(t));
            }
            if (probe_now) record(t);
            if (snap_now) {
                traj.snapshot_t.push_back(t);
                traj.snapshots.push_back(cur);
            }
        }
    }
    traj.final_state = cur;
    return traj;
}

} // namespace rtlab
