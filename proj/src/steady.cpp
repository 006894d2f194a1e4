#include "rtlab/steady.hpp"

#include "rtlab/asymptotics.hpp"
#include "rtlab/parallel.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace rtlab {

namespace {

Field initial_bump(const PhaseGrid& g, const ModelParams& p) {
    const Eigen::ArrayXd m = discrete_maxwellian(g, p);
    Eigen::ArrayXXd F = Eigen::ArrayXXd::Zero(g.nx, g.nv);
    for (int i = 0; i < g.nx; ++i)
        if (std::abs(g.x(i)) <= 1.0) F.row(i) = m.transpose();
    if (F.sum() == 0.0) F.row(g.nx / 2) = m.transpose();
    Field f(g, std::move(F));
    f.values() /= f.mass();
    return f;
}

double l1_diff(const Eigen::ArrayXXd& a, const Eigen::ArrayXXd& b, const PhaseGrid& g) {
    return (a - b).abs().sum() * (g.dx() * g.dv());
}

} // namespace

double generator_residual(const Field& G, const ModelParams& p) {
    return norm(apply_generator(G, p), WeightedNorm::l1_unit(G.grid()));
}

SteadyResult steady_by_evolution(const ModelParams& p, const PhaseGrid& grid, const SolverConfig& cfg_in,
                                 double tol, double t_max) {
    if (!(tol > 0.0)) throw std::invalid_argument("steady_by_evolution: tol must be positive");
    p.validate();
    grid.validate();
    SolverConfig cfg = cfg_in.adjusted(grid);
    const long per_unit = static_cast<long>(std::ceil(1.0 / cfg.dt - 1e-9));
    cfg.dt = 1.0 / per_unit;
    Stepper stepper(grid, p, cfg);
    Field f = initial_bump(grid, p);
    SteadyResult out;
    out.method = SteadyMethod::Evolution;
    double t = 0.0;
    Eigen::ArrayXXd prev;
    while (t < t_max) {
        prev = f.values();
        for (long n = 0; n < per_unit; ++n) stepper.advance(f.values());
        t += 1.0;
        ++out.iterations;
        if (!f.values().allFinite()) throw NumericalFailure("steady_by_evolution: non-finite state");
        if (grid.bc == Boundary::AbsorbingOutflow) f.values() /= f.mass();
        out.last_change = l1_diff(f.values(), prev, grid);
        if (out.last_change < tol) {
            out.converged = true;
            break;
        }
    }
    out.elapsed_time = t;
    f.values() /= f.mass();
    out.G = symmetrized(f);
    out.residual = generator_residual(out.G, p);
    return out;
}

SteadyResult steady_by_fixed_point(const ModelParams& p, const PhaseGrid& g, double tol, int max_sweeps) {
    if (!(tol > 0.0)) throw std::invalid_argument("steady_by_fixed_point: tol must be positive");
    p.validate();
    g.validate();
    if (p.dim != 1) throw std::invalid_argument("steady_by_fixed_point: one space dimension only");
    const int nx = g.nx, nv = g.nv;
    const double dx = g.dx(), dv = g.dv();
    const Eigen::ArrayXXd lam = lambda_table(g, p);
    const Eigen::ArrayXd m = discrete_maxwellian(g, p);
    // Optical depth of one cell along a characteristic, tau = Lambda dx / |v|.
    Eigen::ArrayXXd e_full(nx, nv), e_half(nx, nv), src_coef(nx, nv);
    for (int j = 0; j < nv; ++j) {
        const double inv_speed = 1.0 / std::abs(g.v(j));
        for (int i = 0; i < nx; ++i) {
            const double tau = lam(i, j) * dx * inv_speed;
            e_full(i, j) = std::exp(-tau);
            e_half(i, j) = std::exp(-0.5 * tau);
            src_coef(i, j) = m(j) / lam(i, j);
        }
    }
    Eigen::ArrayXd theta(nx);
    for (int i = 0; i < nx; ++i) theta(i) = std::exp(-std::abs(g.x(i)));
    theta /= theta.sum() * dx;

    Eigen::ArrayXXd G = Eigen::ArrayXXd::Zero(nx, nv), next(nx, nv);
    SteadyResult out;
    out.method = SteadyMethod::FixedPoint;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        parallel_for(nv, [&](int b, int e) {
            for (int j = b; j < e; ++j) {
                const bool forward = g.v(j) > 0.0;
                double edge = 0.0;
                for (int k = 0; k < nx; ++k) {
                    const int i = forward ? k : nx - 1 - k;
                    const double src = src_coef(i, j) * theta(i);
                    next(i, j) = edge * e_half(i, j) + src * (1.0 - e_half(i, j));
                    edge = edge * e_full(i, j) + src * (1.0 - e_full(i, j));
                }
            }
        });
        const double mass = next.sum() * (dx * dv);
        if (!std::isfinite(mass) || mass <= 0.0)
            throw NumericalFailure("steady_by_fixed_point: iterate mass is not finite and positive");
        out.iterate_mass.push_back(mass);
        if (sweep > 2 && mass > 1e6 * out.iterate_mass.front())
            throw NumericalFailure("steady_by_fixed_point: iterates diverge");
        next /= mass;
        out.last_change = l1_diff(next, G, g);
        G.swap(next);
        theta = (G * lam).rowwise().sum() * dv;
        out.iterations = sweep + 1;
        if (out.last_change < tol) {
            out.converged = true;
            break;
        }
    }
    Field f(g, G);
    f.values() /= f.mass();
    out.G = symmetrized(f);
    out.residual = generator_residual(out.G, p);
    return out;
}

CheckReport positivity_check(const Field& G) {
    const Eigen::ArrayXd rho = density(G);
    Eigen::Index imin = 0;
    const double mn = rho.size() ? rho.minCoeff(&imin) : 0.0;
    CheckReport r = CheckReport::make("positivity", -mn, -std::numeric_limits<double>::denorm_min());
    r.constants["min_rho"] = mn;
    r.constants["argmin_column"] = static_cast<double>(imin);
    if (!r.passed) r.notes.push_back("rho_G vanishes at column " + std::to_string(imin));
    return r;
}

namespace {

// (1/dx) int over the cell [ (k - 1/2) dx, (k + 1/2) dx ] of Phi(s y), d = 1.
Eigen::ArrayXd cell_averaged_kernel(int n, double dx, double s, double gamma) {
    Eigen::ArrayXd out(n);
    for (int k = 0; k < n; ++k) {
        const double a = s * std::max(0.0, (k - 0.5) * dx), b = s * (k + 0.5) * dx;
        double val = phi_interval_integral(a, b, gamma) / s;
        if (k == 0) val *= 2.0;
        out(k) = val / dx;
    }
    return out;
}

Eigen::ArrayXd convolve(const Eigen::ArrayXd& rho, const Eigen::ArrayXd& kernel, double dx) {
    const int n = static_cast<int>(rho.size());
    Eigen::ArrayXd out(n);
    parallel_for(n, [&](int b, int e) {
        for (int i = b; i < e; ++i) {
            double s = 0.0;
            for (int k = 0; k < n; ++k) s += rho(k) * kernel(std::abs(i - k));
            out(i) = s * dx;
        }
    });
    return out;
}

} // namespace

CheckReport convolution_sandwich_check(const Eigen::ArrayXd& rho, double dx, const ModelParams& p,
                                       double slack, double interior) {
    const int n = static_cast<int>(rho.size());
    const double chi = p.chi;
    const double c0 = moment_constant(0, p);
    const Eigen::ArrayXd k1 = cell_averaged_kernel(n, dx, 1.0 + chi, p.gamma) * ((1.0 - chi) / c0);
    const Eigen::ArrayXd k2 = cell_averaged_kernel(n, dx, 1.0 - chi, p.gamma) * ((1.0 + chi) / c0);
    const Eigen::ArrayXd lower = convolve(rho, k1, dx);
    const Eigen::ArrayXd upper = convolve(rho, k2, dx);
    const double x_max = 0.5 * n * dx;
    double worst_lo = -std::numeric_limits<double>::infinity(), worst_hi = worst_lo;
    int arg_lo = -1, arg_hi = -1;
    for (int i = 0; i < n; ++i) {
        const double x = -x_max + (i + 0.5) * dx;
        if (std::abs(x) > interior * x_max || !(rho(i) > 0.0)) continue;
        const double lo = (lower(i) - rho(i)) / rho(i);
        const double hi = (rho(i) - upper(i)) / rho(i);
        if (lo > worst_lo) worst_lo = lo, arg_lo = i;
        if (hi > worst_hi) worst_hi = hi, arg_hi = i;
    }
    CheckReport r = CheckReport::make("sandwich", std::max(worst_lo, worst_hi), slack);
    r.constants["lower_margin"] = worst_lo;
    r.constants["upper_margin"] = worst_hi;
    r.constants["lower_argmax_column"] = arg_lo;
    r.constants["upper_argmax_column"] = arg_hi;
    r.constants["phi1_mass"] = k1.sum() * 2.0 * dx - k1(0) * dx;
    r.constants["phi2_mass"] = k2.sum() * 2.0 * dx - k2(0) * dx;
    return r;
}

CheckReport convolution_sandwich_check(const Field& G, const ModelParams& p, double slack, double interior) {
    if (p.dim != 1) throw std::invalid_argument("sandwich: one space dimension only");
    return convolution_sandwich_check(density(G), G.grid().dx(), p, slack, interior);
}

double predicted_tail_rate(const ModelParams& p) {
    const double g = p.gamma;
    return (g + 1.0) / g * std::pow(1.0 + p.chi, g / (1.0 + g));
}

double predicted_tail_power(const ModelParams& p, double ell) {
    return ell - p.gamma / (1.0 + p.gamma) * (p.dim - 0.5);
}

void window_samples(const PhaseGrid& g, const Eigen::ArrayXd& y, double x_lo, double x_hi,
                    std::vector<double>& xs, std::vector<double>& logs) {
    xs.clear();
    logs.clear();
    for (int i = 0; i < g.nx; ++i) {
        const double x = g.x(i);
        if (x < x_lo || x > x_hi) continue;
        if (!(y(i) > 1e-300))
            throw std::domain_error("window sample underflows at x = " + std::to_string(x));
        xs.push_back(x);
        logs.push_back(std::log(y(i)));
    }
}

CheckReport tail_bounds_check(const Field& G, const ModelParams& p, double x_lo, double x_hi, double delta,
                              double ell) {
    if (ell < 0.0) ell = 1.0 / (1.0 + p.gamma);
    const PhaseGrid& g = G.grid();
    if (!(x_lo > 0.0 && x_hi > x_lo && x_hi < g.x_max))
        throw std::invalid_argument("tail_bounds_check: window must lie inside (0, x_max)");
    std::vector<double> xs, ls;
    window_samples(g, density(G), x_lo, x_hi, xs, ls);
    const double alpha = p.gamma / (1.0 + p.gamma);
    const FitReport fit = tail_fit(xs, ls, alpha);
    const double nu_pred = predicted_tail_rate(p);
    const double beta_pred = predicted_tail_power(p, ell);
    const double rel = std::abs(fit.nu_hat - nu_pred) / nu_pred;
    CheckReport r = CheckReport::make("tails", rel, delta);
    r.constants["nu_hat"] = fit.nu_hat;
    r.constants["beta_hat"] = fit.beta_hat;
    r.constants["c_hat"] = fit.c_hat;
    r.constants["fit_residual"] = fit.residual;
    r.constants["nu_predicted"] = nu_pred;
    r.constants["beta_predicted"] = beta_pred;
    r.constants["ell"] = ell;
    r.constants["window_lo"] = x_lo;
    r.constants["window_hi"] = x_hi;
    // Rate with the power fixed at its prediction, and local slopes at the window ends.
    double sxx = 0.0, sxy = 0.0, sx = 0.0, sy = 0.0;
    const double n = static_cast<double>(xs.size());
    for (std::size_t k = 0; k < xs.size(); ++k) {
        const double u = std::pow(xs[k], alpha), y = ls[k] - beta_pred * std::log(xs[k]);
        sx += u, sy += y, sxx += u * u, sxy += u * y;
    }
    r.constants["nu_fixed_power"] = -(n * sxy - sx * sy) / (n * sxx - sx * sx);
    if (fit.rank_deficient) r.notes.push_back("tail fit is rank deficient; widen the window");
    return r;
}

} // namespace rtlab
