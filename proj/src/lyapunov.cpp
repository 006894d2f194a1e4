#include "rtlab/lyapunov.hpp"

#include "rtlab/fit.hpp"
#include "rtlab/parallel.hpp"
#include "rtlab/quadrature.hpp"
#include "rtlab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace rtlab {

double WeightSpec::exponential_B(double a, double nu, double chi) {
    const double t1 = nu * a * a * (1 + 2 * chi) * (1 + 2 * chi) / (4 * (1 + chi) * (1 + chi));
    const double t2 = a * (3 - a + nu * a) * (2 + 3 * chi) / (2 * (1 - chi) * (1 + chi));
    return 1.0 + std::max(t1, t2);
}

double WeightSpec::polynomial_B_threshold(double k, double chi) {
    return std::pow((1 + 2 * chi) / (1 + chi), k) * std::pow(2 * k - 2, k - 1);
}

std::vector<std::string> WeightSpec::violations(const ModelParams& p) const {
    std::vector<std::string> out;
    if (kind == WeightKind::Exponential) {
        if (!(a > 0.0 && a <= p.gamma / (1.0 + p.gamma))) out.push_back("a outside (0, gamma/(1+gamma)]");
        if (!(b > 0.0 && b < 1.0 / p.gamma)) out.push_back("b outside (0, 1/gamma)");
        if (!(nu > 0.0)) out.push_back("nu must be positive");
        const double bmin = exponential_B(a, nu, p.chi);
        if (B < bmin * (1.0 - 1e-12)) {
            std::ostringstream os;
            os << "B = " << B << " below the closed-form value " << bmin;
            out.push_back(os.str());
        }
    } else {
        if (!(k > 1.0)) out.push_back("k must exceed 1");
        const double bmin = polynomial_B_threshold(k, p.chi);
        if (!(B > bmin)) {
            std::ostringstream os;
            os << "B = " << B << " not above the positivity threshold " << bmin;
            out.push_back(os.str());
        }
    }
    return out;
}

double weight_eval(double x, double v, const WeightSpec& s, const ModelParams& p) {
    const double X = japanese(x);
    const double z = x * v / X;
    const double Psi = psi_product(z, p);
    const double chi = p.chi;
    double m;
    if (s.kind == WeightKind::Exponential) {
        const double a = s.a, nu = s.nu;
        const double poly = 1.0 + nu * a * x * v * std::pow(X, a - 2.0) -
                            nu * a * chi / (1.0 + chi) * Psi * std::pow(X, a - 1.0) +
                            nu * s.B * v * v * std::pow(X, 2.0 * a - 2.0);
        m = poly * std::exp(nu * std::pow(X, a)) + nu * std::exp(s.b * std::pow(std::abs(v), p.gamma));
    } else {
        const double k = s.k;
        m = std::pow(X, k) + k * x * v * std::pow(X, k - 2.0) - k * chi / (1.0 + chi) * Psi * std::pow(X, k - 1.0) +
            s.B * std::pow(japanese(v), 2.0 * k);
    }
    if (!std::isfinite(m)) {
        std::ostringstream os;
        os << "weight_eval overflows at (x, v) = (" << x << ", " << v << ")";
        throw std::overflow_error(os.str());
    }
    return m;
}

ExponentialBounds exponential_bounds(const WeightSpec& s, const ModelParams& p) {
    const double chi = p.chi, a = s.a, nu = s.nu, B = s.B, b = s.b, g = p.gamma;
    ExponentialBounds e;
    e.delta1 = nu * a * a * (1 + 2 * chi) * (1 + 2 * chi) / (4 * (1 + chi) * (1 + chi) * B);
    e.delta1_alt = nu * a * a * (2 + 3 * chi) * (2 + 3 * chi) / (16 * (1 + chi) * (1 + chi) * B);
    const double m1 = std::pow(4.0 / (b * g), 2.0 / g) * std::exp(4.0 / g);
    const double m2 = std::pow(2.0 * nu / b, (2.0 - 2.0 * a) / a);
    e.delta2 = 2.0 + nu * (a * a * nu + B) * std::max(m1, m2) + nu;
    return e;
}

Eigen::ArrayXXd dual_generator_apply(const std::function<double(double, double)>& phi, const PhaseGrid& g,
                                     const ModelParams& p, double h) {
    if (h <= 0.0) h = g.dx();
    const double c0 = moment_constant(0, p);
    Eigen::ArrayXXd out(g.nx, g.nv);
    parallel_for(g.nx, [&](int b, int e) {
        for (int i = b; i < e; ++i) {
            const double x = g.x(i);
            auto integrand = [&](double v) {
                const double w = std::exp(-std::pow(v, p.gamma) / p.gamma) / c0;
                return w == 0.0 ? 0.0 : (phi(x, v) + phi(x, -v)) * w;
            };
            const double avg = integrate_upper(integrand, 0.0, 1e-11);
            for (int j = 0; j < g.nv; ++j) {
                const double v = g.v(j);
                const double dphi = (-phi(x + 2 * h, v) + 8 * phi(x + h, v) - 8 * phi(x - h, v) + phi(x - 2 * h, v)) /
                                    (12.0 * h);
                out(i, j) = v * dphi + tumbling_rate_at(x, v, p) * (avg - phi(x, v));
            }
        }
    });
    return out;
}

CheckReport DriftReport::to_check(const std::string& name, double tol) const {
    CheckReport r = CheckReport::make(name, max_violation, tol);
    r.constants["C"] = fitted_C;
    r.constants["eps"] = fitted_eps;
    r.constants["R"] = fitted_R;
    r.constants["argmax_x"] = argmax_x;
    r.constants["argmax_v"] = argmax_v;
    r.constants["min_weight"] = min_weight;
    r.notes = notes;
    return r;
}

DriftReport drift_check(const WeightSpec& spec, const ModelParams& p, const PhaseGrid& g, double tol,
                        std::optional<std::pair<double, double>> supplied) {
    DriftReport rep;
    std::vector<std::string> failures = spec.violations(p);
    auto m_fn = [&](double x, double v) { return weight_eval(x, v, spec, p); };
    const Eigen::ArrayXXd m = sample(g, m_fn);
    const Eigen::ArrayXXd L = dual_generator_apply(m_fn, g, p);
    rep.min_weight = m.minCoeff();
    if (!(rep.min_weight > 0.0)) failures.push_back("weight is not positive on the grid");

    const bool expo = spec.kind == WeightKind::Exponential;
    Eigen::ArrayXXd w(g.nx, g.nv);
    for (int j = 0; j < g.nv; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double X = japanese(g.x(i));
            w(i, j) = expo ? std::pow(X, spec.a - 1.0) * m(i, j)
                           : std::pow(X, spec.k - 1.0) + std::pow(japanese(g.v(j)), 2.0 * spec.k);
        }

    // Small set: the sublevel set {m <= R} with R the largest weight on the half box.
    double R = 0.0;
    for (int j = 0; j < g.nv; ++j)
        for (int i = 0; i < g.nx; ++i)
            if (std::abs(g.x(i)) <= 0.5 * g.x_max && std::abs(g.v(j)) <= 0.5 * g.v_max) R = std::max(R, m(i, j));
    rep.fitted_R = R;
    const Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> outer = m > R;
    bool touches = false;
    for (int j = 0; j < g.nv; ++j) touches |= !outer(0, j) || !outer(g.nx - 1, j);
    for (int i = 0; i < g.nx; ++i) touches |= !outer(i, 0) || !outer(i, g.nv - 1);
    rep.small_set_bounded = !touches;

    double eps = std::numeric_limits<double>::infinity();
    for (int j = 0; j < g.nv; ++j)
        for (int i = 0; i < g.nx; ++i)
            if (outer(i, j)) {
                const double e = -L(i, j) / w(i, j);
                if (e < eps) eps = e, rep.argmax_x = g.x(i), rep.argmax_v = g.v(j);
            }
    if (!std::isfinite(eps)) eps = 0.0;
    double C;
    const double scale = expo ? spec.nu : 1.0;
    if (supplied) {
        C = supplied->first;
        eps = supplied->second;
    } else {
        C = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < g.nv; ++j)
            for (int i = 0; i < g.nx; ++i)
                if (expo || !outer(i, j)) C = std::max(C, (L(i, j) + eps * w(i, j)) / scale);
        C = std::max(C, 0.0);
    }
    rep.fitted_C = C;
    rep.fitted_eps = eps;

    double viol = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < g.nv; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double rhs = ((expo || !outer(i, j)) ? C * scale : 0.0) - eps * w(i, j);
            const double d = (L(i, j) - rhs) / std::max(1.0, std::abs(L(i, j)));
            if (d > viol) {
                viol = d;
                if (supplied) rep.argmax_x = g.x(i), rep.argmax_v = g.v(j);
            }
        }
    rep.max_violation = std::max(viol, -eps);
    if (!failures.empty()) rep.max_violation = std::numeric_limits<double>::infinity();
    rep.notes = failures;
    if (!rep.small_set_bounded) rep.notes.push_back("sublevel set {m <= R} reaches the grid edge");
    rep.passed = rep.max_violation <= tol;
    if (!(eps > 0.0)) {
        std::ostringstream os;
        os << "no positive eps: drift is nonnegative at (x, v) = (" << rep.argmax_x << ", " << rep.argmax_v << ")";
        rep.notes.push_back(os.str());
    }
    return rep;
}

MinorisationReport minorisation_constants(const ModelParams& p, double X0, double V0) {
    if (!(X0 > 0.0 && V0 > 0.0)) throw std::invalid_argument("minorisation: X0 and V0 must be positive");
    MinorisationReport r;
    r.X0 = X0;
    r.V0 = V0;
    r.T = 2.0 + 2.0 * X0 / V0;
    r.C0 = maxwellian(V0, p);
    const double base = r.C0 * r.C0 * (1.0 - p.chi) * (1.0 - p.chi) / 4.0;
    r.alpha_density = base * std::exp(-(1.0 + p.chi) * r.T);
    r.alpha_density_statement = base * std::exp(-(1.0 - p.chi) * r.T);
    r.alpha = r.alpha_density * (2.0 * X0) * (2.0 * V0);
    r.notes.push_back("exponent: the stated bound carries exp(-(1-chi)T), the derivation gives exp(-(1+chi)T); "
                      "alpha_density uses the derived value, alpha_density_statement the stated one");
    return r;
}

MinorisationReport minorisation_estimate(const ModelParams& p, const PhaseGrid& g, const WeightSpec& spec,
                                         double level) {
    double X0 = 0.0, V0 = 0.0;
    bool any = false, edge = false;
    for (int j = 0; j < g.nv; ++j)
        for (int i = 0; i < g.nx; ++i)
            if (weight_eval(g.x(i), g.v(j), spec, p) <= level) {
                any = true;
                X0 = std::max(X0, std::abs(g.x(i)));
                V0 = std::max(V0, std::abs(g.v(j)));
                edge |= i == 0 || j == 0 || i == g.nx - 1 || j == g.nv - 1;
            }
    if (!any) throw std::invalid_argument("minorisation: level set is empty on the grid");
    if (edge) throw std::invalid_argument("minorisation: level set is not bounded inside the grid");
    MinorisationReport r = minorisation_constants(p, X0, V0);
    r.level = level;
    return r;
}

void minorisation_cross_check(MinorisationReport& r, const ModelParams& p, const PhaseGrid& sim, int seeds,
                              std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(-r.X0, r.X0), uv(-r.V0, r.V0);
    SolverConfig cfg;
    cfg.dt = 1.0;
    cfg.t_final = r.T;
    cfg.splitting = Splitting::Strang;
    r.sim_min = std::numeric_limits<double>::infinity();
    r.seeds = seeds;
    for (int s = 0; s < seeds; ++s) {
        const double x0 = ux(rng), v0 = uv(rng);
        const int i0 = std::clamp(static_cast<int>((x0 + sim.x_max) / sim.dx()), 0, sim.nx - 1);
        const int j0 = std::clamp(static_cast<int>((v0 + sim.v_max) / sim.dv()), 0, sim.nv - 1);
        Field f0(sim);
        f0.values()(i0, j0) = 1.0 / (sim.dx() * sim.dv());
        const Trajectory tr = run(f0, cfg, p, {});
        const auto& F = tr.final_state.values();
        double mn = std::numeric_limits<double>::infinity();
        for (int j = 0; j < sim.nv; ++j)
            for (int i = 0; i < sim.nx; ++i)
                if (std::abs(sim.x(i)) <= r.X0 && std::abs(sim.v(j)) <= r.V0) mn = std::min(mn, F(i, j));
        if (mn < r.sim_min) r.sim_min = mn, r.worst_x0 = sim.x(i0), r.worst_v0 = sim.v(j0);
    }
    r.sim_min_ratio = r.sim_min / r.alpha_density;
    r.passed = r.sim_min >= 0.5 * r.alpha_density;
    if (!r.passed) {
        std::ostringstream os;
        os << "box minimum below half the predicted constant for the bump at (" << r.worst_x0 << ", " << r.worst_v0
           << ")";
        r.notes.push_back(os.str());
    }
}

namespace {

struct LogFit {
    double slope, intercept, r2;
};

LogFit fit_log(const std::vector<double>& s, const std::vector<double>& y) {
    const Eigen::Index n = static_cast<Eigen::Index>(s.size());
    Eigen::VectorXd S(n), Y(n);
    for (Eigen::Index k = 0; k < n; ++k) S(k) = s[k], Y(k) = y[k];
    double c;
    const double slope = linear_slope(S, Y, &c);
    const double mean = Y.mean();
    const double tot = (Y.array() - mean).square().sum();
    const double res = (Y.array() - (c + slope * S.array())).square().sum();
    return {slope, c, tot > 0.0 ? 1.0 - res / tot : 0.0};
}

} // namespace

RateFit rate_fit(const std::vector<double>& t, const std::vector<double>& dist, RateModel model, double exponent,
                 double t_transient, double noise_floor) {
    if (t.size() != dist.size()) throw std::invalid_argument("rate_fit: size mismatch");
    std::vector<double> ts, ys;
    for (std::size_t k = 0; k < t.size(); ++k)
        if (t[k] >= t_transient && dist[k] > noise_floor) ts.push_back(t[k]), ys.push_back(std::log(dist[k]));
    RateFit r;
    r.samples = static_cast<int>(ts.size());
    r.exponent = exponent;
    if (r.samples < 20) throw std::invalid_argument("rate_fit: need at least 20 samples past the transient");
    auto basis = [&](double tt, double a) {
        return model == RateModel::Subexponential ? std::pow(tt, a) : std::log(japanese(tt));
    };
    auto fit_with = [&](double a) {
        std::vector<double> s(ts.size());
        for (std::size_t k = 0; k < ts.size(); ++k) s[k] = basis(ts[k], a);
        return fit_log(s, ys);
    };
    const LogFit f = fit_with(exponent);
    r.rate = -f.slope;
    r.log_C = f.intercept;
    r.goodness = f.r2;
    if (model == RateModel::Subexponential) {
        double lo = 0.02, hi = 1.5;
        const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
        auto res = [&](double a) { return -fit_with(a).r2; };
        double c = hi - phi * (hi - lo), d = lo + phi * (hi - lo);
        double fc = res(c), fd = res(d);
        for (int it = 0; it < 80; ++it) {
            if (fc < fd) hi = d, d = c, fd = fc, c = hi - phi * (hi - lo), fc = res(c);
            else lo = c, c = d, fc = fd, d = lo + phi * (hi - lo), fd = res(d);
        }
        r.a_eff = 0.5 * (lo + hi);
    }
    const std::size_t half = ts.size() / 2;
    double env = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < half; ++k) env = std::max(env, ys[k] + r.rate * basis(ts[k], exponent));
    r.envelope_C = std::exp(env);
    for (std::size_t k = half; k < ts.size(); ++k)
        if (ys[k] > env - r.rate * basis(ts[k], exponent) + 1e-12) ++r.crossings;
    r.accepted = r.rate > 0.0 && r.goodness >= 0.9;
    return r;
}

double harris_envelope_polynomial(double t, double kappa) { return 1.0 / std::pow(1.0 + t, 1.0 / kappa); }

double harris_envelope_subexp(double t, double lambda, double sigma) {
    return std::exp(-lambda * std::pow(t, 1.0 / (1.0 + sigma)));
}

} // namespace rtlab
