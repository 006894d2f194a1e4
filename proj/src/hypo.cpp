#include "rtlab/hypo.hpp"

#include "rtlab/asymptotics.hpp"
#include "rtlab/fit.hpp"
#include "rtlab/parallel.hpp"
#include "rtlab/steady.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace rtlab {

void EllipticConfig::validate(const ModelParams& p) const {
    if (!(ell > 0.0 && ell < 2.0 / (1.0 + p.gamma)))
        throw std::invalid_argument("elliptic: ell must lie in (0, 2/(1+gamma))");
    if (!(tolerance > 0.0)) throw std::invalid_argument("elliptic: tolerance must be positive");
}

EllipticOperator EllipticOperator::build(const Eigen::ArrayXd& rho, const Eigen::ArrayXd& V, double dx,
                                         const Eigen::ArrayXd& xs, double ell) {
    const Eigen::Index n = rho.size();
    EllipticOperator op;
    op.dx = dx;
    op.lower = Eigen::ArrayXd::Zero(n);
    op.upper = Eigen::ArrayXd::Zero(n);
    op.diag = rho;
    op.weight.resize(n);
    const double inv = 1.0 / (dx * dx);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double X = std::pow(japanese(xs(i)), ell);
        op.weight(i) = 1.0 / X;
        if (i > 0) {
            const double vh = 0.5 * (V(i - 1) + V(i)) * inv * X;
            op.lower(i) = -vh;
            op.diag(i) += vh;
        }
        if (i + 1 < n) {
            const double vh = 0.5 * (V(i) + V(i + 1)) * inv * X;
            op.upper(i) = -vh;
            op.diag(i) += vh;
        }
    }
    return op;
}

Eigen::ArrayXd EllipticOperator::apply(const Eigen::ArrayXd& u) const {
    const Eigen::Index n = u.size();
    Eigen::ArrayXd out = diag * u;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (i > 0) out(i) += lower(i) * u(i - 1);
        if (i + 1 < n) out(i) += upper(i) * u(i + 1);
    }
    return out;
}

Eigen::ArrayXd EllipticOperator::solve(const Eigen::ArrayXd& rhs) const {
    const Eigen::Index n = rhs.size();
    Eigen::ArrayXd c(n), d(n), u(n);
    double piv = diag(0);
    if (!(std::abs(piv) > 0.0)) throw NumericalFailure("elliptic: singular pivot at row 0");
    c(0) = upper(0) / piv;
    d(0) = rhs(0) / piv;
    for (Eigen::Index i = 1; i < n; ++i) {
        piv = diag(i) - lower(i) * c(i - 1);
        if (!(std::abs(piv) > 0.0)) throw NumericalFailure("elliptic: singular pivot at row " + std::to_string(i));
        c(i) = upper(i) / piv;
        d(i) = (rhs(i) - lower(i) * d(i - 1)) / piv;
    }
    u(n - 1) = d(n - 1);
    for (Eigen::Index i = n - 2; i >= 0; --i) u(i) = d(i) - c(i) * u(i + 1);
    return u;
}

double EllipticOperator::inner(const Eigen::ArrayXd& u, const Eigen::ArrayXd& w) const {
    return (u * w * weight).sum() * dx;
}

namespace {

EllipticOperator operator_for(const Field& G, double ell) {
    const PhaseGrid& g = G.grid();
    const MomentSet mg = moments(G, ModelParams{});
    return EllipticOperator::build(mg.rho, mg.p2, g.dx(), g.xs(), ell);
}

Eigen::ArrayXd solve_checked(const EllipticOperator& op, const Eigen::ArrayXd& rhs, double tol) {
    const Eigen::ArrayXd u = op.solve(rhs);
    const double scale = rhs.abs().maxCoeff();
    if (scale == 0.0) return u;
    const double res = (op.apply(u) - rhs).abs().maxCoeff() / scale;
    if (!(res <= tol)) {
        std::ostringstream os;
        os << "elliptic: relative residual " << res << " exceeds " << tol;
        throw NumericalFailure(os.str());
    }
    return u;
}

Eigen::ArrayXd central_derivative(const Eigen::ArrayXd& u, double dx) {
    const Eigen::Index n = u.size();
    Eigen::ArrayXd d = Eigen::ArrayXd::Zero(n);
    for (Eigen::Index i = 1; i + 1 < n; ++i) d(i) = (u(i + 1) - u(i - 1)) / (2.0 * dx);
    return d;
}

} // namespace

Eigen::ArrayXd elliptic_solve_B(const Eigen::ArrayXd& rhs, const Field& G, const EllipticConfig& cfg) {
    if (rhs.size() != G.grid().nx) throw std::invalid_argument("elliptic: rhs length differs from nx");
    const EllipticOperator op = operator_for(G, cfg.ell);
    if (!(op.diag.minCoeff() > 0.0)) throw NumericalFailure("elliptic: rho_G must be positive");
    return solve_checked(op, rhs, cfg.tolerance);
}

namespace {

EntropyRecord entropy_with(const Field& f, const Field& G, double eps, const EllipticOperator& op,
                           const MomentSet& mg, double tol) {
    const PhaseGrid& g = G.grid();
    const double cell = g.dx() * g.dv();
    const Eigen::ArrayXXd dev = f.values() - G.values();
    const Field D(g, dev);
    const MomentSet md = moments(D, ModelParams{});
    EntropyRecord r;
    r.l2_norm_sq = (dev.square() / G.values()).sum() * cell;
    const Eigen::ArrayXd ratio = md.rho / mg.rho;
    const Eigen::ArrayXXd micro = dev - G.values().colwise() * ratio;
    r.micro = (micro.square() / G.values()).sum() * cell;
    r.macro_weighted = (md.rho.square() / mg.rho * op.weight).sum() * g.dx();
    if (eps != 0.0) {
        const Eigen::ArrayXd u = solve_checked(op, md.rho, tol);
        r.perturbation = (md.flux * central_derivative(u, g.dx())).sum() * g.dx();
    }
    r.H = r.l2_norm_sq + eps * r.perturbation;
    return r;
}

} // namespace

EntropyRecord entropy(const Field& f, const Field& G, double eps, const EllipticConfig& cfg) {
    if (!f.grid().same_shape(G.grid())) throw std::invalid_argument("entropy: grid mismatch");
    const EllipticOperator op = operator_for(G, cfg.ell);
    return entropy_with(f, G, eps, op, moments(G, ModelParams{}), cfg.tolerance);
}

CheckReport moment_asymptotics_check(const Field& G, const ModelParams& p, double x_lo, double x_hi) {
    const MomentSet mg = moments(G, p);
    const double alpha = p.gamma / (1.0 + p.gamma);
    const PhaseGrid& g = G.grid();
    auto fit_profile = [&](const Eigen::ArrayXd& y) {
        std::vector<double> xs, logs;
        window_samples(g, y, x_lo, x_hi, xs, logs);
        for (double& x : xs) x = japanese(x);
        return tail_fit(xs, logs, alpha);
    };
    const FitReport fr = fit_profile(mg.rho);
    const FitReport f2 = fit_profile(mg.p2);
    const FitReport f4 = fit_profile(mg.p4);
    const Eigen::ArrayXd R = mg.rho * mg.p4 / mg.p2.square();
    std::vector<double> xs, logs;
    window_samples(g, R, x_lo, x_hi, xs, logs);
    Eigen::VectorXd lx(xs.size()), ly(xs.size());
    for (std::size_t k = 0; k < xs.size(); ++k) lx(k) = std::log(japanese(xs[k])), ly(k) = logs[k];
    double c_R;
    const double ell_hat = linear_slope(lx, ly, &c_R);

    const double nus[3] = {fr.nu_hat, f2.nu_hat, f4.nu_hat};
    const double mean = (nus[0] + nus[1] + nus[2]) / 3.0;
    const double spread = (*std::max_element(nus, nus + 3) - *std::min_element(nus, nus + 3)) / std::abs(mean);
    const double beta_diff = fr.beta_hat + f4.beta_hat - 2.0 * f2.beta_hat;
    const double viol = std::max(spread / 0.05, std::abs(ell_hat - beta_diff) / 0.1);
    CheckReport r = CheckReport::make("moment_asymptotics", viol, 1.0);
    r.constants["nu_rho"] = fr.nu_hat;
    r.constants["nu_p2"] = f2.nu_hat;
    r.constants["nu_p4"] = f4.nu_hat;
    r.constants["beta_rho"] = fr.beta_hat;
    r.constants["beta_p2"] = f2.beta_hat;
    r.constants["beta_p4"] = f4.beta_hat;
    r.constants["ell_hat"] = ell_hat;
    r.constants["ratio_prefactor"] = std::exp(c_R);
    r.constants["nu_spread"] = spread;
    r.constants["beta_combination"] = beta_diff;
    if (fr.rank_deficient || f2.rank_deficient || f4.rank_deficient) r.notes.push_back("rank-deficient moment fit");
    return r;
}

CheckReport vg_equivalence_check(const Field& G, const ModelParams& p) {
    const MomentSet mg = moments(G, p);
    const double ratio0 = moment_constant(0, p) / moment_constant(2, p);
    const double mn = mg.p2.minCoeff();
    CheckReport r = CheckReport::make("vg_equivalence", mn > 0.0 ? 0.0 : 1.0, 0.0);
    r.constants["min_p2"] = mn;
    if (mn > 0.0 && (mg.rho > 0.0).all()) {
        const Eigen::ArrayXd q = mg.p2 / mg.rho * ratio0;
        r.constants["min_ratio"] = q.minCoeff();
        r.constants["max_ratio"] = q.maxCoeff();
    } else {
        Eigen::Index i;
        mg.p2.minCoeff(&i);
        std::ostringstream os;
        os << "p2 vanishes at x = " << G.grid().x(static_cast<int>(i));
        r.notes.push_back(os.str());
    }
    return r;
}

CoercivityValues coercivity_values(const Field& f, const Field& G, const ModelParams& p) {
    const PhaseGrid& g = G.grid();
    if (!f.grid().same_shape(g)) throw std::invalid_argument("coercivity: grid mismatch");
    const Eigen::ArrayXXd lam = lambda_table(g, p);
    const Eigen::ArrayXd M = discrete_maxwellian(g, p);
    const double dv = g.dv(), dx = g.dx();
    const int nv = g.nv;
    Eigen::ArrayXd q(g.nx), e(g.nx);
    parallel_for(g.nx, [&](int b, int en) {
        Eigen::ArrayXd h(nv), w(nv);
        for (int i = b; i < en; ++i) {
            double theta = 0.0, gain = 0.0;
            for (int k = 0; k < nv; ++k) {
                h(k) = f(i, k) / G(i, k);
                w(k) = lam(i, k) * G(i, k);
                theta += w(k) * dv;
                gain += lam(i, k) * f(i, k) * dv;
            }
            double qs = 0.0;
            for (int j = 0; j < nv; ++j) {
                double inner = 0.0;
                for (int k = 0; k < nv; ++k) {
                    const double d = h(j) - h(k);
                    inner += w(k) * d * d;
                }
                qs += M(j) * inner;
            }
            q(i) = -0.5 * qs * dv * dv;
            double es = 0.0;
            for (int j = 0; j < nv; ++j)
                es += h(j) * M(j) * gain - lam(i, j) * f(i, j) * h(j) +
                      0.5 * h(j) * h(j) * (lam(i, j) * G(i, j) - M(j) * theta);
            e(i) = es * dv;
        }
    });
    CoercivityValues v;
    v.quadratic_form = q.sum() * dx;
    v.expanded = e.sum() * dx;
    const double cell = dx * dv;
    v.generator = (apply_generator(f, p).values() * f.values() / G.values()).sum() * cell;
    const Field pf = project_pi(f, G);
    v.micro = ((f.values() - pf.values()).square() / G.values()).sum() * cell;
    v.norm_sq = (f.values().square() / G.values()).sum() * cell;
    return v;
}

CheckReport micro_coercivity_check(const Field& f, const Field& G, const ModelParams& p, double tol,
                                   double agree_tol) {
    const CoercivityValues v = coercivity_values(f, G, p);
    const double scale = std::max({std::abs(v.quadratic_form), std::abs(v.expanded), 1e-9 * v.norm_sq, 1e-300});
    const double agree = std::abs(v.quadratic_form - v.expanded) / scale;
    const double bound = -(1.0 - p.chi) / 2.0 * v.micro;
    double viol = (v.quadratic_form - bound) / std::max(v.norm_sq, 1e-300);
    CheckReport r;
    r.name = "micro_coercivity";
    r.tolerance = tol;
    if (!(agree <= agree_tol)) {
        r.notes.push_back("quadratic form disagrees with the expanded generator value");
        viol = std::numeric_limits<double>::infinity();
    }
    r.set_violation(viol);
    r.constants["quadratic_form"] = v.quadratic_form;
    r.constants["expanded"] = v.expanded;
    r.constants["generator_upwind"] = v.generator;
    r.constants["micro"] = v.micro;
    r.constants["norm_sq"] = v.norm_sq;
    r.constants["agreement"] = agree;
    return r;
}

CheckReport coercivity_suite(const Field& G, const ModelParams& p, int draws, std::uint64_t seed, double tol) {
    const PhaseGrid& g = G.grid();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const double gmax = G.values().maxCoeff();
    CheckReport worst;
    int passed = 0;
    double worst_agree = 0.0;
    for (int d = 0; d < draws; ++d) {
        Eigen::ArrayXXd f(g.nx, g.nv);
        for (int j = 0; j < g.nv; ++j)
            for (int i = 0; i < g.nx; ++i) f(i, j) = d % 2 == 0 ? 2.0 * U(rng) * G(i, j) : U(rng) * gmax;
        const CheckReport r = micro_coercivity_check(Field(g, std::move(f)), G, p, tol);
        passed += r.passed;
        worst_agree = std::max(worst_agree, r.constants.at("agreement"));
        if (d == 0 || r.max_violation > worst.max_violation) worst = r;
    }
    worst.name = "coercivity";
    worst.constants["draws"] = draws;
    worst.constants["passed_draws"] = passed;
    worst.constants["worst_agreement"] = worst_agree;
    return worst;
}

namespace {

std::vector<Field> random_deviations(const Field& G, int draws, std::uint64_t seed) {
    const PhaseGrid& g = G.grid();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    std::uniform_real_distribution<double> ph(0.0, 2.0 * M_PI);
    const double L = g.x_max;
    const double vs = std::max(1.0, 0.25 * g.v_max);
    std::vector<Field> out;
    for (int d = 0; d < draws; ++d) {
        Eigen::ArrayXXd r(g.nx, g.nv);
        if (d % 2 == 0) {
            double a[6], b[6], pa[6], pb[6];
            for (int k = 0; k < 6; ++k) a[k] = U(rng), b[k] = U(rng), pa[k] = ph(rng), pb[k] = ph(rng);
            for (int j = 0; j < g.nv; ++j)
                for (int i = 0; i < g.nx; ++i) {
                    const double x = g.x(i), v = g.v(j);
                    double s = 0.0;
                    for (int k = 0; k < 6; ++k)
                        s += a[k] * std::cos((k + 1) * M_PI * x / L + pa[k]) +
                             b[k] * v / vs * std::cos((k + 1) * M_PI * x / L + pb[k]);
                    r(i, j) = s;
                }
        } else {
            for (int j = 0; j < g.nv; ++j)
                for (int i = 0; i < g.nx; ++i) r(i, j) = U(rng);
        }
        Eigen::ArrayXXd dev = G.values() * r;
        dev -= G.values() * (dev.sum() / G.values().sum());
        out.emplace_back(g, std::move(dev));
    }
    return out;
}

} // namespace

std::pair<double, double> entropy_band(const Field& G, double eps, const EllipticConfig& cfg, int draws,
                                       std::uint64_t seed) {
    const EllipticOperator op = operator_for(G, cfg.ell);
    const MomentSet mg = moments(G, ModelParams{});
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const Field& d : random_deviations(G, draws, seed)) {
        const Field f(G.grid(), G.values() + d.values());
        const EntropyRecord rec = entropy_with(f, G, eps, op, mg, cfg.tolerance);
        const double q = rec.H / rec.l2_norm_sq;
        lo = std::min(lo, q);
        hi = std::max(hi, q);
    }
    return {lo, hi};
}

double entropy_eps_critical(const Field& G, const EllipticConfig& cfg, int draws, std::uint64_t seed) {
    const EllipticOperator op = operator_for(G, cfg.ell);
    const MomentSet mg = moments(G, ModelParams{});
    double K = 0.0;
    for (const Field& d : random_deviations(G, draws, seed)) {
        const Field f(G.grid(), G.values() + d.values());
        const EntropyRecord rec = entropy_with(f, G, 1.0, op, mg, cfg.tolerance);
        K = std::max(K, std::abs(rec.perturbation) / rec.l2_norm_sq);
    }
    return K > 0.0 ? 1.0 / K : std::numeric_limits<double>::infinity();
}

DissipationResult dissipation_check(const std::vector<double>& t, const std::vector<Field>& traj, const Field& G,
                                    double eps, const EllipticConfig& cfg, double t_start) {
    if (t.size() != traj.size() || traj.size() < 3) throw std::invalid_argument("dissipation: need >= 3 snapshots");
    const EllipticOperator op = operator_for(G, cfg.ell);
    const MomentSet mg = moments(G, ModelParams{});
    DissipationResult out;
    out.eps = eps;
    bool mass_warned = false;
    for (std::size_t k = 0; k < traj.size(); ++k) {
        EntropyRecord rec = entropy_with(traj[k], G, eps, op, mg, cfg.tolerance);
        rec.t = t[k];
        if (k > 0) rec.Hdot = (rec.H - out.records.back().H) / (t[k] - t[k - 1]);
        out.records.push_back(rec);
        const double dm = std::abs(traj[k].mass() - G.mass());
        if (!mass_warned && dm > 1e-8 * G.mass()) {
            out.report.notes.push_back("deviation mass is not zero");
            mass_warned = true;
        }
    }
    int increases = 0, total = 0;
    std::vector<double> ratios;
    double c1 = std::numeric_limits<double>::infinity(), c2 = 0.0;
    for (std::size_t k = 0; k < out.records.size(); ++k) {
        const EntropyRecord& r = out.records[k];
        if (r.l2_norm_sq > 0.0) {
            c1 = std::min(c1, r.H / r.l2_norm_sq);
            c2 = std::max(c2, r.H / r.l2_norm_sq);
        }
        if (k == 0 || t[k - 1] < t_start) continue;
        const EntropyRecord& q = out.records[k - 1];
        ++total;
        if (r.H > q.H + 1e-14 * std::abs(q.H)) ++increases;
        const double D = 0.5 * (r.micro + r.macro_weighted + q.micro + q.macro_weighted);
        ratios.push_back(D > 0.0 ? -r.Hdot / D : 0.0);
    }
    if (ratios.empty()) throw std::invalid_argument("dissipation: no samples after t_start");
    std::sort(ratios.begin(), ratios.end());
    out.kappa = ratios[static_cast<std::size_t>(std::floor(0.05 * (ratios.size() - 1)))];
    out.c1 = std::isfinite(c1) ? c1 : 1.0;
    out.c2 = c2;
    const double viol = increases + (out.kappa > 0.0 ? 0.0 : 1.0) + (out.c1 > 0.0 ? 0.0 : 1.0);
    std::vector<std::string> notes = std::move(out.report.notes);
    out.report = CheckReport::make("dissipation", viol, 0.0);
    out.report.notes = std::move(notes);
    out.report.constants["eps"] = eps;
    out.report.constants["kappa"] = out.kappa;
    out.report.constants["c1"] = out.c1;
    out.report.constants["c2"] = out.c2;
    out.report.constants["increases"] = increases;
    out.report.constants["samples"] = total;
    out.report.constants["median_ratio"] = ratios[ratios.size() / 2];
    if (out.c1 <= 0.0) out.report.notes.push_back("eps outside the equivalence range: H is not a norm");
    return out;
}

DissipationResult dissipation_select(const std::vector<double>& t, const std::vector<Field>& traj, const Field& G,
                                     const EllipticConfig& cfg, double t_start, int halvings) {
    double eps = 1e-2;
    DissipationResult best;
    for (int h = 0; h <= halvings; ++h, eps *= 0.5) {
        const auto band = entropy_band(G, eps, cfg, 20, 7);
        best = dissipation_check(t, traj, G, eps, cfg, t_start);
        best.c1 = std::min(best.c1, band.first);
        best.c2 = std::max(best.c2, band.second);
        best.report.constants["c1"] = best.c1;
        best.report.constants["c2"] = best.c2;
        if (best.c1 > 0.0 && best.report.constants["increases"] == 0.0) break;
    }
    return best;
}

PoincareResult poincare_ratio(const Eigen::ArrayXd& xs, const Eigen::ArrayXd& rho, const Eigen::ArrayXd& P,
                              double gamma, const std::vector<std::function<double(double)>>& family) {
    const Eigen::Index n = xs.size();
    const double span = xs(n - 1) - xs(0);
    const double h = 1e-5 * span;
    Eigen::ArrayXd wl(n);
    for (Eigen::Index i = 0; i < n; ++i) wl(i) = std::pow(japanese(xs(i)), -2.0 / (1.0 + gamma)) * P(i);
    const double rsum = rho.sum();
    PoincareResult out;
    for (std::size_t m = 0; m < family.size(); ++m) {
        const auto& u = family[m];
        Eigen::ArrayXd val(n), der(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            val(i) = u(xs(i));
            der(i) = (u(xs(i) + h) - u(xs(i) - h)) / (2.0 * h);
        }
        const double ubar = (val * rho).sum() / rsum;
        const double lhs = ((val - ubar).square() * wl).sum();
        const double rhs = (der.square() * P).sum();
        const double scale = (val.square() * wl).sum();
        if (!(rhs > 1e-14 * std::max(scale, 1e-300)) || !(lhs > 1e-14 * scale)) {
            out.ratios.push_back(std::numeric_limits<double>::quiet_NaN());
            continue;
        }
        const double q = lhs / rhs;
        out.ratios.push_back(q);
        if (q > out.C_P) out.C_P = q, out.argmax = static_cast<int>(m);
    }
    return out;
}

std::vector<std::function<double(double)>> poincare_family(double L) {
    std::vector<std::function<double(double)>> f;
    f.push_back([](double) { return 1.0; });
    for (int k = 1; k <= 4; ++k) f.push_back([=](double x) { return std::pow(x / L, k); });
    for (int k = 1; k <= 4; ++k) {
        f.push_back([=](double x) { return std::sin(k * M_PI * x / L); });
        f.push_back([=](double x) { return std::cos(k * M_PI * x / L); });
    }
    for (double c : {-0.5, -0.25, 0.0, 0.25, 0.5})
        f.push_back([=](double x) {
            const double z = (x - c * L) / (0.1 * L);
            return std::exp(-z * z);
        });
    return f;
}

CheckReport poincare_estimate(const Field& G, const Field& G_fine, const ModelParams& p,
                              const std::vector<std::function<double(double)>>& family) {
    auto estimate = [&](const Field& F) {
        const MomentSet m = moments(F, p);
        return poincare_ratio(F.grid().xs(), m.rho, m.p2, p.gamma, family);
    };
    const PoincareResult a = estimate(G), b = estimate(G_fine);
    const bool finite = std::isfinite(a.C_P) && std::isfinite(b.C_P) && a.C_P > 0.0 && b.C_P > 0.0;
    const double rel = finite ? std::abs(a.C_P - b.C_P) / b.C_P : std::numeric_limits<double>::infinity();
    CheckReport r = CheckReport::make("poincare", rel, 0.20);
    r.constants["C_P_hat"] = a.C_P;
    r.constants["C_P_hat_refined"] = b.C_P;
    r.constants["argmax_member"] = a.argmax;
    return r;
}

CheckReport contraction_checks(const std::vector<double>& t, const std::vector<Field>& traj, const Field& G,
                               const ModelParams& p, const ContractionWeights& w, double tol, double bound,
                               double mass_tol) {
    if (traj.empty() || t.size() != traj.size()) throw std::invalid_argument("contraction: empty trajectory");
    const PhaseGrid& g = G.grid();
    const Eigen::ArrayXXd me = sample(g, [&](double x, double v) { return weight_eval(x, v, w.exponential, p); });
    const Eigen::ArrayXXd mp = sample(g, [&](double x, double v) { return weight_eval(x, v, w.polynomial, p); });
    const WeightedNorm ne = WeightedNorm::l1(me), np = WeightedNorm::l1(mp);
    const WeightedNorm ninf = WeightedNorm::linf_over(G.values());
    const double e0 = norm(traj[0], ne), p0 = norm(traj[0], np), m0 = traj[0].mass();
    double prev = norm(traj[0], ninf);
    double worst_rise = 0.0, worst_e = 1.0, worst_p = 1.0, worst_mass = 0.0, t_rise = 0.0;
    for (std::size_t k = 1; k < traj.size(); ++k) {
        const double s = norm(traj[k], ninf);
        const double rise = (s - prev) / prev;
        if (rise > worst_rise) worst_rise = rise, t_rise = t[k];
        prev = s;
        worst_e = std::max(worst_e, norm(traj[k], ne) / e0);
        worst_p = std::max(worst_p, norm(traj[k], np) / p0);
        worst_mass = std::max(worst_mass, std::abs(traj[k].mass() - m0) / m0);
    }
    const double viol = std::max({worst_rise / tol, std::max(worst_e, worst_p) / bound, worst_mass / mass_tol});
    CheckReport r = CheckReport::make("contraction", viol, 1.0);
    r.constants["sup_ratio_rise"] = worst_rise;
    r.constants["sup_ratio_rise_t"] = t_rise;
    r.constants["l1_exp_growth"] = worst_e;
    r.constants["l1_poly_growth"] = worst_p;
    r.constants["mass_drift"] = worst_mass;
    return r;
}

double vg_gradient_condition(const Field& G, const ModelParams& p, double interior) {
    const MomentSet m = moments(G, p);
    const PhaseGrid& g = G.grid();
    const Eigen::ArrayXd d = central_derivative(m.p2, g.dx());
    double sup = 0.0;
    for (int i = 1; i + 1 < g.nx; ++i) {
        if (std::abs(g.x(i)) > interior * g.x_max) continue;
        sup = std::max(sup, d(i) * d(i) / (m.p2(i) * m.p2(i)) * std::pow(japanese(g.x(i)), 2.0 / (1.0 + p.gamma)));
    }
    return sup;
}

} // namespace rtlab
