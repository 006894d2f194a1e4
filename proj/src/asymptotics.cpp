#include "rtlab/asymptotics.hpp"

#include "rtlab/fit.hpp"
#include "rtlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rtlab {

void LaplaceSpec::validate() const {
    if (n < 0) throw std::invalid_argument("laplace: n must be >= 0");
    if (!(gamma > 0.0)) throw std::invalid_argument("laplace: gamma must be positive");
    if (!(y >= 0.0)) throw std::invalid_argument("laplace: y must be >= 0");
    if (n == 0 && y == 0.0) throw std::domain_error("laplace: n = 0 diverges at y = 0");
}

namespace {

// ln int exp(L(s)) ds over R for a smooth unimodal-ish exponent L, with the maximum
// located on a coarse scan and the bracket widened until L drops 60 below it.
template <class F>
double log_integral_over_line(F L) {
    double s_best = 0.0, l_best = L(0.0);
    for (double s = -50.0; s <= 50.0; s += 0.25) {
        const double l = L(s);
        if (l > l_best) l_best = l, s_best = s;
    }
    double lo = s_best, hi = s_best;
    while (L(lo) > l_best - 60.0) lo -= 0.5;
    while (L(hi) > l_best - 60.0) hi += 0.5;
    auto g = [&](double s) { return std::exp(L(s) - l_best); };
    const double v = integrate(g, lo, s_best, 1e-12) + integrate(g, s_best, hi, 1e-12);
    return l_best + std::log(v);
}

} // namespace

double laplace_log_quadrature(const LaplaceSpec& sp) {
    sp.validate();
    const double g = sp.gamma;
    if (sp.y == 0.0) {
        // u = e^s: int exp(n s - e^{gamma s}/gamma) ds
        return log_integral_over_line([&](double s) { return sp.n * s - std::exp(g * s) / g; });
    }
    const double Y = std::pow(sp.y, g / (1.0 + g));
    const double c = 1.0 + 1.0 / g;
    const double inner = log_integral_over_line([&](double s) {
        return sp.n * s - Y * (std::exp(-s) + std::exp(g * s) / g - c);
    });
    return sp.n / (1.0 + g) * std::log(sp.y) - Y * c + inner;
}

double laplace_quadrature(const LaplaceSpec& sp) { return std::exp(laplace_log_quadrature(sp)); }

double laplace_asymptotic(const LaplaceSpec& sp, Regime regime) {
    const double g = sp.gamma;
    if (regime == Regime::Small) {
        if (sp.n >= 1) return std::pow(g, sp.n / g - 1.0) * std::tgamma(sp.n / g);
        if (!(sp.y > 0.0)) throw std::domain_error("laplace: log law needs y > 0");
        return std::abs(std::log(sp.y));
    }
    const double y = sp.y;
    return std::sqrt(2.0 * M_PI / (1.0 + g)) * std::pow(y, sp.n / (1.0 + g) - g / (2.0 * (1.0 + g))) *
           std::exp(-(1.0 + g) / g * std::pow(y, g / (1.0 + g)));
}

double phi_quadrature(double y, int d, double gamma) {
    y = std::abs(y);
    if (y == 0.0) throw std::domain_error("phi: diverges at y = 0");
    if (d < 1) throw std::invalid_argument("phi: d must be >= 1");
    const double logI = laplace_log_quadrature({d - 1, gamma, y});
    return std::exp(logI - (d - 1) * std::log(y));
}

double phi_asymptotic(double y, int d, double gamma, Regime regime) {
    y = std::abs(y);
    if (regime == Regime::Small) {
        if (d == 1) return std::abs(std::log(y));
        return std::pow(gamma, (d - 1) / gamma - 1.0) * std::tgamma((d - 1) / gamma) / std::pow(y, d - 1);
    }
    return std::sqrt(2.0 * M_PI / (1.0 + gamma)) * std::pow(y, -gamma / (1.0 + gamma) * (d - 0.5)) *
           std::exp(-(1.0 + gamma) / gamma * std::pow(y, gamma / (1.0 + gamma)));
}

double phi_interval_integral(double a, double b, double gamma) {
    if (!(a >= 0.0 && b > a)) throw std::invalid_argument("phi_interval_integral: need 0 <= a < b");
    // int_a^b Phi = int_0^inf e^{-u^gamma/gamma} (e^{-a/u} - e^{-b/u}) du
    auto f = [&](double u) {
        if (u <= 0.0) return 0.0;
        const double ea = std::exp(-a / u), eb = std::exp(-b / u);
        return std::exp(-std::pow(u, gamma) / gamma) * (ea - eb);
    };
    const double scale = std::max(1.0, std::pow(b, 1.0 / (1.0 + gamma)));
    QuadResult lo = gauss_kronrod(f, 0.0, scale, 1e-11, 1e-300, 4000);
    QuadResult hi = gauss_kronrod_upper(f, scale, 1e-11, 1e-300, 4000);
    return lo.value + hi.value;
}

double watson_partial_sum(std::span<const double> coeffs, double lambda, double X) {
    if (!(X > 0.0)) throw std::invalid_argument("watson: X must be positive");
    double sum = 0.0;
    for (std::size_t n = 0; n < coeffs.size(); ++n) {
        if (coeffs[n] == 0.0) continue;
        const double e = n + lambda;
        sum += coeffs[n] * std::exp(std::lgamma(e) - e * std::log(X));
    }
    return sum;
}

double subexp_convolution(double b1, double b2, double a, double t) {
    if (t <= 0.0) return 0.0;
    auto f = [&](double s) { return std::exp(-b1 * std::pow(s, a) - b2 * (t - s)); };
    return gauss_kronrod(f, 0.0, t, 1e-11, 1e-300, 4000).value;
}

CheckReport subexp_convolution_check(double b1, double b2, double a, std::span<const double> t_grid) {
    if (!(b1 > 0.0 && b2 > 0.0) || !(a > 0.0 && a <= 1.0))
        throw std::invalid_argument("subexp_convolution_check: need b1, b2 > 0 and a in (0, 1]");
    if (a == 1.0 && b1 == b2) throw std::invalid_argument("subexp_convolution_check: b1 == b2 with a = 1");
    std::vector<double> ratio;
    double C = 0.0;
    for (double t : t_grid) {
        const double conv = subexp_convolution(b1, b2, a, t);
        const double env = a < 1.0 ? std::exp(-b1 * std::pow(t, a)) : std::exp(-std::min(b1, b2) * t);
        const double r = t > 0.0 ? conv / env : 0.0;
        ratio.push_back(r);
        C = std::max(C, r);
    }
    // Settled when the last quarter of the sweep moves the ratio by under 5% of C.
    const std::size_t q = ratio.size() * 3 / 4;
    double drift = 0.0;
    for (std::size_t k = q; k < ratio.size(); ++k) drift = std::max(drift, std::abs(ratio[k] - ratio[q]));
    const bool finite = std::isfinite(C);
    CheckReport r = CheckReport::make("subexp_convolution", finite ? drift / std::max(C, 1e-300) : 1e300, 0.05);
    r.constants["C"] = C;
    r.constants["final_ratio"] = ratio.empty() ? 0.0 : ratio.back();
    if (a == 1.0) r.constants["closed_form_bound"] = 1.0 / std::abs(b2 - b1);
    return r;
}

FitReport tail_fit(std::span<const double> x, std::span<const double> log_rho, double alpha) {
    if (x.size() != log_rho.size()) throw std::invalid_argument("tail_fit: size mismatch");
    if (x.size() < 10) throw std::invalid_argument("tail_fit: need at least 10 samples");
    for (std::size_t k = 1; k < x.size(); ++k)
        if (!(x[k] > x[k - 1])) throw std::invalid_argument("tail_fit: x must be strictly increasing");
    const Eigen::Index n = static_cast<Eigen::Index>(x.size());
    Eigen::MatrixXd A(n, 3);
    Eigen::VectorXd y(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        A(k, 0) = 1.0;
        A(k, 1) = std::log(x[k]);
        A(k, 2) = -std::pow(x[k], alpha);
        y(k) = log_rho[k];
    }
    const LeastSquares ls = least_squares(A, y);
    FitReport r;
    r.c_hat = ls.coeffs(0);
    r.beta_hat = ls.coeffs(1);
    r.nu_hat = ls.coeffs(2);
    r.residual = ls.residual;
    r.samples = static_cast<int>(n);
    r.rank_deficient = ls.rank_deficient;
    return r;
}

std::vector<AsymptoticRow> laplace_table(int n, double gamma, std::span<const double> ys, Regime regime) {
    std::vector<AsymptoticRow> rows;
    for (double y : ys) {
        const LaplaceSpec s{n, gamma, y};
        const double q = laplace_quadrature(s);
        const double a = laplace_asymptotic(s, regime);
        rows.push_back({y, q, a, q / a});
    }
    return rows;
}

} // namespace rtlab
