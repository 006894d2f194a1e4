#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

namespace rtlab {

struct QuadratureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    int evaluations = 0;
    bool converged = false;
};

using Integrand = std::function<double(double)>;

/// Adaptive Gauss-Kronrod (7/15) on [a, b], global bisection of the worst interval.
QuadResult gauss_kronrod(const Integrand& f, double a, double b, double rel_tol = 1e-10,
                         double abs_tol = 1e-300, int max_intervals = 2000);

/// Integral over [a, inf) via the map u = a + t/(1-t).
QuadResult gauss_kronrod_upper(const Integrand& f, double a, double rel_tol = 1e-10,
                               double abs_tol = 1e-300, int max_intervals = 2000);

/// Throws QuadratureError when the adaptive rule misses rel_tol.
double integrate(const Integrand& f, double a, double b, double rel_tol = 1e-10);
double integrate_upper(const Integrand& f, double a, double rel_tol = 1e-10);

struct GaussRule {
    std::vector<double> nodes;    // on [-1, 1]
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule, nodes by Newton iteration on P_n.
const GaussRule& gauss_legendre(int n);

/// Regularised upper incomplete gamma Q(s, x) = Gamma(s, x)/Gamma(s).
double gamma_q(double s, double x);

} // namespace rtlab
