#pragma once

#include "rtlab/report.hpp"

#include <span>
#include <vector>

namespace rtlab {

enum class Regime { Large, Small };

struct LaplaceSpec {
    int n = 1;          // power u^{n-1}
    double gamma = 1.0;
    double y = 0.0;
    void validate() const;
};

/// I_n(y) = int_0^inf u^{n-1} exp(-u^gamma/gamma - y/u) du by adaptive quadrature
/// after u = y^{1/(1+gamma)} z and z = e^s.
double laplace_quadrature(const LaplaceSpec& s);
/// ln I_n(y), usable where I_n underflows.
double laplace_log_quadrature(const LaplaceSpec& s);
/// Leading order: large y (Regime::Large) or the y -> 0 constant / log law (Regime::Small).
double laplace_asymptotic(const LaplaceSpec& s, Regime regime);

/// Phi(y) = |y|^{-(d-1)} int_0^inf u^{d-2} exp(-|y|/u - u^gamma/gamma) du.
double phi_quadrature(double y, int d, double gamma);
double phi_asymptotic(double y, int d, double gamma, Regime regime);

/// int_a^b Phi(y) dy for d = 1 and 0 <= a < b (one quadrature, no nesting).
double phi_interval_integral(double a, double b, double gamma);

/// sum_n a_n Gamma(n + lambda) X^{-(n + lambda)}.
double watson_partial_sum(std::span<const double> coeffs, double lambda, double X);

/// int_0^t exp(-b1 s^a) exp(-b2 (t - s)) ds.
double subexp_convolution(double b1, double b2, double a, double t);

/// Ratio of the convolution to exp(-b1 t^a) (a < 1) or to exp(-min(b1,b2) t) (a = 1)
/// along t_grid; C is the largest ratio and the check passes when the ratio has settled.
CheckReport subexp_convolution_check(double b1, double b2, double a, std::span<const double> t_grid);

/// Least squares of ln rho on {1, ln x, -x^alpha}.
FitReport tail_fit(std::span<const double> x, std::span<const double> log_rho, double alpha);

struct AsymptoticRow {
    double y, quadrature, asymptotic, ratio;
};

/// Table rows (y, quadrature, asymptotic, ratio) for I_n at fixed gamma.
std::vector<AsymptoticRow> laplace_table(int n, double gamma, std::span<const double> ys, Regime regime);

} // namespace rtlab
