#pragma once

#include "rtlab/grid.hpp"
#include "rtlab/report.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace rtlab {

enum class WeightKind { Exponential, Polynomial };

struct WeightSpec {
    WeightKind kind = WeightKind::Exponential;
    double a = 0.5;    // exponential: spatial exponent
    double b = 0.25;   // exponential: velocity rate
    double nu = 1e-2;  // exponential: scale
    double B = 1.0;    // both kinds
    double k = 2.0;    // polynomial: degree

    static WeightSpec exponential(double a, double b, double nu, double B) {
        return {WeightKind::Exponential, a, b, nu, B, 2.0};
    }
    static WeightSpec polynomial(double k, double B) { return {WeightKind::Polynomial, 0.5, 0.25, 1e-2, B, k}; }

    /// 1 + max{nu a^2 (1+2chi)^2 / 4(1+chi)^2, a(3-a+nu a)(2+3chi) / 2(1-chi)(1+chi)}.
    static double exponential_B(double a, double nu, double chi);
    /// ((1+2chi)/(1+chi))^k (2k-2)^{k-1}; B must exceed it.
    static double polynomial_B_threshold(double k, double chi);

    /// Parameter-range and B violations, empty when the weight is admissible.
    std::vector<std::string> violations(const ModelParams& p) const;
};

double weight_eval(double x, double v, const WeightSpec& spec, const ModelParams& p);

struct ExponentialBounds {
    double delta1;     // nu a^2 (1+2chi)^2 / (4 (1+chi)^2 B)
    double delta1_alt; // nu a^2 (2+3chi)^2 / (16 (1+chi)^2 B), the restated value
    double delta2;
};
ExponentialBounds exponential_bounds(const WeightSpec& spec, const ModelParams& p);

/// v d_x phi (4th-order central differences with step h, default dx) plus
/// Lambda (int phi(x, v') M(v') dv' - phi), the v' integral by adaptive quadrature.
Eigen::ArrayXXd dual_generator_apply(const std::function<double(double, double)>& phi, const PhaseGrid& g,
                                     const ModelParams& p, double h = -1.0);

struct DriftReport {
    double max_violation = 0.0;
    double fitted_C = 0.0;
    double fitted_eps = 0.0;
    double fitted_R = 0.0; // sublevel threshold defining the small set {m <= R}
    bool small_set_bounded = false;
    bool passed = false;
    double argmax_x = 0.0, argmax_v = 0.0; // cell binding eps (or the worst violation)
    double min_weight = 0.0;
    std::vector<std::string> notes;

    CheckReport to_check(const std::string& name, double tol) const;
};

/// Exponential: L*m <= C nu - eps <x>^{a-1} m. Polynomial: L*m <= C 1{m <= R} - eps(<x>^{k-1} + <v>^{2k}).
/// Without supplied (C, eps): R is the largest m on the half box |x| <= x_max/2, |v| <= v_max/2,
/// eps the largest value certified on {m > R}, then C the least constant closing the inequality.
/// Parameter-range violations and a nonpositive weight fail the check outright.
DriftReport drift_check(const WeightSpec& spec, const ModelParams& p, const PhaseGrid& g, double tol,
                        std::optional<std::pair<double, double>> supplied = std::nullopt);

struct MinorisationReport {
    double T = 0.0;
    double X0 = 0.0, V0 = 0.0, C0 = 0.0;
    double level = 0.0;
    double alpha_density = 0.0;           // C0^2 (1-chi)^2 / 4 e^{-(1+chi) T}
    double alpha_density_statement = 0.0; // same with e^{-(1-chi) T}
    double alpha = 0.0;                   // alpha_density |B_X0| |B_V0|
    double sim_min = 0.0;                 // smallest simulated value on the box over all seeds
    double sim_min_ratio = 0.0;           // sim_min / alpha_density
    double worst_x0 = 0.0, worst_v0 = 0.0;
    int seeds = 0;
    bool passed = false;
    std::vector<std::string> notes;
};

MinorisationReport minorisation_constants(const ModelParams& p, double X0, double V0);

/// Box radii of {m <= level} on the grid, then the constants for that box.
MinorisationReport minorisation_estimate(const ModelParams& p, const PhaseGrid& g, const WeightSpec& spec,
                                         double level);

/// Evolves near-Dirac bumps from `seeds` random points of the box for time T on `sim`
/// and compares the box minimum with half the predicted density constant.
void minorisation_cross_check(MinorisationReport& r, const ModelParams& p, const PhaseGrid& sim, int seeds,
                              std::uint64_t seed);

enum class RateModel { Subexponential, Polynomial };

struct RateFit {
    double rate = 0.0;      // lambda (subexponential) or k (polynomial)
    double log_C = 0.0;
    double goodness = 0.0;  // R^2 of the log-linear fit
    double exponent = 0.5;  // a used in the fit
    double a_eff = 0.0;     // best exponent from a one-dimensional search
    double envelope_C = 0.0;
    int crossings = 0;      // second-half samples above the first-half envelope
    int samples = 0;
    bool accepted = false;
};

RateFit rate_fit(const std::vector<double>& t, const std::vector<double>& dist, RateModel model,
                 double exponent, double t_transient = 0.0, double noise_floor = 1e-13);

/// Decay envelopes 1/(1+t)^{1/kappa} and exp(-lambda t^{1/(1+sigma)}).
double harris_envelope_polynomial(double t, double kappa);
double harris_envelope_subexp(double t, double lambda, double sigma);

} // namespace rtlab
