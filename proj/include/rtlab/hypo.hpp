#pragma once

#include "rtlab/lyapunov.hpp"
#include "rtlab/report.hpp"
#include "rtlab/solver.hpp"

#include <cstdint>
#include <vector>

namespace rtlab {

struct EllipticConfig {
    double ell = 0.5;
    double tolerance = 1e-9;

    /// 0 < ell < 2/(1+gamma).
    void validate(const ModelParams& p) const;
    static EllipticConfig defaults(const ModelParams& p) { return {1.0 / (1.0 + p.gamma), 1e-9}; }
};

/// Conservative three-point discretisation of B u = rho u - <x>^ell (V u')' with
/// zero flux at both ends, stored as a tridiagonal matrix over the x nodes.
struct EllipticOperator {
    Eigen::ArrayXd lower, diag, upper; // lower(i) couples i to i-1, upper(i) couples i to i+1
    Eigen::ArrayXd weight;             // <x>^{-ell}
    double dx = 1.0;

    static EllipticOperator build(const Eigen::ArrayXd& rho, const Eigen::ArrayXd& V, double dx,
                                  const Eigen::ArrayXd& xs, double ell);
    Eigen::ArrayXd apply(const Eigen::ArrayXd& u) const;
    /// Thomas algorithm; throws NumericalFailure on a vanishing pivot.
    Eigen::ArrayXd solve(const Eigen::ArrayXd& rhs) const;
    /// sum u w <x>^{-ell} dx.
    double inner(const Eigen::ArrayXd& u, const Eigen::ArrayXd& w) const;
};

/// Solves B u = rhs with rho = rho_G and V = p2 of G; throws NumericalFailure when the
/// relative residual exceeds cfg.tolerance.
Eigen::ArrayXd elliptic_solve_B(const Eigen::ArrayXd& rhs, const Field& G, const EllipticConfig& cfg);

struct EntropyRecord {
    double t = 0.0;
    double H = 0.0;
    double Hdot = 0.0;
    double l2_norm_sq = 0.0;     // ||f - G||^2 in L2(G^-1)
    double micro = 0.0;          // ||(1 - Pi)(f - G)||^2
    double macro_weighted = 0.0; // ||Pi (f - G)||^2 in L2(G^-1 <x>^-ell)
    double perturbation = 0.0;   // <m_g, d_x B^-1 rho_g>
};

/// H[f - G] = ||f - G||^2 + eps <m, d_x B^{-1} rho> with g = f - G.
EntropyRecord entropy(const Field& f, const Field& G, double eps, const EllipticConfig& cfg);

/// rho, p2, p4 each fitted to c + beta ln<x> - nu |x|^{gamma/(1+gamma)} on the window, and
/// R = rho p4 / p2^2 to c + ell ln<x>. Passes iff the three nu agree within 5% and ell matches
/// beta_rho + beta_p4 - 2 beta_p2 within 0.1.
CheckReport moment_asymptotics_check(const Field& G, const ModelParams& p, double x_lo, double x_hi);

/// Passes iff p2 > 0 on every column; reports min/max of (p2/rho)(c0/c2).
CheckReport vg_equivalence_check(const Field& G, const ModelParams& p);

struct CoercivityValues {
    double quadratic_form = 0.0; // -(1/4) sum (L'M G' + L M' G)(f/G - f'/G')^2
    double expanded = 0.0;       // <C f, f> + (1/2) sum (f/G)^2 (Lambda G - M theta_G)
    double generator = 0.0;      // <apply_generator(f), f> with the upwind transport
    double micro = 0.0;          // ||(1 - Pi) f||^2
    double norm_sq = 0.0;        // ||f||^2
};

CoercivityValues coercivity_values(const Field& f, const Field& G, const ModelParams& p);

/// Quadratic form <= -(1-chi)/2 ||(1-Pi)f||^2 + tol ||f||^2, after the quadratic form has been
/// matched to the expanded single-sum value within agree_tol relative.
CheckReport micro_coercivity_check(const Field& f, const Field& G, const ModelParams& p, double tol = 1e-6,
                                   double agree_tol = 1e-6);

/// micro_coercivity_check on `draws` seeded nonnegative fields (G times uniform noise and
/// uniform noise scaled by max G, alternating); reports the worst draw and the pass count.
CheckReport coercivity_suite(const Field& G, const ModelParams& p, int draws, std::uint64_t seed, double tol = 1e-6);

/// Smallest and largest H / ||g||^2 over seeded random zero-mass deviations.
std::pair<double, double> entropy_band(const Field& G, double eps, const EllipticConfig& cfg, int draws,
                                       std::uint64_t seed);

struct DissipationResult {
    CheckReport report;
    std::vector<EntropyRecord> records;
    double eps = 0.0;
    double kappa = 0.0;
    double c1 = 0.0, c2 = 0.0;
};

/// Entropy along the snapshots; (a) H non-increasing for t >= t_start, (b) kappa, the 5th
/// percentile of (-dH/dt) / (micro + macro_weighted), is positive.
DissipationResult dissipation_check(const std::vector<double>& t, const std::vector<Field>& traj, const Field& G,
                                    double eps, const EllipticConfig& cfg, double t_start = 0.0);

/// eps = 1e-2, halved until the equivalence band has c1 > 0 and H decays; at most `halvings` times.
DissipationResult dissipation_select(const std::vector<double>& t, const std::vector<Field>& traj, const Field& G,
                                     const EllipticConfig& cfg, double t_start, int halvings = 12);

/// Smallest eps making c1 vanish over the random draws (1 / max |perturbation| / ||g||^2).
double entropy_eps_critical(const Field& G, const EllipticConfig& cfg, int draws, std::uint64_t seed);

/// C_P estimate max over the family of int (u - ubar)^2 <x>^{-2/(1+gamma)} P / int u'^2 P with
/// ubar = int u rho / int rho; derivatives by central differences.
struct PoincareResult {
    double C_P = 0.0;
    int argmax = -1;
    std::vector<double> ratios; // NaN for excluded members
};
PoincareResult poincare_ratio(const Eigen::ArrayXd& xs, const Eigen::ArrayXd& rho, const Eigen::ArrayXd& P,
                              double gamma, const std::vector<std::function<double(double)>>& family);

/// Constants, polynomials up to degree 4, sinusoids and localized bumps scaled to `L`.
std::vector<std::function<double(double)>> poincare_family(double L);

/// Poincare ratio on G and on `G_fine` (one refinement); passes iff both are finite and agree within 20%.
CheckReport poincare_estimate(const Field& G, const Field& G_fine, const ModelParams& p,
                              const std::vector<std::function<double(double)>>& family);

struct ContractionWeights {
    WeightSpec exponential;
    WeightSpec polynomial;
};

/// sup f/G non-increasing within tol per record, L1(m) norms at most `bound` times their
/// initial value for both weights and mass conserved to mass_tol relative.
CheckReport contraction_checks(const std::vector<double>& t, const std::vector<Field>& traj, const Field& G,
                               const ModelParams& p, const ContractionWeights& w, double tol = 1e-6,
                               double bound = 2.0, double mass_tol = 1e-6);

/// sup |V_G'|^2 / V_G^2 <x>^{2/(1+gamma)} over |x| <= interior x_max.
double vg_gradient_condition(const Field& G, const ModelParams& p, double interior = 0.8);

} // namespace rtlab
