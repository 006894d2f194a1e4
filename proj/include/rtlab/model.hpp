#pragma once

#include <Eigen/Core>

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rtlab {

enum class PsiKind { Sign, SmoothTanh, Table };

/// Bounded, odd, nondecreasing profile psi entering Lambda = 1 + chi*psi.
struct Psi {
    PsiKind kind = PsiKind::Sign;
    double scale = 1.0;              // SmoothTanh: psi(z) = tanh(scale*z)
    std::vector<double> table_z;     // Table: samples on z >= 0, table_z[0] = 0
    std::vector<double> table_value; // odd extension, held constant past the last sample

    static Psi sign() { return {}; }
    static Psi smooth_tanh(double s) { return {PsiKind::SmoothTanh, s, {}, {}}; }
    static Psi table(std::vector<double> z, std::vector<double> v) {
        return {PsiKind::Table, 1.0, std::move(z), std::move(v)};
    }

    double operator()(double z) const;
    void validate() const;
    std::string name() const;
};

struct ModelParams {
    double gamma = 1.0;
    double chi = 0.5;
    Psi psi;
    int dim = 1;

    void validate() const;
};

template <class Scalar>
Scalar japanese(Scalar x) {
    using std::sqrt;
    return sqrt(Scalar(1) + x * x);
}

/// c_{k,gamma} = int |v|^k exp(-|v|^gamma/gamma) dv over R^d (Gamma-function form).
double moment_constant(int k, const ModelParams& p);
double moment_constant(double k, double gamma, int dim);

/// M(v) at speed |v|.
double maxwellian(double speed, const ModelParams& p);

template <class Derived>
double maxwellian(const Eigen::MatrixBase<Derived>& v, const ModelParams& p) {
    return maxwellian(v.norm(), p);
}

/// Elementwise M over an array of 1-D velocities.
Eigen::ArrayXd maxwellian(const Eigen::ArrayXd& v, const ModelParams& p);

double tumbling_rate(double z, const ModelParams& p);

/// Lambda(x v / <x>) in one dimension.
inline double tumbling_rate_at(double x, double v, const ModelParams& p) {
    return tumbling_rate(x * v / japanese(x), p);
}

/// Psi(z) = z psi(z).
double psi_product(double z, const ModelParams& p);

/// Speed beyond which the radial tail of |v|^k M carries relative mass below tail.
double velocity_cutoff(const ModelParams& p, double tail = 1e-12, int k = 0);

/// min over samples with |x| >= 1 of int Psi(x.v'/<x>) M(v') dv'.
double zeta_lower_bound(const ModelParams& p, std::span<const double> x_samples);

/// int Lambda(x v/<x>) M(v) dv (d = 1).
double lambda_average(double x, const ModelParams& p);

} // namespace rtlab
