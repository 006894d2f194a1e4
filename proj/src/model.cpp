#include "rtlab/model.hpp"

#include "rtlab/quadrature.hpp"

#include <algorithm>
#include <limits>

namespace rtlab {

double Psi::operator()(double z) const {
    switch (kind) {
    case PsiKind::Sign:
        return z > 0.0 ? 1.0 : (z < 0.0 ? -1.0 : 0.0);
    case PsiKind::SmoothTanh:
        return std::tanh(scale * z);
    case PsiKind::Table: {
        const double a = std::abs(z);
        const double s = z < 0.0 ? -1.0 : 1.0;
        if (a >= table_z.back()) return s * table_value.back();
        auto it = std::upper_bound(table_z.begin(), table_z.end(), a);
        const std::size_t i = static_cast<std::size_t>(it - table_z.begin()) - 1;
        const double t = (a - table_z[i]) / (table_z[i + 1] - table_z[i]);
        return s * ((1.0 - t) * table_value[i] + t * table_value[i + 1]);
    }
    }
    return 0.0;
}

void Psi::validate() const {
    if (kind == PsiKind::SmoothTanh && !(scale > 0.0))
        throw std::invalid_argument("psi: SmoothTanh scale must be positive");
    if (kind != PsiKind::Table) return;
    if (table_z.size() < 2 || table_z.size() != table_value.size())
        throw std::invalid_argument("psi: table needs at least two (z, value) samples");
    if (table_z.front() != 0.0 || table_value.front() != 0.0)
        throw std::invalid_argument("psi: table must start at z = 0 with value 0 (odd function)");
    for (std::size_t i = 1; i < table_z.size(); ++i) {
        if (!(table_z[i] > table_z[i - 1])) throw std::invalid_argument("psi: table z must increase");
        if (table_value[i] < table_value[i - 1])
            throw std::invalid_argument("psi: table values must be nondecreasing");
    }
    if (table_value.back() > 1.0) throw std::invalid_argument("psi: |psi| must not exceed 1");
}

std::string Psi::name() const {
    switch (kind) {
    case PsiKind::Sign: return "sign";
    case PsiKind::SmoothTanh: return "smooth_tanh";
    case PsiKind::Table: return "table";
    }
    return "unknown";
}

void ModelParams::validate() const {
    if (!(gamma > 0.0)) throw std::invalid_argument("model: gamma must be positive");
    if (!(chi > 0.0 && chi < 1.0)) throw std::invalid_argument("model: chi must lie in (0, 1)");
    if (dim < 1) throw std::invalid_argument("model: dim must be >= 1");
    psi.validate();
}

double moment_constant(double k, double gamma, int dim) {
    const double d = dim;
    const double s = (d + k) / gamma;
    const double log_c = std::log(2.0) + 0.5 * d * std::log(M_PI) + (s - 1.0) * std::log(gamma) +
                         std::lgamma(s) - std::lgamma(0.5 * d);
    if (!(log_c < std::log(std::numeric_limits<double>::max())))
        throw std::range_error("moment_constant overflows for k = " + std::to_string(k) +
                               ", gamma = " + std::to_string(gamma));
    return std::exp(log_c);
}

double moment_constant(int k, const ModelParams& p) {
    if (k < 0) throw std::invalid_argument("moment_constant: k must be >= 0");
    return moment_constant(static_cast<double>(k), p.gamma, p.dim);
}

double maxwellian(double speed, const ModelParams& p) {
    const double c0 = moment_constant(0.0, p.gamma, p.dim);
    return std::exp(-std::pow(std::abs(speed), p.gamma) / p.gamma) / c0;
}

Eigen::ArrayXd maxwellian(const Eigen::ArrayXd& v, const ModelParams& p) {
    const double c0 = moment_constant(0.0, p.gamma, p.dim);
    return (-v.abs().pow(p.gamma) / p.gamma).exp() / c0;
}

double tumbling_rate(double z, const ModelParams& p) { return 1.0 + p.chi * p.psi(z); }

double psi_product(double z, const ModelParams& p) { return z * p.psi(z); }

double velocity_cutoff(const ModelParams& p, double tail, int k) {
    const double s = (p.dim + k) / p.gamma;
    auto q = [&](double V) { return gamma_q(s, std::pow(V, p.gamma) / p.gamma); };
    double hi = 1.0;
    while (q(hi) > tail) hi *= 2.0;
    double lo = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double mid = 0.5 * (lo + hi);
        (q(mid) > tail ? lo : hi) = mid;
    }
    return hi;
}

namespace {

// int_{R^d} Psi(s * v_1) M(|v|) dv.
double psi_average(double s, const ModelParams& p) {
    const double vc = velocity_cutoff(p, 1e-14, 1);
    if (p.dim == 1) {
        return 2.0 * integrate([&](double v) { return psi_product(s * v, p) * maxwellian(v, p); },
                               0.0, vc, 1e-9);
    }
    const double d = p.dim;
    const double sphere = 2.0 * std::pow(M_PI, 0.5 * (d - 1.0)) / std::tgamma(0.5 * (d - 1.0));
    auto radial = [&](double r) {
        if (r == 0.0) return 0.0;
        const double ang = integrate(
            [&](double phi) {
                return psi_product(s * r * std::cos(phi), p) * std::pow(std::sin(phi), d - 2.0);
            },
            0.0, M_PI, 1e-9);
        return sphere * ang * std::pow(r, d - 1.0) * maxwellian(r, p);
    };
    return integrate(radial, 0.0, vc, 1e-8);
}

} // namespace

double zeta_lower_bound(const ModelParams& p, std::span<const double> x_samples) {
    double best = std::numeric_limits<double>::infinity();
    bool any = false;
    for (double x : x_samples) {
        if (std::abs(x) < 1.0) continue;
        any = true;
        best = std::min(best, psi_average(std::abs(x) / japanese(x), p));
    }
    if (!any) throw std::invalid_argument("zeta_lower_bound: need a sample with |x| >= 1");
    return best;
}

double lambda_average(double x, const ModelParams& p) {
    const double vc = velocity_cutoff(p, 1e-15);
    auto f = [&](double v) { return tumbling_rate_at(x, v, p) * maxwellian(v, p); };
    return integrate(f, -vc, 0.0, 1e-11) + integrate(f, 0.0, vc, 1e-11);
}

} // namespace rtlab
