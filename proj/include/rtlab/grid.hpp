#pragma once

#include "rtlab/model.hpp"

#include <Eigen/Core>

#include <functional>

namespace rtlab {

enum class Boundary { AbsorbingOutflow, Periodic };

/// Cell-centred uniform grid on [-x_max, x_max] x [-v_max, v_max]. With nv even,
/// v = 0 is a cell edge and never a node.
struct PhaseGrid {
    double x_max = 2000.0;
    double v_max = 30.0;
    int nx = 4000;
    int nv = 240;
    Boundary bc = Boundary::AbsorbingOutflow;

    double dx() const { return 2.0 * x_max / nx; }
    double dv() const { return 2.0 * v_max / nv; }
    double x(int i) const { return -x_max + (i + 0.5) * dx(); }
    double v(int j) const { return -v_max + (j + 0.5) * dv(); }
    Eigen::ArrayXd xs() const;
    Eigen::ArrayXd vs() const;

    /// Same box, cells halved in both directions.
    PhaseGrid refined() const { return {x_max, v_max, 2 * nx, 2 * nv, bc}; }

    void validate() const;
    bool same_shape(const PhaseGrid& o) const;
};

/// Density sampled at cell centres; values(i, j) = f(x_i, v_j), column j holds one velocity.
class Field {
public:
    Field() = default;
    explicit Field(const PhaseGrid& g);
    Field(const PhaseGrid& g, Eigen::ArrayXXd values);

    static Field from_function(const PhaseGrid& g, const std::function<double(double, double)>& f);

    const PhaseGrid& grid() const { return grid_; }
    const Eigen::ArrayXXd& values() const { return values_; }
    Eigen::ArrayXXd& values() { return values_; }
    double operator()(int i, int j) const { return values_(i, j); }

    double mass() const;

private:
    PhaseGrid grid_;
    Eigen::ArrayXXd values_;
};

struct MomentSet {
    Eigen::ArrayXd rho;    // int f dv
    Eigen::ArrayXd flux;   // int v f dv
    Eigen::ArrayXd p2;     // int v^2 f dv
    Eigen::ArrayXd p4;     // int v^4 f dv
    Eigen::ArrayXd theta;  // int Lambda f dv
    Eigen::ArrayXd a_flux; // int Lambda v f dv
};

/// Lambda(x_i v_j / <x_i>) on the grid.
Eigen::ArrayXXd lambda_table(const PhaseGrid& g, const ModelParams& p);

/// M(v_j) rescaled so that sum_j M_j dv = 1 exactly on the grid.
Eigen::ArrayXd discrete_maxwellian(const PhaseGrid& g, const ModelParams& p);

/// Velocity sums per x column: sum_j f dv, the trapezoid rule on the cell-centred lattice.
MomentSet moments(const Field& f, const ModelParams& p);
Eigen::ArrayXd density(const Field& f);

/// M(v) 1{|x - x0| <= half_width}, normalised to mass 1.
Field maxwellian_bump(const PhaseGrid& g, const ModelParams& p, double x0, double half_width);

/// (rho_f / rho_G) G.
Field project_pi(const Field& f, const Field& G);

/// (G(x, v) + G(-x, -v)) / 2.
Field symmetrized(const Field& f);

enum class NormKind { L1, L2InvG, L2MInvG, LinfOverG };

struct WeightedNorm {
    NormKind kind = NormKind::L1;
    Eigen::ArrayXXd m; // weight m for L1 and L2MInvG
    Eigen::ArrayXXd g; // reference G for the G^-1 kinds

    static WeightedNorm l1(Eigen::ArrayXXd m) { return {NormKind::L1, std::move(m), {}}; }
    static WeightedNorm l1_unit(const PhaseGrid& grid) {
        return l1(Eigen::ArrayXXd::Ones(grid.nx, grid.nv));
    }
    static WeightedNorm l2_inv(Eigen::ArrayXXd G) { return {NormKind::L2InvG, {}, std::move(G)}; }
    static WeightedNorm l2_m_inv(Eigen::ArrayXXd m, Eigen::ArrayXXd G) {
        return {NormKind::L2MInvG, std::move(m), std::move(G)};
    }
    static WeightedNorm linf_over(Eigen::ArrayXXd G) { return {NormKind::LinfOverG, {}, std::move(G)}; }
};

/// L2 norms are returned unsquared.
double norm(const Field& f, const WeightedNorm& n);

/// Weight m(x_i, v_j) sampled on the grid.
Eigen::ArrayXXd sample(const PhaseGrid& g, const std::function<double(double, double)>& m);

} // namespace rtlab
