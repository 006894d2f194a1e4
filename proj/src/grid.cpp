#include "rtlab/grid.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace rtlab {

Eigen::ArrayXd PhaseGrid::xs() const {
    Eigen::ArrayXd out(nx);
    for (int i = 0; i < nx; ++i) out(i) = x(i);
    return out;
}

Eigen::ArrayXd PhaseGrid::vs() const {
    Eigen::ArrayXd out(nv);
    for (int j = 0; j < nv; ++j) out(j) = v(j);
    return out;
}

void PhaseGrid::validate() const {
    if (!(x_max > 0.0) || !(v_max > 0.0)) throw std::invalid_argument("grid: x_max and v_max must be positive");
    if (nx < 1 || nv < 2) throw std::invalid_argument("grid: need nx >= 1 and nv >= 2");
    if (nv % 2 != 0) throw std::invalid_argument("grid: nv must be even so v = 0 is a cell edge");
}

bool PhaseGrid::same_shape(const PhaseGrid& o) const {
    return nx == o.nx && nv == o.nv && x_max == o.x_max && v_max == o.v_max;
}

Field::Field(const PhaseGrid& g) : grid_(g), values_(Eigen::ArrayXXd::Zero(g.nx, g.nv)) {}

Field::Field(const PhaseGrid& g, Eigen::ArrayXXd values) : grid_(g), values_(std::move(values)) {
    if (values_.rows() != g.nx || values_.cols() != g.nv)
        throw std::invalid_argument("field: value array does not match grid shape");
}

Field Field::from_function(const PhaseGrid& g, const std::function<double(double, double)>& f) {
    return Field(g, sample(g, f));
}

double Field::mass() const { return values_.sum() * (grid_.dx() * grid_.dv()); }

Eigen::ArrayXXd sample(const PhaseGrid& g, const std::function<double(double, double)>& m) {
    Eigen::ArrayXXd out(g.nx, g.nv);
    for (int j = 0; j < g.nv; ++j)
        for (int i = 0; i < g.nx; ++i) out(i, j) = m(g.x(i), g.v(j));
    return out;
}

Eigen::ArrayXXd lambda_table(const PhaseGrid& g, const ModelParams& p) {
    return sample(g, [&](double x, double v) { return tumbling_rate_at(x, v, p); });
}

Eigen::ArrayXd discrete_maxwellian(const PhaseGrid& g, const ModelParams& p) {
    Eigen::ArrayXd m = maxwellian(g.vs(), p);
    return m / (m.sum() * g.dv());
}

MomentSet moments(const Field& f, const ModelParams& p) {
    const PhaseGrid& g = f.grid();
    const Eigen::ArrayXd v = g.vs();
    const Eigen::ArrayXXd lam = lambda_table(g, p);
    const double dv = g.dv();
    const auto& F = f.values();
    MomentSet m;
    const Eigen::ArrayXd v2 = v * v;
    m.rho = F.rowwise().sum() * dv;
    m.flux = (F.rowwise() * v.transpose()).rowwise().sum() * dv;
    m.p2 = (F.rowwise() * v2.transpose()).rowwise().sum() * dv;
    m.p4 = (F.rowwise() * (v2 * v2).transpose()).rowwise().sum() * dv;
    m.theta = (F * lam).rowwise().sum() * dv;
    m.a_flux = ((F * lam).rowwise() * v.transpose()).rowwise().sum() * dv;
    return m;
}

Eigen::ArrayXd density(const Field& f) { return f.values().rowwise().sum() * f.grid().dv(); }

Field project_pi(const Field& f, const Field& G) {
    const Eigen::ArrayXd rf = density(f);
    const Eigen::ArrayXd rg = density(G);
    for (Eigen::Index i = 0; i < rg.size(); ++i)
        if (!(rg(i) >= 1e-300))
            throw std::domain_error("project_pi: rho_G below underflow guard at column " + std::to_string(i));
    const Eigen::ArrayXd ratio = rf / rg;
    return Field(G.grid(), G.values().colwise() * ratio);
}

Field symmetrized(const Field& f) {
    return Field(f.grid(), 0.5 * (f.values() + f.values().reverse()));
}

namespace {

[[noreturn]] void overflow_at(Eigen::Index i, Eigen::Index j) {
    std::ostringstream os;
    os << "norm: non-finite weighted value at cell (" << i << ", " << j << ")";
    throw std::overflow_error(os.str());
}

void check_finite(const Eigen::ArrayXXd& a) {
    if (a.allFinite()) return;
    for (Eigen::Index j = 0; j < a.cols(); ++j)
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            if (!std::isfinite(a(i, j))) overflow_at(i, j);
}

void check_positive(const Eigen::ArrayXXd& w, const char* what) {
    if (w.size() == 0 || !(w.minCoeff() > 0.0))
        throw std::invalid_argument(std::string("norm: ") + what + " must be strictly positive on the grid");
}

} // namespace

double norm(const Field& f, const WeightedNorm& n) {
    const PhaseGrid& g = f.grid();
    const double cell = g.dx() * g.dv();
    const auto& F = f.values();
    switch (n.kind) {
    case NormKind::L1: {
        check_positive(n.m, "weight m");
        Eigen::ArrayXXd t = F.abs() * n.m;
        check_finite(t);
        return t.sum() * cell;
    }
    case NormKind::L2InvG: {
        check_positive(n.g, "reference G");
        Eigen::ArrayXXd t = F.square() / n.g;
        check_finite(t);
        return std::sqrt(t.sum() * cell);
    }
    case NormKind::L2MInvG: {
        check_positive(n.m, "weight m");
        check_positive(n.g, "reference G");
        Eigen::ArrayXXd t = F.square() * n.m / n.g;
        check_finite(t);
        return std::sqrt(t.sum() * cell);
    }
    case NormKind::LinfOverG: {
        check_positive(n.g, "reference G");
        Eigen::ArrayXXd t = F.abs() / n.g;
        check_finite(t);
        return t.maxCoeff();
    }
    }
    return 0.0;
}

Field maxwellian_bump(const PhaseGrid& g, const ModelParams& p, double x0, double half_width) {
    const Eigen::ArrayXd M = discrete_maxwellian(g, p);
    Field f(g);
    for (int i = 0; i < g.nx; ++i)
        if (std::abs(g.x(i) - x0) <= half_width) f.values().row(i) = M.transpose();
    const double m = f.mass();
    if (!(m > 0.0)) throw std::invalid_argument("maxwellian_bump: support contains no grid node");
    f.values() /= m;
    return f;
}

} // namespace rtlab
