#include <doctest.h>
#include <rtlab/steady.hpp>

#include <cmath>

using namespace rtlab;

namespace {

ModelParams params(double chi, Psi psi = Psi::sign()) {
    ModelParams p;
    p.gamma = 1.0;
    p.chi = chi;
    p.psi = std::move(psi);
    return p;
}

ModelParams unbiased() { return params(0.5, Psi::table({0.0, 1.0}, {0.0, 0.0})); }

double l1(const Field& a, const Field& b) {
    const PhaseGrid& g = a.grid();
    return (a.values() - b.values()).abs().sum() * g.dx() * g.dv();
}

Field product_field(const PhaseGrid& g, const ModelParams& p, const std::function<double(double)>& rho) {
    const Eigen::ArrayXd m = discrete_maxwellian(g, p);
    Field f(g);
    for (int i = 0; i < g.nx; ++i) f.values().row(i) = rho(g.x(i)) * m.transpose();
    return f;
}

const SteadyResult& moderate_fixed_point() {
    static const SteadyResult r = steady_by_fixed_point(params(0.8), PhaseGrid{200.0, 30.0, 400, 240}, 1e-12);
    return r;
}

} // namespace

TEST_CASE("unbiased periodic evolution converges to the uniform equilibrium") {
    PhaseGrid g{5.0, 8.0, 20, 32};
    g.bc = Boundary::Periodic;
    const ModelParams q = unbiased();
    SolverConfig cfg;
    cfg.dt = 0.05;
    const SteadyResult r = steady_by_evolution(q, g, cfg, 1e-12, 2000.0);
    CHECK(r.converged);
    const Field expect = product_field(g, q, [&](double) { return 1.0 / (2.0 * g.x_max); });
    CHECK(l1(r.G, expect) < 1e-9);
    CHECK(r.G.mass() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("fixed point and evolution agree on a small box") {
    const ModelParams p = params(0.8);
    const PhaseGrid g{40.0, 12.0, 160, 96};
    const SteadyResult fp = steady_by_fixed_point(p, g, 1e-12);
    CHECK(fp.converged);
    CHECK(fp.G.mass() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(l1(fp.G, Field(g, fp.G.values().reverse())) < 1e-12);
    CHECK(fp.G.values().minCoeff() >= 0.0);
    // Iterate masses settle: successive differences shrink.
    const auto& m = fp.iterate_mass;
    REQUIRE(m.size() > 20);
    CHECK(std::abs(m[m.size() - 1] - m[m.size() - 2]) < std::abs(m[5] - m[4]) + 1e-15);

    SolverConfig cfg;
    cfg.dt = 1.0;
    const SteadyResult ev = steady_by_evolution(p, g, cfg, 1e-10, 5000.0);
    CHECK(ev.converged);
    CHECK(l1(ev.G, Field(g, ev.G.values().reverse())) < 1e-12);
    const double d = l1(fp.G, ev.G);
    CHECK(d < 0.1);
    const PhaseGrid r = g.refined();
    const double d2 = l1(steady_by_fixed_point(p, r, 1e-12).G, steady_by_evolution(p, r, cfg, 1e-10, 5000.0).G);
    CHECK(d2 < d);
}

TEST_CASE("steady residual shrinks with tolerance") {
    const ModelParams p = params(0.8);
    const PhaseGrid g{40.0, 12.0, 80, 48};
    SolverConfig cfg;
    cfg.dt = 1.0;
    const SteadyResult loose = steady_by_evolution(p, g, cfg, 1e-4, 5000.0);
    const SteadyResult tight = steady_by_evolution(p, g, cfg, 1e-9, 5000.0);
    CHECK(tight.residual <= loose.residual);
    CHECK(tight.iterations > loose.iterations);
    CHECK_THROWS(steady_by_evolution(p, g, cfg, 0.0));
    CHECK_THROWS(steady_by_fixed_point(p, g, -1.0));
}

TEST_CASE("density shape on a moderate box") {
    const SteadyResult& r = moderate_fixed_point();
    REQUIRE(r.converged);
    const Eigen::ArrayXd rho = density(r.G);
    const PhaseGrid& g = r.G.grid();
    Eigen::Index imax;
    rho.maxCoeff(&imax);
    CHECK(std::abs(g.x(static_cast<int>(imax))) < 1.0);
    for (int i = 0; i + 1 < g.nx; ++i) {
        if (g.x(i) >= 5.0) CHECK(rho(i + 1) < rho(i));
        if (g.x(i + 1) <= -5.0) CHECK(rho(i + 1) > rho(i));
    }
    CHECK(positivity_check(r.G).passed);
}

TEST_CASE("positivity check") {
    const PhaseGrid g{10.0, 4.0, 20, 8};
    CHECK_FALSE(positivity_check(Field(g)).passed);
    Field f(g, Eigen::ArrayXXd::Ones(g.nx, g.nv));
    CHECK(positivity_check(f).passed);
    f.values().row(7).setZero();
    const CheckReport r = positivity_check(f);
    CHECK_FALSE(r.passed);
    CHECK(r.constants.at("argmin_column") == 7.0);
}

TEST_CASE("sandwich inequalities") {
    const SteadyResult& r = moderate_fixed_point();
    const CheckReport s = convolution_sandwich_check(r.G, params(0.8));
    CHECK(s.passed);
    CHECK(s.constants.at("phi1_mass") < 1.0);
    CHECK(s.constants.at("phi2_mass") > 1.0);
    // Plumbing path on a synthetic profile: margins are finite.
    Eigen::ArrayXd rho(401);
    for (int i = 0; i < 401; ++i) rho(i) = std::exp(-std::abs(-100.0 + (i + 0.5) * 0.5));
    const CheckReport e = convolution_sandwich_check(rho, 0.5, params(0.8));
    CHECK(std::isfinite(e.constants.at("lower_margin")));
    CHECK(std::isfinite(e.constants.at("upper_margin")));
}

TEST_CASE("tail prediction and synthetic round trip") {
    const ModelParams p = params(0.8);
    CHECK(predicted_tail_rate(p) == doctest::Approx(2.0 * std::sqrt(1.8)).epsilon(1e-14));
    CHECK(predicted_tail_power(p, 0.5) == doctest::Approx(0.25));
    const PhaseGrid g{2000.0, 10.0, 4000, 40};
    const double nu = 2.0 * std::sqrt(1.8);
    const Field f = product_field(g, p, [&](double x) {
        const double a = std::max(std::abs(x), 1e-3);
        return std::exp(3.0 + 0.25 * std::log(a) - nu * std::sqrt(a));
    });
    const CheckReport r = tail_bounds_check(f, p, 200.0, 1500.0);
    CHECK(r.passed);
    CHECK(r.constants.at("nu_hat") == doctest::Approx(nu).epsilon(1e-6));
    CHECK(r.constants.at("beta_hat") == doctest::Approx(0.25).epsilon(1e-6));
    CHECK(r.constants.at("c_hat") == doctest::Approx(3.0).epsilon(1e-6));
    CHECK_THROWS(tail_bounds_check(f, p, 200.0, 2500.0));
}
