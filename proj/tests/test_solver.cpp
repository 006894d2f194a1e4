#include <doctest.h>
#include <rtlab/parallel.hpp>
#include <rtlab/solver.hpp>

#include <random>

using namespace rtlab;

namespace {

ModelParams params(double chi, Psi psi = Psi::sign()) {
    ModelParams p;
    p.gamma = 1.0;
    p.chi = chi;
    p.psi = std::move(psi);
    return p;
}

// psi identically zero: Lambda = 1, the chi = 0 dynamics.
ModelParams unbiased() { return params(0.5, Psi::table({0.0, 1.0}, {0.0, 0.0})); }

Field random_field(const PhaseGrid& g, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Field f(g);
    for (int j = 0; j < g.nv; ++j)
        for (int i = 0; i < g.nx; ++i) f.values()(i, j) = u(rng);
    return f;
}

double l1(const Eigen::ArrayXXd& a, const PhaseGrid& g) { return a.abs().sum() * g.dx() * g.dv(); }

// RK4 on df/dt = M theta - Lambda f per column, theta recomputed at every stage.
Eigen::ArrayXXd relax_oracle(const Field& f, double dt, const ModelParams& p, int substeps) {
    const PhaseGrid& g = f.grid();
    const Eigen::ArrayXXd lam = lambda_table(g, p);
    const Eigen::ArrayXd m = discrete_maxwellian(g, p);
    auto rhs = [&](const Eigen::ArrayXXd& F) {
        const Eigen::ArrayXd theta = (F * lam).rowwise().sum() * g.dv();
        return Eigen::ArrayXXd((theta.matrix() * m.matrix().transpose()).array() - lam * F);
    };
    Eigen::ArrayXXd F = f.values();
    const double h = dt / substeps;
    for (int s = 0; s < substeps; ++s) {
        const Eigen::ArrayXXd k1 = rhs(F), k2 = rhs(F + 0.5 * h * k1), k3 = rhs(F + 0.5 * h * k2),
                              k4 = rhs(F + h * k3);
        F += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return F;
}

} // namespace

TEST_CASE("collision step") {
    const PhaseGrid g{10.0, 8.0, 20, 32};
    const ModelParams p = params(0.8);
    CHECK(collision_step(Field(g), 0.01, p).values().abs().maxCoeff() == 0.0);
    const Field f = random_field(g, 1);
    for (double dt : {1e-3, 1e-2}) {
        const Field c = collision_step(f, dt, p);
        CHECK(std::abs(c.mass() - f.mass()) / f.mass() < 1e-8);
        CHECK(c.values().minCoeff() >= 0.0);
        const Eigen::ArrayXXd exact = relax_oracle(f, dt, p, 10);
        CHECK(l1(c.values() - exact, g) / l1(exact, g) < 5.0 * dt * dt);
    }
    const ModelParams q = unbiased();
    const Eigen::ArrayXd m = discrete_maxwellian(g, q);
    const Field eq = Field::from_function(g, [&](double x, double v) {
        const int j = static_cast<int>((v + g.v_max) / g.dv());
        return m(j) * (1.0 + 0.1 * std::sin(x));
    });
    CHECK((collision_step(eq, 0.3, q).values() - eq.values()).abs().maxCoeff() < 1e-14);
}

TEST_CASE("transport step") {
    PhaseGrid g{10.0, 2.0, 20, 4};
    g.bc = Boundary::Periodic;
    const Field f = random_field(g, 2);
    // |v| = 1.5 for the outer rows: dt = dx / 1.5 moves them exactly one cell.
    const Field t = transport_step(f, g.dx() / 1.5);
    for (int i = 0; i < g.nx; ++i) {
        CHECK(t(i, 3) == doctest::Approx(f((i + g.nx - 1) % g.nx, 3)).epsilon(1e-14));
        CHECK(t(i, 0) == doctest::Approx(f((i + 1) % g.nx, 0)).epsilon(1e-14));
    }
    const Field c(g, Eigen::ArrayXXd::Constant(g.nx, g.nv, 0.3));
    CHECK((transport_step(c, 0.2).values() - 0.3).abs().maxCoeff() < 1e-15);
    CHECK(transport_step(f, 0.3).mass() == doctest::Approx(f.mass()).epsilon(1e-14));

    g.bc = Boundary::AbsorbingOutflow;
    Field a(g, f.values());
    double prev = a.mass();
    const double dt = 0.4;
    for (int n = 0; n < 10; ++n) {
        // Outgoing flux: the boundary cell of each row leaves at rate |v| dt / dx.
        double out = 0.0;
        for (int j = 0; j < g.nv; ++j) {
            const double c0 = std::abs(g.v(j)) * dt / g.dx();
            out += c0 * (g.v(j) > 0 ? a(g.nx - 1, j) : a(0, j)) * g.dx() * g.dv();
        }
        a = transport_step(a, dt);
        CHECK(a.mass() <= prev);
        CHECK(prev - a.mass() == doctest::Approx(out).epsilon(1e-12));
        prev = a.mass();
    }
    CHECK_THROWS(transport_step(f, 10.0));
}

TEST_CASE("step fixes the unbiased equilibrium") {
    PhaseGrid g{5.0, 10.0, 10, 40};
    g.bc = Boundary::Periodic;
    const ModelParams q = unbiased();
    const Eigen::ArrayXd m = discrete_maxwellian(g, q);
    Field f(g);
    for (int i = 0; i < g.nx; ++i) f.values().row(i) = m.transpose() / (2.0 * g.x_max);
    for (Splitting s : {Splitting::Lie, Splitting::Strang}) {
        SolverConfig cfg;
        cfg.dt = 0.05;
        cfg.splitting = s;
        CHECK(l1(step(f, cfg.adjusted(g), q).values() - f.values(), g) < 1e-10);
    }
    CHECK(step(Field(g), SolverConfig{}, q).values().abs().maxCoeff() == 0.0);
}

TEST_CASE("solver config") {
    SolverConfig c;
    c.dt = -1.0;
    CHECK_THROWS(c.validate());
    c.dt = 1.0;
    c.cfl_max = 0.5;
    const PhaseGrid g{10.0, 4.0, 20, 8};
    const SolverConfig a = c.adjusted(g);
    CHECK(a.dt * (g.v_max - 0.5 * g.dv()) / g.dx() == doctest::Approx(0.5));
}

TEST_CASE("b0 semigroup") {
    PhaseGrid g{20.0, 4.0, 80, 16};
    g.bc = Boundary::Periodic;
    const Field f = random_field(g, 4);
    CHECK((b0_semigroup(f, 0.0, params(0.8)).values() - f.values()).abs().maxCoeff() == 0.0);
    // Shift along characteristics with the same interpolation, done by hand.
    auto shifted = [&](double t) {
        Field s(g);
        for (int j = 0; j < g.nv; ++j)
            for (int i = 0; i < g.nx; ++i) {
                double pos = (g.x(i) - g.v(j) * t + g.x_max) / g.dx() - 0.5;
                const double fl = std::floor(pos);
                const double w = pos - fl;
                const int i0 = ((static_cast<int>(fl) % g.nx) + g.nx) % g.nx;
                s.values()(i, j) = (1 - w) * f(i0, j) + w * f((i0 + 1) % g.nx, j);
            }
        return s;
    };
    const double t = 1.3;
    const Field sh = shifted(t);
    const Field u = b0_semigroup(f, t, unbiased());
    CHECK((u.values() - std::exp(-t) * sh.values()).abs().maxCoeff() < 1e-12);
    const Field b = b0_semigroup(f, t, params(0.8, Psi::smooth_tanh(2.0)));
    CHECK((b.values() <= std::exp(-0.2 * t) * sh.values() + 1e-14).all());
    CHECK((b.values() >= std::exp(-1.8 * t) * sh.values() - 1e-14).all());
}

TEST_CASE("semi-discrete generator") {
    PhaseGrid g{10.0, 6.0, 20, 24};
    g.bc = Boundary::Periodic;
    const ModelParams p = params(0.8);
    const Field f = random_field(g, 5);
    const Field L = apply_generator(f, p);
    CHECK(std::abs(L.values().sum()) < 1e-11 * f.values().sum());
    SolverConfig cfg;
    cfg.dt = 1e-4;
    const Field s = step(f, cfg, p);
    CHECK(l1((s.values() - f.values()) / cfg.dt - L.values(), g) / l1(L.values(), g) < 1e-2);
}

TEST_CASE("run records and determinism") {
    PhaseGrid g{10.0, 6.0, 40, 24};
    g.bc = Boundary::Periodic;
    const ModelParams p = params(0.8);
    const Field f0 = maxwellian_bump(g, p, 0.0, 2.0);
    SolverConfig cfg;
    cfg.dt = 0.05;
    cfg.t_final = 0.0;
    const std::vector<Probe> probes{{"mass", [](double, const Field& f) { return f.mass(); }}};
    const Trajectory t0 = run(f0, cfg, p, probes);
    CHECK(t0.t.size() == 1);
    CHECK(t0.column("mass")[0] == doctest::Approx(1.0));
    cfg.t_final = 5.0;
    RunOptions opt;
    opt.probe_stride = 10;
    opt.snapshot_stride = 20;
    set_thread_count(1);
    const Trajectory a = run(f0, cfg, p, probes, opt);
    set_thread_count(3);
    const Trajectory b = run(f0, cfg, p, probes, opt);
    set_thread_count(1);
    CHECK(a.t.back() == doctest::Approx(5.0));
    CHECK(a.snapshots.size() == a.snapshot_t.size());
    CHECK(!a.snapshots.empty());
    CHECK((a.final_state.values() == b.final_state.values()).all());
    for (double m : a.column("mass")) CHECK(m == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS(a.column("absent"));
}

TEST_CASE("run aborts on non-finite values") {
    const PhaseGrid g{10.0, 6.0, 20, 24};
    Field f(g);
    f.values()(3, 3) = std::numeric_limits<double>::quiet_NaN();
    SolverConfig cfg;
    cfg.dt = 0.05;
    cfg.t_final = 1.0;
    CHECK_THROWS_AS(run(f, cfg, params(0.5), {}), NumericalFailure);
}

TEST_CASE("periodic mass drift") {
    PhaseGrid g{20.0, 8.0, 40, 32};
    g.bc = Boundary::Periodic;
    const ModelParams p = params(0.8, Psi::smooth_tanh(1.0));
    const Field f0 = maxwellian_bump(g, p, 3.0, 4.0);
    for (Splitting s : {Splitting::Lie, Splitting::Strang}) {
        SolverConfig cfg;
        cfg.dt = 0.05;
        cfg.t_final = 100.0;
        cfg.splitting = s;
        const Trajectory t = run(f0, cfg.adjusted(g), p, {});
        CHECK(std::abs(t.final_state.mass() - 1.0) < 1e-12);
    }
}
