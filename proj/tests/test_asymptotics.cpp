#include "oracles.hpp"

#include <doctest.h>
#include <rtlab/asymptotics.hpp>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

using namespace rtlab;

namespace {

// gamma = 1: int_0^inf u^{n-1} e^{-u - y/u} du = 2 y^{n/2} K_n(2 sqrt y).
double bessel_oracle(int n, double y) { return 2.0 * std::pow(y, 0.5 * n) * std::cyl_bessel_k(double(n), 2.0 * std::sqrt(y)); }

// int_0^inf t^{lambda-1} g(t) e^{-X t} dt with t = s^2.
double laplace_transform_oracle(const std::function<double(double)>& g, double lambda, double X) {
    return oracle::simpson_upper(
        [&](double s) {
            if (s == 0.0 && lambda < 0.5) return 0.0;
            return 2.0 * std::pow(s, 2.0 * lambda - 1.0) * g(s * s) * std::exp(-X * s * s);
        },
        0.0, 0.5);
}

} // namespace

TEST_CASE("laplace quadrature against bessel closed forms") {
    for (int n : {0, 1, 2})
        for (double y : {1e-3, 0.5, 3.0, 50.0, 300.0, 2000.0}) {
            const double q = laplace_quadrature({n, 1.0, y});
            CHECK(oracle::rel(q, bessel_oracle(n, y)) < 1e-8);
        }
    // Deep tail, where K_1 underflows: Hankel expansion of K_1 to third order.
    const double y = 2e5, z = 2.0 * std::sqrt(y);
    const double hankel = 1.0 + 3.0 / (8.0 * z) - 15.0 / (128.0 * z * z) + 315.0 / (3072.0 * z * z * z);
    const double logk = std::log(2.0) + 0.5 * std::log(y) - z + 0.5 * std::log(M_PI / (2.0 * z)) + std::log(hankel);
    CHECK(laplace_log_quadrature({1, 1.0, y}) == doctest::Approx(logk).epsilon(1e-10));
}

TEST_CASE("laplace y = 0 constants and validation") {
    CHECK(laplace_quadrature({1, 1.0, 0.0}) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(laplace_quadrature({3, 1.0, 0.0}) == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(laplace_quadrature({1, 2.0, 0.0}) == doctest::Approx(std::sqrt(M_PI / 2.0)).epsilon(1e-10));
    for (int n : {1, 2, 3})
        for (double g : {0.5, 1.0, 2.0}) {
            const LaplaceSpec s{n, g, 0.0};
            CHECK(laplace_asymptotic(s, Regime::Small) == doctest::Approx(laplace_quadrature(s)).epsilon(1e-9));
        }
    CHECK_THROWS_AS(laplace_quadrature({0, 1.0, 0.0}), std::domain_error);
    CHECK_THROWS(laplace_quadrature({-1, 1.0, 1.0}));
    CHECK_THROWS(laplace_quadrature({1, 0.0, 1.0}));
    CHECK_THROWS(laplace_quadrature({1, 1.0, -1.0}));
}

TEST_CASE("log law for n = 0") {
    // 2 K_0(2 sqrt y) = -ln y - 2 gamma_E + o(1).
    const double y = 1e-12;
    const double q = laplace_quadrature({0, 1.0, y});
    CHECK(q == doctest::Approx(-std::log(y) - 2.0 * 0.5772156649015329).epsilon(1e-6));
    CHECK(oracle::rel(q, laplace_asymptotic({0, 1.0, y}, Regime::Small)) < 0.05);
    CHECK_THROWS(laplace_asymptotic({0, 1.0, 0.0}, Regime::Small));
}

TEST_CASE("large-y leading order") {
    // Ratios approach one from the Bessel expansion: K_n(z) ~ sqrt(pi/2z) e^{-z} (1 + (4n^2-1)/8z).
    for (int n : {0, 1, 2})
        for (double y : {50.0, 300.0, 5000.0}) {
            const LaplaceSpec s{n, 1.0, y};
            const double z = 2.0 * std::sqrt(y);
            const double corr = 1.0 + (4.0 * n * n - 1.0) / (8.0 * z);
            CHECK(laplace_quadrature(s) / laplace_asymptotic(s, Regime::Large) == doctest::Approx(corr).epsilon(2e-3));
        }
    const std::vector<double> ys{50.0, 300.0};
    const auto rows = laplace_table(1, 1.0, ys, Regime::Large);
    REQUIRE(rows.size() == 2);
    CHECK(rows[1].ratio == doctest::Approx(rows[1].quadrature / rows[1].asymptotic));
}

TEST_CASE("phi profile") {
    // d = 1 is I_0, d = 2 is I_1 / y.
    CHECK(phi_quadrature(2.0, 1, 1.0) == doctest::Approx(bessel_oracle(0, 2.0)).epsilon(1e-9));
    CHECK(phi_quadrature(-2.0, 2, 1.0) == doctest::Approx(bessel_oracle(1, 2.0) / 2.0).epsilon(1e-9));
    CHECK(oracle::rel(phi_quadrature(1e-6, 2, 1.0), 1e6) < 1e-4);
    CHECK(phi_asymptotic(1e-6, 2, 1.0, Regime::Small) == doctest::Approx(1e6));
    double prev = phi_quadrature(0.01, 1, 1.0);
    for (double y = 0.1; y < 200.0; y *= 1.5) {
        const double v = phi_quadrature(y, 1, 1.0);
        CHECK(v < prev);
        prev = v;
    }
    CHECK_THROWS(phi_quadrature(0.0, 1, 1.0));
    CHECK_THROWS(phi_quadrature(1.0, 0, 1.0));

    const double ref = oracle::simpson([](double y) { return bessel_oracle(0, y); }, 1.0, 3.0, 2000);
    CHECK(phi_interval_integral(1.0, 3.0, 1.0) == doctest::Approx(ref).epsilon(1e-8));
    // int_0^inf Phi = int_0^inf e^{-u} du = 1 for gamma = 1.
    CHECK(phi_interval_integral(0.0, 1e4, 1.0) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK_THROWS(phi_interval_integral(2.0, 1.0, 1.0));
}

TEST_CASE("watson partial sums") {
    const std::vector<double> one{1.0}, lin{0.0, 1.0}, cubic{1.0, 2.0, 0.0, -0.5};
    CHECK(watson_partial_sum(one, 1.0, 2.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(watson_partial_sum(lin, 1.0, 2.0) == doctest::Approx(0.25).epsilon(1e-15));
    for (double lambda : {0.5, 1.0, 2.5})
        for (double X : {0.7, 3.0, 40.0}) {
            const double ref = laplace_transform_oracle([](double t) { return 1.0 + 2.0 * t - 0.5 * t * t * t; }, lambda, X);
            CHECK(oracle::rel(watson_partial_sum(cubic, lambda, X), ref) < 1e-10);
        }
    // g = 1/(1+t): asymptotic, not convergent; the truncation error stays below the first omitted term.
    const double X = 20.0, lambda = 1.0;
    const double ref = laplace_transform_oracle([](double t) { return 1.0 / (1.0 + t); }, lambda, X);
    std::vector<double> alt;
    for (int n = 0; n < 6; ++n) alt.push_back(n % 2 ? -1.0 : 1.0);
    const double next = std::tgamma(6.0 + lambda) * std::pow(X, -(6.0 + lambda));
    CHECK(std::abs(watson_partial_sum(alt, lambda, X) - ref) <= next);
    CHECK_THROWS(watson_partial_sum(one, 1.0, 0.0));
}

TEST_CASE("sub-exponential convolution") {
    CHECK(subexp_convolution(1.0, 2.0, 0.5, 0.0) == 0.0);
    for (double t : {0.5, 3.0, 20.0}) {
        const double exact = (std::exp(-t) - std::exp(-2.0 * t)) / (2.0 - 1.0);
        CHECK(subexp_convolution(1.0, 2.0, 1.0, t) == doctest::Approx(exact).epsilon(1e-10));
    }
    CHECK(subexp_convolution(1.0, 2.0, 0.5, 4.0) ==
          doctest::Approx(oracle::simpson([](double s) { return std::exp(-std::sqrt(s) - 2.0 * (4.0 - s)); }, 0.0, 4.0,
                                          200000))
              .epsilon(1e-6));

    std::vector<double> ts;
    for (int k = 1; k <= 200; ++k) ts.push_back(0.5 * k);
    const CheckReport e = subexp_convolution_check(1.0, 2.0, 1.0, ts);
    CHECK(e.passed);
    CHECK(e.constants.at("C") <= e.constants.at("closed_form_bound") + 1e-12);
    const CheckReport s = subexp_convolution_check(1.0, 2.0, 0.5, ts);
    CHECK(s.passed);
    CHECK(std::isfinite(s.constants.at("C")));
    CHECK(s.constants.at("C") > 0.0);
    CHECK_THROWS(subexp_convolution_check(1.0, 1.0, 1.0, ts));
    CHECK_THROWS(subexp_convolution_check(1.0, 2.0, 1.5, ts));
}

TEST_CASE("tail fit") {
    std::vector<double> x, y, flat, noisy;
    std::mt19937_64 rng(3);
    std::normal_distribution<double> eps(0.0, 0.01);
    for (int k = 0; k < 200; ++k) {
        const double s = 200.0 + 6.5 * k;
        x.push_back(s);
        const double l = 1.5 + 0.25 * std::log(s) - 2.68 * std::sqrt(s);
        y.push_back(l);
        flat.push_back(-4.0);
        noisy.push_back(l + eps(rng));
    }
    const FitReport r = tail_fit(x, y, 0.5);
    CHECK(r.nu_hat == doctest::Approx(2.68).epsilon(1e-9));
    CHECK(r.beta_hat == doctest::Approx(0.25).epsilon(1e-7));
    CHECK(r.c_hat == doctest::Approx(1.5).epsilon(1e-7));
    CHECK(r.samples == 200);
    const FitReport f = tail_fit(x, flat, 0.5);
    CHECK(std::abs(f.nu_hat) < 1e-9);
    CHECK(std::abs(f.beta_hat) < 1e-9);
    CHECK(oracle::rel(tail_fit(x, noisy, 0.5).nu_hat, 2.68) < 0.02);
    CHECK_THROWS(tail_fit(std::vector<double>(5, 1.0), std::vector<double>(5, 1.0), 0.5));
    CHECK_THROWS(tail_fit(x, std::vector<double>(3, 1.0), 0.5));
}
