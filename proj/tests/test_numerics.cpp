#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "giscat/numerics.hpp"

using namespace giscat;

TEST_CASE("simpson integrates smooth functions at 4th order") {
    auto run = [](std::size_t n) {
        double h = 2.0 / (n - 1);
        std::vector<double> f(n);
        for (std::size_t i = 0; i < n; ++i) {
            double x = -1.0 + h * i;
            f[i] = std::exp(x) * std::cos(3.0 * x);
        }
        double exact = 0.1 * (std::exp(1.0) * (std::cos(3.0) + 3.0 * std::sin(3.0)) -
                              std::exp(-1.0) * (std::cos(3.0) - 3.0 * std::sin(3.0)));
        return std::abs(integrate(f, h) - exact);
    };
    double e1 = run(101), e2 = run(201);
    REQUIRE(e1 < 1e-7);
    REQUIRE(e2 < e1 / 12.0);  // ~16x per halving

    // odd interval count goes through the 3/8 tail
    double e3 = run(102);
    REQUIRE(e3 < 1e-7);
}

TEST_CASE("cumulative integral matches antiderivative") {
    std::size_t n = 401;
    double h = 4.0 / (n - 1);
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i) f[i] = std::sin(-2.0 + h * i);
    auto F = cumulative_integral(f, h);
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double x = -2.0 + h * i;
        worst = std::max(worst, std::abs(F[i] - (std::cos(-2.0) - std::cos(x))));
    }
    REQUIRE(worst < 2e-7);
}

TEST_CASE("derivatives are 4th order accurate") {
    std::size_t n = 201;
    double h = 2.0 / (n - 1);
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i) f[i] = std::sin(3.0 * (-1.0 + h * i));
    auto d1 = derivative_4th(f, h);
    auto d2 = second_derivative_4th(f, h);
    double w1 = 0.0, w2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double x = -1.0 + h * i;
        w1 = std::max(w1, std::abs(d1[i] - 3.0 * std::cos(3.0 * x)));
        w2 = std::max(w2, std::abs(d2[i] + 9.0 * std::sin(3.0 * x)));
    }
    REQUIRE(w1 < 2e-6);
    REQUIRE(w2 < 5e-5);
}

TEST_CASE("lagrange6 interpolates near machine precision for polynomials") {
    std::size_t n = 41;
    double h = 0.25;
    std::vector<Complex> f(n);
    auto poly = [](double x) { return Complex(x * x * x * x * x - x, 2.0 * x * x); };
    for (std::size_t i = 0; i < n; ++i) f[i] = poly(-5.0 + h * i);
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int k = 0; k < 200; ++k) {
        double x = u(rng);
        REQUIRE(std::abs(lagrange6<Complex>(f, -5.0, h, x) - poly(x)) < 1e-9);
    }
}

TEST_CASE("loglog slope recovers power laws") {
    std::vector<double> t{1.0, 2.0, 4.0, 8.0}, v(4);
    for (std::size_t i = 0; i < 4; ++i) v[i] = 3.0 * std::pow(t[i], -2.5);
    REQUIRE(std::abs(loglog_slope(t, v) + 2.5) < 1e-12);
}
