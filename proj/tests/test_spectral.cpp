#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fpuwave/errors.hpp"
#include "fpuwave/reduce.hpp"
#include "fpuwave/spectral.hpp"

using namespace fpuwave;
using std::numbers::pi;

namespace {

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

TEST_CASE("power-of-two detection") {
    for (std::size_t n : {1u, 2u, 4u, 1024u, 8192u}) CHECK(is_power_of_two(n));
    for (std::size_t n : {0u, 3u, 6u, 1000u, 4095u}) CHECK_FALSE(is_power_of_two(n));
    CHECK_THROWS_AS(SpectralOps(96, 24.0), Error);
}

TEST_CASE("forward and inverse transforms round-trip") {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g;
    RealFft fft(256);
    std::vector<double> u(256), back(256);
    for (auto& x : u) x = g(rng);
    std::vector<std::complex<double>> c(fft.modes());
    fft.forward(u, c);
    // zero mode is the plain sum
    double s = 0.0;
    for (double x : u) s += x;
    CHECK(std::abs(c[0].real() - s) < 1e-12);
    fft.inverse(c, back);
    CHECK(sup_diff(u, back) < 1e-14);
}

TEST_CASE("shifting a single Fourier mode multiplies by the phase") {
    const std::size_t n = 256;
    const double L = 64.0;
    SpectralOps ops(n, L);
    std::vector<double> u(n), out(n), expect(n);
    for (int m : {1, 7, 40, 127}) {
        const double k = 2 * pi * m / L;
        for (double h : {1.0, 2.0, -1.0, 0.37, -1.9}) {
            for (std::size_t j = 0; j < n; ++j) {
                u[j] = std::cos(k * ops.x(j)) + 0.5 * std::sin(k * ops.x(j));
                expect[j] = std::cos(k * (ops.x(j) + h)) + 0.5 * std::sin(k * (ops.x(j) + h));
            }
            ops.shift(u, h, out);
            CAPTURE(m);
            CAPTURE(h);
            CHECK(sup_diff(out, expect) < 1e-13);
        }
    }
}

TEST_CASE("integer shifts are index rolls") {
    const std::size_t n = 64;
    SpectralOps ops(n, 16.0);  // dx = 1/4
    std::mt19937_64 rng(2);
    std::normal_distribution<double> g;
    std::vector<double> u(n), out(n);
    for (auto& x : u) x = g(rng);
    ops.shift(u, 1.0, out);
    for (std::size_t j = 0; j < n; ++j) CHECK(out[j] == u[(j + 4) % n]);
    ops.shift(u, -2.0, out);
    for (std::size_t j = 0; j < n; ++j) CHECK(out[j] == u[(j + n - 8) % n]);
}

TEST_CASE("spectral derivatives of smooth periodic functions") {
    const std::size_t n = 128;
    const double L = 2 * pi;
    SpectralOps ops(n, L);
    std::vector<double> u(n), d1(n), d2(n), e1(n), e2(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double x = ops.x(j);
        u[j] = std::exp(std::sin(x));
        e1[j] = std::cos(x) * u[j];
        e2[j] = (std::cos(x) * std::cos(x) - std::sin(x)) * u[j];
    }
    ops.derivative(u, d1);
    ops.second_derivative(u, d2);
    CHECK(sup_diff(d1, e1) < 1e-12);
    CHECK(sup_diff(d2, e2) < 1e-11);
}

TEST_CASE("trigonometric interpolation") {
    const std::size_t n = 64;
    const double L = 20.0;
    std::vector<double> u(n);
    const double dx = L / n;
    auto f = [&](double x) { return std::exp(-0.5 * x * x) * std::cos(3.0 * x); };
    auto df = [&](double x) { return std::exp(-0.5 * x * x) * (-x * std::cos(3.0 * x) - 3.0 * std::sin(3.0 * x)); };
    for (std::size_t j = 0; j < n; ++j) u[j] = f(-0.5 * L + j * dx);
    TrigInterpolant t(u, L);
    for (std::size_t j = 0; j < n; ++j) CHECK(std::abs(t(-0.5 * L + j * dx) - u[j]) < 1e-13);
    std::vector<double> dense(2048);
    for (double x = -9.0; x <= 9.0; x += 0.173) {
        CHECK(std::abs(t(x) - f(x)) < 1e-6);
        CHECK(std::abs(t.derivative(x) - df(x)) < 1e-5);
        // periodicity
        CHECK(std::abs(t(x + L) - t(x)) < 1e-12);
    }
    const auto fine = t.refined(8);
    REQUIRE(fine.size() == 8 * n);
    for (std::size_t j = 0; j < fine.size(); j += 5) CHECK(std::abs(fine[j] - t(-0.5 * L + j * dx / 8)) < 1e-13);
    CHECK_THROWS_AS(TrigInterpolant(std::vector<double>(7, 1.0), 1.0), Error);
}

TEST_CASE("pairwise summation is order-stable and accurate") {
    std::vector<double> x(100001);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = 1.0 / static_cast<double>(i + 1);
    const double a = pairwise_sum(x), b = pairwise_sum(x);
    CHECK(a == b);
    long double ref = 0.0L;
    for (double v : x) ref += v;
    CHECK(std::abs(a - static_cast<double>(ref)) < 1e-13);
}
