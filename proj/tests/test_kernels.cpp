#include <catch2/catch.hpp>

#include <cmath>

#include "fuzzy/grid.hpp"
#include "fuzzy/kernels.hpp"

using namespace fuzzy;

namespace {

std::vector<double> logspaced(double lo, double hi, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        v[static_cast<std::size_t>(i)] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
    return v;
}

} // namespace

TEST_CASE("symbol_L: pinned values") {
    KernelFamily k = KernelFamily::bessel(1.0, 2.0);
    CHECK(symbol_L(k, 0.0) == 1.0);
    CHECK(symbol_L(k, 1.0) == Approx(0.5).epsilon(1e-15));           // (1+1)^-1
    KernelFamily khalf = KernelFamily::bessel(0.5, 2.0);
    CHECK(symbol_L(khalf, 2.0) == Approx(0.5).epsilon(1e-15));       // eps*xi = 1
    CHECK_THROWS_AS(symbol_L(k, std::nan("")), domain_error);
}

TEST_CASE("symbol_K: square of L, approximate identity, decay") {
    KernelFamily k = KernelFamily::bessel(1.0, 2.0);
    CHECK(symbol_K(k, 0.0) == 1.0);
    CHECK(symbol_K(k, 1.0) == Approx(0.25).epsilon(1e-15));
    double prev = 1.0;
    for (double xi : logspaced(0.1, 1e4, 40)) {
        double v = symbol_K(k, xi);
        CHECK(v <= prev + 1e-15);
        prev = v;
    }
    CHECK(prev < 1e-12);
    for (double xi : logspaced(1e-3, 1e3, 50))
        CHECK(symbol_K(k, xi) == Approx(symbol_L(k, xi) * symbol_L(k, xi)).margin(1e-16));
}

TEST_CASE("symbol scaling covariance: (eps, xi) equals (1, eps xi)") {
    KernelFamily a = KernelFamily::bessel(0.37, 2.0);
    KernelFamily b = KernelFamily::bessel(1.0, 2.0);
    for (double xi : logspaced(1e-2, 1e2, 30))
        CHECK(symbol_L(a, xi) == Approx(symbol_L(b, 0.37 * xi)).epsilon(1e-15));
}

TEST_CASE("verify_hypotheses: bessel family passes with doubling ratio >= 2^-m") {
    KernelFamily k = KernelFamily::bessel(1.0, 2.0);
    auto rep = verify_hypotheses(k, logspaced(1e-3, 1e3, 200));
    CHECK(rep.range_ok);
    CHECK(rep.monotone_ok);
    CHECK(rep.doubling_ok);
    CHECK(rep.derivative_bound_ok);
    CHECK(rep.worst_ratio >= std::pow(2.0, -k.m) - 1e-12);
    CHECK(rep.derivative_constant <= k.m + 1e-6);
}

TEST_CASE("verify_hypotheses: degenerate m=0 is the constant symbol") {
    KernelFamily k = KernelFamily::bessel(1.0, 0.0);
    k.kappa = 1.0;
    auto rep = verify_hypotheses(k, logspaced(1e-2, 1e2, 50));
    CHECK(rep.all_ok());
    CHECK(rep.worst_ratio == Approx(1.0));
    CHECK(rep.derivative_constant == Approx(0.0).margin(1e-9));
}

TEST_CASE("verify_symbol: sharp cutoff violates two-sided doubling") {
    auto cutoff = [](double xi) { return xi <= 1.0 ? 1.0 : 0.0; };
    auto rep = verify_symbol(cutoff, logspaced(1e-1, 1e1, 60), 0.25);
    CHECK_FALSE(rep.doubling_ok);
}

TEST_CASE("verify_hypotheses: argument checks") {
    KernelFamily k = KernelFamily::bessel(1.0, 2.0);
    CHECK_THROWS_AS(verify_hypotheses(k, {}), argument_error);
    CHECK_THROWS_AS(verify_hypotheses(k, {1.0}), argument_error);
    CHECK_THROWS_AS(verify_hypotheses(k, {1.0, -2.0}), argument_error);
}

TEST_CASE("frequency_class: threshold behavior") {
    KernelFamily k = KernelFamily::bessel(1.0, 2.0, 0.1);
    // 2^-10 L(2^-10) ~ 2^-10 < 0.1
    CHECK(frequency_class(k, -10) == FreqClass::Low);
    // peak of 2^j L(2^j) = r/(1+r^2) is 1/2 at r = 1 (j = 0) > 0.1
    CHECK(frequency_class(k, 0) == FreqClass::High);

    KernelFamily wide = k;
    wide.nu0 = 1e9;
    for (int j = -10; j <= 10; ++j) CHECK(frequency_class(wide, j) == FreqClass::Low);
}

TEST_CASE("frequency_class: high band is a finite contiguous window for m>1") {
    KernelFamily k = KernelFamily::bessel(1.0, 2.0, 0.05);
    int first = 100, last = -100, count = 0;
    for (int j = -20; j <= 20; ++j) {
        if (frequency_class(k, j) == FreqClass::High) {
            first = std::min(first, j);
            last = std::max(last, j);
            ++count;
        }
    }
    CHECK(count > 0);
    CHECK(count == last - first + 1);  // contiguous
    CHECK(frequency_class(k, -20) == FreqClass::Low);
    CHECK(frequency_class(k, 20) == FreqClass::Low);
}

TEST_CASE("triangle kernel: unit mass normalization and gradient") {
    TriangleKernel t1 = TriangleKernel::unit_mass(1.0, 1);
    CHECK(t1.c_d == Approx(1.0));
    // d=1: quadrature of the hat
    double mass = 0.0, h = 1e-4;
    for (double x = -1.0 + h / 2; x < 1.0; x += h) mass += t1.value({x, 0.0}) * h;
    CHECK(mass == Approx(1.0).margin(1e-6));

    TriangleKernel t2 = TriangleKernel::unit_mass(0.5, 2);
    CHECK(t2.c_d == Approx(3.0 / pi));

    CHECK(t1.gradient({0.5, 0.0})[0] == Approx(1.0));   // c_1 * sign(x)
    CHECK(t1.gradient({-0.5, 0.0})[0] == Approx(-1.0));
    CHECK(t1.gradient({1.5, 0.0})[0] == 0.0);           // outside support
    CHECK(t1.gradient({0.0, 0.0})[0] == 0.0);           // origin convention
}

TEST_CASE("triangle spectral symbol is the Fejer square") {
    // d=1 closed form: Khat(xi) = sinc^2(eps xi / 2); check against real-space
    // quadrature of the hat kernel.
    double eps = 0.7;
    KernelFamily k = KernelFamily::triangle_symbol(eps);
    TriangleKernel t = TriangleKernel::unit_mass(eps, 1);
    for (double xi : {0.5, 1.0, 3.0, 7.0}) {
        double quad = 0.0, h = 1e-4 * eps;
        for (double x = -eps + h / 2; x < eps; x += h)
            quad += t.value({x, 0.0}) * std::cos(xi * x) * h;
        CHECK(symbol_K(k, xi) == Approx(quad).margin(1e-6));
    }
}
