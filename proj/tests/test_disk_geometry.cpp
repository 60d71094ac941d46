#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "apx/disk_geometry.hpp"
#include "apx/errors.hpp"
#include "apx/grid_field.hpp"

using namespace apx;

namespace {
const double kPi = 3.14159265358979323846;
}

TEST_CASE("mobius: interpolation values and pole") {
    MobiusChart c{Complex(1.0, 0.0)};
    CHECK(std::abs(c.apply(Complex(1.0, 0.0))) < 1e-15);
    CHECK(std::abs(c.apply(Complex(0.0, 1.0)) - Complex(2.0, 0.0)) < 1e-15);
    CHECK_THROWS_AS(c.apply(Complex(-1.0, 0.0)), PoleAt);
}

TEST_CASE("mobius maps disk to upper half-plane and circle to the real line") {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> R(0.0, 0.999), A(0.0, 2.0 * kPi);
    MobiusChart c{std::polar(1.0, 0.7)};
    for (int i = 0; i < 200; ++i) {
        Complex z = std::polar(R(rng), A(rng));
        CHECK(c.apply(z).imag() > 0.0);
    }
    for (int i = 0; i < 200; ++i) {
        Complex z = std::polar(1.0, A(rng));
        if (std::abs(z + c.z0) < 1e-3) continue;
        CHECK(std::abs(c.apply(z).imag()) < 1e-9);
    }
    // inverse round-trip
    for (int i = 0; i < 50; ++i) {
        Complex z = std::polar(R(rng), A(rng));
        CHECK(std::abs(c.inverse(c.apply(z)) - z) < 1e-12);
    }
}

TEST_CASE("principal_log: branch values") {
    CHECK(principal_log(Complex(1.0, 0.0)) == Complex(0.0, 0.0));
    CHECK(std::abs(principal_log(Complex(0.0, 1.0)) - Complex(0.0, kPi / 2.0)) < 1e-15);
    auto v = principal_log(Complex(-2.0, 0.0));
    CHECK(std::abs(v - Complex(std::log(2.0), kPi)) < 1e-15);
    CHECK_THROWS_AS(principal_log(Complex(0.0, 0.0)), LogOfZero);
}

TEST_CASE("Log after mobius lands in the strip") {
    MobiusChart c{Complex(1.0, 0.0)};
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> R(0.0, 0.999), A(0.0, 2.0 * kPi);
    for (int i = 0; i < 300; ++i) {
        Complex z = std::polar(R(rng), A(rng));
        Complex w = principal_log(c.apply(z));
        CHECK(w.imag() > 0.0);
        CHECK(w.imag() < kPi);
    }
}

TEST_CASE("mobius_two_point: interpolation conditions and orientation") {
    double xa = 0.3, ya = 2.1;
    CHECK(std::abs(mobius_two_point(xa, ya, std::polar(1.0, xa))) < 1e-14);
    Complex mid = std::polar(1.0, 0.5 * (xa + ya));
    CHECK(std::abs(mobius_two_point(xa, ya, mid) - Complex(1.0, 0.0)) < 1e-12);
    CHECK_THROWS_AS(mobius_two_point(xa, ya, std::polar(1.0, ya)), PoleAt);
    CHECK(mobius_two_point(0.0, kPi, Complex(0.0, 0.0)).imag() > 0.0);

    std::mt19937 rng(31);
    std::uniform_real_distribution<double> R(0.0, 0.995), A(0.0, 2.0 * kPi);
    for (int i = 0; i < 200; ++i) {
        Complex z = std::polar(R(rng), A(rng));
        CHECK(mobius_two_point(xa, ya, z).imag() > 0.0);
    }
}

TEST_CASE("sap_generator: trivial lambda, midpoint value, boundary moduli") {
    GeneratorSpec trivial{0.0, 0.0, kPi, Complex(0.0)};
    CHECK(std::abs(sap_generator(trivial, Complex(0.3, 0.2)) - Complex(1.0)) < 1e-15);

    GeneratorSpec spec{1.3, 0.0, kPi, Complex(0.0)};
    Complex mid = std::polar(1.0, kPi / 2.0);
    CHECK(std::abs(sap_generator(spec, mid) - Complex(1.0)) < 1e-9);  // e^{lambda C}, C = 0

    // |g| = 1 on the arc containing the midpoint, e^{lambda} on the complement
    int n = 10000;
    for (int i = 1; i < n; ++i) {
        double t = kPi * static_cast<double>(i) / n;
        double m_in = std::abs(sap_generator(spec, std::polar(1.0, t)));
        CHECK(std::abs(m_in - 1.0) < 1e-9);
        double m_out = std::abs(sap_generator(spec, std::polar(1.0, -t)));
        CHECK(std::abs(m_out - std::exp(spec.lambda)) < 1e-9 * std::exp(spec.lambda));
    }
    CHECK_THROWS_AS(sap_generator(spec, Complex(1.0, 0.0)), LogOfZero);
    CHECK_THROWS_AS(sap_generator(spec, Complex(-1.0, 0.0)), PoleAt);
}

TEST_CASE("sap_generator group property and holomorphy") {
    GeneratorSpec a{0.7, 0.4, 2.9, Complex(0.0)};
    GeneratorSpec b{-1.1, 0.4, 2.9, Complex(0.0)};
    GeneratorSpec ab{0.7 - 1.1, 0.4, 2.9, Complex(0.0)};
    std::mt19937 rng(41);
    std::uniform_real_distribution<double> R(0.0, 0.999), A(0.0, 2.0 * kPi);
    for (int i = 0; i < 200; ++i) {
        Complex z = std::polar(R(rng), A(rng));
        Complex lhs = sap_generator(a, z) * sap_generator(b, z);
        Complex rhs = sap_generator(ab, z);
        CHECK(std::abs(lhs - rhs) < 1e-12 * std::max(1.0, std::abs(rhs)));
    }

    GeneratorSpec spec{1.0, 0.0, kPi, Complex(0.0)};
    double prev = 1e300;
    for (double h : {0.004, 0.002, 0.001}) {
        auto g = GridField::cartesian(-0.2, -0.45, h, 25, 25, 1);
        g.sample([&](Complex z) { return VectorValue::scalar(sap_generator(spec, z)); });
        double r = holo_residual(g);
        CHECK(r < prev);
        prev = r;
        CHECK(r < 50.0 * h * h);
    }
}

TEST_CASE("harmonic indicator: Arg(phi)/pi has boundary values 0/1 with jumps at x, y") {
    double xa = 1.0, ya = 4.0;
    TwoPointChart chart = TwoPointChart::between(xa, ya);
    for (double off = 0.01; off < 2.9; off += 0.05) {
        Complex inside = std::polar(1.0 - 1e-9, xa + off);  // ccw arc [x,y]
        double u_in = std::arg(chart.apply(inside)) / kPi;
        CHECK(std::abs(u_in) < 1e-3);
        Complex outside = std::polar(1.0 - 1e-9, xa - off * 0.7);
        double u_out = std::arg(chart.apply(outside)) / kPi;
        CHECK(std::abs(u_out - 1.0) < 1e-3);
    }
}

TEST_CASE("LogChart: arc images, coordinate maps, round trips") {
    LogChart c = LogChart::at_angle(0.5);
    // ccw side lands on Im = 0, cw side on Im = pi
    Complex w_plus = c.to_strip(std::polar(1.0, 0.5 + 0.3));
    CHECK(w_plus.imag() == 0.0);
    CHECK(std::abs(w_plus.real() - std::log(2.0 * std::tan(0.15))) < 1e-12);
    Complex w_minus = c.to_strip(std::polar(1.0, 0.5 - 0.3));
    CHECK(w_minus.imag() == kPi);

    for (double sigma : {0.05, 0.4, 1.2}) {
        double t = LogChart::sigma_to_t(sigma);
        CHECK(LogChart::t_to_sigma(t) == doctest::Approx(sigma).epsilon(1e-12));
    }
    std::mt19937 rng(53);
    std::uniform_real_distribution<double> R(0.0, 0.99), A(0.0, 2.0 * kPi);
    for (int i = 0; i < 100; ++i) {
        Complex z = std::polar(R(rng), A(rng));
        CHECK(std::abs(c.from_strip(c.to_strip(z)) - z) < 1e-12);
    }
    // arc-grid round trip through the boundary formula
    for (double sigma = 0.01; sigma < 2.0; sigma += 0.07) {
        Complex z = std::polar(1.0, 0.5 + sigma);
        Complex w = c.to_strip(z);
        CHECK(std::abs(c.from_strip(w) - z) < 1e-9);
    }
}
