#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "apx/errors.hpp"
#include "apx/polydisk.hpp"

using namespace apx;

namespace {

const double kPi = 3.14159265358979323846;

TensorFactor unit_factor() {
    TensorFactor f;
    f.kind = TensorFactor::Kind::poly;
    f.poly.coeffs = {VectorValue::scalar(Complex(1.0))};
    return f;
}

TensorFactor identity_factor() {
    TensorFactor f;
    f.kind = TensorFactor::Kind::poly;
    f.poly.coeffs = {VectorValue::scalar(Complex(0.0)), VectorValue::scalar(Complex(1.0))};
    return f;
}

TensorFactor generator_factor(double lambda) {
    TensorFactor f;
    f.kind = TensorFactor::Kind::generator;
    f.gen = GeneratorSpec{lambda, 0.0, kPi, Complex(0.0)};
    return f;
}

} // namespace

TEST_CASE("tensor_eval: unit factor, identity boundary data, generators") {
    TensorFunction F;
    F.n = 2;
    TensorTerm t;
    t.factors = {unit_factor(), generator_factor(1.0)};
    F.terms = {t};
    Complex z2(0.3, 0.2);
    auto v = tensor_eval(F, {Complex(0.5, -0.5), z2});
    CHECK(std::abs(v.components[0] - sap_generator(t.factors[1].gen, z2)) < 1e-14);

    // identity boundary data extended through the Poisson integral
    TensorFactor sapf;
    sapf.kind = TensorFactor::Kind::sap;
    sapf.sap = std::make_shared<SAPFunction>(build_sap(
        SingularSet{}, {},
        [](double theta) { return VectorValue::scalar(std::polar(1.0, theta)); }, {}, 1));
    TensorFunction Fid;
    Fid.n = 2;
    TensorTerm tid;
    tid.factors = {sapf, sapf};
    Fid.terms = {tid};
    auto v0 = tensor_eval(Fid, {Complex(0.0, 0.0), Complex(0.0, 0.0)});
    CHECK(std::abs(v0.components[0]) < 1e-8);

    // product of single-factor values
    TensorFunction Fg;
    Fg.n = 2;
    TensorTerm tg;
    tg.factors = {generator_factor(1.0), generator_factor(1.0)};
    Fg.terms = {tg};
    Complex za(0.4, 0.1), zb(-0.2, 0.6);
    auto vg = tensor_eval(Fg, {za, zb});
    CHECK(std::abs(vg.components[0] - sap_generator(tg.factors[0].gen, za) *
                                          sap_generator(tg.factors[0].gen, zb)) < 1e-13);
}

TEST_CASE("tensor_sup_norm: product structure and boundary moduli") {
    TensorFunction F;
    F.n = 2;
    TensorTerm t;
    t.factors = {generator_factor(1.0), generator_factor(1.0)};
    F.terms = {t};
    auto s = tensor_sup_norm(F, 128);
    CHECK(s.grid_max == doctest::Approx(std::exp(2.0)).epsilon(1e-9));
    REQUIRE(s.product_bound.has_value());
    CHECK(s.grid_max <= *s.product_bound + 1e-12);
    CHECK(*s.product_bound == doctest::Approx(std::exp(2.0)).epsilon(1e-9));

    TensorFunction Fc;
    Fc.n = 2;
    TensorTerm tc;
    tc.weight = Complex(0.0, -2.5);
    tc.factors = {unit_factor(), unit_factor()};
    Fc.terms = {tc};
    CHECK(tensor_sup_norm(Fc, 16).grid_max == doctest::Approx(2.5));
}

TEST_CASE("separate holomorphy of the extended tensor (n = 2)") {
    TensorFactor g = generator_factor(0.7);
    for (Complex base : {Complex(0.2, 0.1), Complex(-0.4, 0.3)}) {
        double h = 1e-3;
        // finite-difference dbar in each coordinate of g(z1) g(z2)
        auto f = [&](Complex z1, Complex z2) {
            return sap_generator(g.gen, z1) * sap_generator(g.gen, z2);
        };
        Complex z2(0.1, -0.3);
        Complex fx = (f(base + h, z2) - f(base - h, z2)) / (2 * h);
        Complex fy = (f(base + Complex(0, h), z2) - f(base - Complex(0, h), z2)) / (2 * h);
        CHECK(std::abs(0.5 * (fx + Complex(0, 1) * fy)) < 5.0 * h * h);
    }
}

TEST_CASE("tensor_approximate: unchanged polynomials and unit-factor reduction") {
    TensorFunction F;
    F.n = 2;
    TensorTerm t;
    t.factors = {identity_factor(), identity_factor()};
    F.terms = {t};
    GlueConfig cfg;
    cfg.n_theta = 2048;
    cfg.annulus_rows = 5;
    cfg.radial_cells = 12;
    cfg.core_rings = 6;
    auto r = tensor_approximate(F, 0.1, cfg);
    CHECK(r.report.reported_bound == 0.0);
    CHECK(r.report.measured_error == 0.0);
    Complex v = r.F_approx({Complex(0.3, 0.1), Complex(0.2, -0.2)});
    CHECK(std::abs(v - Complex(0.3, 0.1) * Complex(0.2, -0.2)) < 1e-15);
}

TEST_CASE("tensor_approximate on generator x generator at eps = 0.2") {
    TensorFunction F;
    F.n = 2;
    TensorTerm t;
    t.factors = {generator_factor(1.0), generator_factor(1.0)};
    F.terms = {t};
    GlueConfig cfg;
    cfg.n_theta = 4096;
    cfg.annulus_rows = 7;
    cfg.radial_cells = 24;
    cfg.core_rings = 10;
    auto r = tensor_approximate(F, 0.2, cfg);
    // identical factors share one pipeline run
    CHECK(r.report.factor_reports.size() == 1);
    CHECK(r.report.measured_error <= r.report.reported_bound);
    CHECK(r.report.measured_error > 0.0);
    CHECK(r.report.reported_bound < 2.0 * (std::exp(1.0) + 1.0) * 0.2 * 20.0);

    // n = 1 reduction: identical to the plain 1-D pipeline
    TensorFunction F1;
    F1.n = 1;
    TensorTerm t1;
    t1.factors = {generator_factor(1.0)};
    F1.terms = {t1};
    auto r1 = tensor_approximate(F1, 0.2, cfg);
    auto direct = approximate(make_generator_input(t1.factors[0].gen), 0.2, cfg);
    REQUIRE(r1.report.factor_reports.size() == 1);
    CHECK(r1.report.factor_reports[0].sup_error == direct.report.sup_error);
    CHECK(r1.report.factor_reports[0].C_hat == direct.report.C_hat);
    CHECK(r1.report.factor_reports[0].width == direct.report.width);
    for (Complex z : {Complex(0.3, 0.4), Complex(-0.8, 0.1)})
        CHECK(std::abs(r1.F_approx({z}) - direct.F_eps(z).components[0]) == 0.0);
}
