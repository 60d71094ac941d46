#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "apx/errors.hpp"
#include "apx/sap_circle.hpp"

using namespace apx;

namespace {

const double kPi = 3.14159265358979323846;

TrigPolynomial constant_poly(Complex c) {
    TrigPolynomial p(BasisSet{{1.0}, {}}, 1);
    p.add_term(VectorValue::scalar(c), Frequency::zero(1));
    return p;
}

// SAP assembled from the exact boundary values of a generator: oracle
// profiles equal to the generator pullback, background the generator itself.
SAPFunction generator_sap(const GeneratorSpec& spec, double scale = 1.0,
                          double blend_radius = 0.4) {
    SingularSet S{{spec.x_angle, spec.y_angle}};
    auto pullback_profile = [&](double t0) {
        APProfile prof;
        prof.z0_angle = t0;
        prof.scale = scale;
        auto arm = [spec, t0, scale](int k) {
            return EvaluationOracle{
                [spec, t0, scale, k](double t) {
                    double sigma = scale * std::exp(t);
                    return VectorValue::scalar(
                        sap_generator(spec, std::polar(1.0, t0 + k * sigma)));
                },
                std::exp(std::max(0.0, spec.lambda)), 1};
        };
        prof.h_plus = arm(+1);
        prof.h_minus = arm(-1);
        return prof;
    };
    std::vector<APProfile> profiles{pullback_profile(spec.x_angle),
                                    pullback_profile(spec.y_angle)};
    BoundaryEvaluator bg = [spec](double theta) {
        return VectorValue::scalar(sap_generator(spec, std::polar(1.0, theta)));
    };
    return build_sap(S, std::move(profiles), bg, {blend_radius, blend_radius}, 1);
}

} // namespace

TEST_CASE("build_sap: trivial cases and validation") {
    BoundaryEvaluator bg = [](double theta) {
        return VectorValue::scalar(std::polar(1.0, 2.0 * theta));
    };
    auto f = build_sap(SingularSet{}, {}, bg, {}, 1);
    for (double t = 0.1; t < 6.2; t += 0.37)
        CHECK((f.eval(t) - bg(t)).norm() == 0.0);

    Complex c(0.3, -0.8);
    APProfile prof;
    prof.z0_angle = 0.0;
    prof.scale = 0.5;
    prof.h_plus = constant_poly(c);
    prof.h_minus = constant_poly(c);
    auto fc = build_sap(SingularSet{{0.0}}, {prof},
                        [c](double) { return VectorValue::scalar(c); }, {0.3}, 1);
    for (double t = 1e-6; t < 6.2; t += 0.21)
        CHECK((fc.eval(t) - VectorValue::scalar(c)).norm() < 1e-15);
    CHECK_THROWS_AS(fc.eval(0.0), AtSingularPoint);

    APProfile p2 = prof;
    p2.z0_angle = 0.1;
    CHECK_THROWS_AS(build_sap(SingularSet{{0.0, 0.1}}, {prof, p2},
                              [c](double) { return VectorValue::scalar(c); },
                              {0.3, 0.3}, 1),
                    OverlappingBlends);

    TrigPolynomial wrong(BasisSet{{1.0}, {}}, 2);
    wrong.add_term(VectorValue(2), Frequency::zero(1));
    APProfile pd = prof;
    pd.h_plus = wrong;
    CHECK_THROWS_AS(build_sap(SingularSet{{0.0}}, {pd},
                              [c](double) { return VectorValue::scalar(c); }, {0.3}, 1),
                    ProfileMismatch);
}

TEST_CASE("generator SAP equals the generator on the blend region") {
    GeneratorSpec spec{1.0, 0.0, kPi, Complex(0.0)};
    auto f = generator_sap(spec);
    for (double sigma : {1e-4, 0.01, 0.1, 0.3, 0.39}) {
        for (int k : {+1, -1}) {
            double theta = spec.x_angle + k * sigma;
            Complex g = sap_generator(spec, std::polar(1.0, theta));
            CHECK((f.eval(theta) - VectorValue::scalar(g)).norm() < 1e-6);
        }
    }
    CHECK(std::abs(f.eval(0.05).norm() - 1.0) < 1e-9);
    CHECK(std::abs(f.eval(-0.05).norm() - std::exp(1.0)) < 1e-9);
}

TEST_CASE("verify_sap: self-consistency, exact exponential candidate, designed failure") {
    GeneratorSpec spec{1.0, 0.0, kPi, Complex(0.0)};
    auto f = generator_sap(spec);

    APProfile self;
    self.z0_angle = 0.0;
    self.scale = 1.0;
    self.h_plus = EvaluationOracle{[spec](double t) {
        return VectorValue::scalar(sap_generator(spec, std::polar(1.0, std::exp(t))));
    }, 3.0, 1};
    self.h_minus = EvaluationOracle{[spec](double t) {
        return VectorValue::scalar(sap_generator(spec, std::polar(1.0, -std::exp(t))));
    }, 3.0, 1};
    auto rep = verify_sap(f, 0.0, 1e-6, self);
    CHECK(rep.pass);
    CHECK(rep.s_epsilon == doctest::Approx(1.0));
    CHECK(rep.sup_error < 1e-6);

    auto cand = generator_profile(spec, 0.0, 1.0);
    auto rep2 = verify_sap(f, 0.0, 1e-6, cand);
    CHECK(rep2.pass);
    CHECK(rep2.sup_error < 1e-6);

    APProfile zero = cand;
    zero.h_plus = constant_poly(0.0);
    zero.h_minus = constant_poly(0.0);
    auto rep3 = verify_sap(f, 0.0, 0.1, zero);
    CHECK(!rep3.pass);
    CHECK(rep3.sup_error > 0.9);
}

TEST_CASE("generator_profile matches the generator on shrinking arcs (both points)") {
    GeneratorSpec spec{0.8, 0.4, 2.5, Complex(0.0)};
    for (double at : {0.4, 2.5}) {
        auto prof = generator_profile(spec, at, 0.7);
        for (int k : {+1, -1}) {
            double worst = 0.0;
            for (double t = -8.0; t < -6.0; t += 0.05) {
                double sigma = 0.7 * std::exp(t);
                Complex g = sap_generator(spec, std::polar(1.0, at + k * sigma));
                worst = std::max(worst, (prof.eval(k, t) - VectorValue::scalar(g)).norm());
            }
            CHECK(worst < 1e-3);
        }
    }
}

TEST_CASE("strip_pullback: constants, generator exponentials, continuity limit") {
    Complex c(1.0, -2.0);
    auto fc = build_sap(SingularSet{}, {}, [c](double) { return VectorValue::scalar(c); },
                        {}, 1);
    auto bp = strip_pullback(fc, 0.3, 1.0);
    auto& o1 = std::get<EvaluationOracle>(bp.f1);
    auto& o2 = std::get<EvaluationOracle>(bp.f2);
    for (double t : {-5.0, 0.0, 1.0}) {
        CHECK((o1.eval(t) - VectorValue::scalar(c)).norm() == 0.0);
        CHECK((o2.eval(t) - VectorValue::scalar(c)).norm() == 0.0);
    }

    GeneratorSpec spec{1.0, 0.0, kPi, Complex(0.0)};
    auto fg = generator_sap(spec);
    auto bpg = strip_pullback(fg, 0.0, 1.0);
    auto& g1 = std::get<EvaluationOracle>(bpg.f1);
    double lam = -spec.lambda / kPi;
    double t = -6.0, dt = 0.25;
    Complex ratio = g1.eval(t + dt).components[0] / g1.eval(t).components[0];
    CHECK(std::abs(ratio - std::exp(Complex(0.0, lam * dt))) < 1e-4);

    auto fcont = build_sap(SingularSet{}, {},
                           [](double theta) {
                               return VectorValue::scalar(Complex(std::cos(theta), 0.0));
                           },
                           {}, 1);
    auto bpc = strip_pullback(fcont, 1.2, 1.0);
    auto& c1 = std::get<EvaluationOracle>(bpc.f1);
    CHECK(std::abs(c1.eval(-12.0).components[0] - Complex(std::cos(1.2))) < 1e-4);
}

TEST_CASE("local_approximant: constants, single tone, generator") {
    Complex c(0.5, 0.25);
    APProfile prof;
    prof.z0_angle = 1.0;
    prof.scale = 0.5;
    prof.h_plus = constant_poly(c);
    prof.h_minus = constant_poly(c);
    auto fc = build_sap(SingularSet{{1.0}}, {prof},
                        [c](double) { return VectorValue::scalar(c); }, {0.3}, 1);
    auto lac = local_approximant(fc, 1.0, 1e-8);
    CHECK(lac.pass);
    CHECK((lac.H(Complex(0.0, 1.5)) - VectorValue::scalar(c)).norm() < 1e-9);

    APProfile tone;
    tone.z0_angle = 0.0;
    tone.scale = 1.0;
    TrigPolynomial e_it(BasisSet{{1.0}, {}}, 1);
    e_it.add_term(VectorValue::scalar(1.0), Frequency::unit(1, 0));
    tone.h_plus = e_it;
    tone.h_minus = constant_poly(0.0);
    auto ftone = build_sap(
        SingularSet{{0.0}}, {tone},
        [](double) { return VectorValue::scalar(Complex(0.0)); }, {0.25}, 1);
    auto lat = local_approximant(ftone, 0.0, 0.05);
    for (double x : {-1.0, 0.4}) {
        for (double y : {0.6, 2.2}) {
            Complex ref = std::polar(1.0, x) * std::sinh(kPi - y) / std::sinh(kPi);
            CHECK((lat.H(Complex(x, y)) - VectorValue::scalar(ref)).norm() <
                  lat.smoothing_bound + 1e-9);
        }
    }

    GeneratorSpec spec{1.0, 0.0, kPi, Complex(0.0)};
    SingularSet S{{0.0, kPi}};
    std::vector<APProfile> profs{generator_profile(spec, 0.0, 1.0),
                                 generator_profile(spec, kPi, 1.0)};
    auto fg = build_sap(S, profs,
                        [spec](double theta) {
                            return VectorValue::scalar(
                                sap_generator(spec, std::polar(1.0, theta)));
                        },
                        {0.4, 0.4}, 1);
    auto lag = local_approximant(fg, 0.0, 0.02);
    CHECK(lag.pass);
    CHECK(lag.sup_error < 0.02);
    CHECK(lag.smoothing_bound <= 0.005);
}

TEST_CASE("poisson_disk: kernel mass, coordinate extension, mode expansion") {
    BoundaryEvaluator cf = [](double) { return VectorValue::scalar(Complex(2.0, -1.0)); };
    CHECK((poisson_disk(cf, 1, Complex(0.3, 0.4)) -
           VectorValue::scalar(Complex(2.0, -1.0))).norm() < 1e-10);

    BoundaryEvaluator id = [](double t) { return VectorValue::scalar(std::polar(1.0, t)); };
    for (Complex z : {Complex(0.5, 0.2), Complex(-0.1, -0.7)})
        CHECK((poisson_disk(id, 1, z) - VectorValue::scalar(z)).norm() < 1e-9);

    BoundaryEvaluator cosf = [](double t) {
        return VectorValue::scalar(Complex(std::cos(t)));
    };
    Complex z(0.3, -0.4);
    CHECK((poisson_disk(cosf, 1, z) - VectorValue::scalar(Complex(z.real()))).norm() < 1e-9);
}

TEST_CASE("poisson_disk max principle on the generator SAP") {
    GeneratorSpec spec{0.6, 0.0, kPi, Complex(0.0)};
    auto f = generator_sap(spec);
    double boundary_sup = 0.0;
    for (int j = 0; j < 2048; ++j)
        boundary_sup = std::max(boundary_sup, f.eval((j + 0.5) * 2.0 * kPi / 2048).norm());
    for (double r : {0.2, 0.6, 0.85}) {
        for (double a = 0.1; a < 6.2; a += 0.83) {
            auto v = poisson_disk(f, std::polar(r, a), 1e-7);
            CHECK(v.norm() <= boundary_sup + 1e-6);
        }
    }
}
