#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "apx/bochner_fejer.hpp"
#include "apx/errors.hpp"

using namespace apx;

namespace {

TrigPolynomial scalar_poly(const BasisSet& b,
                           std::vector<std::pair<Complex, Frequency>> terms) {
    TrigPolynomial p(b, 1);
    for (auto& [c, f] : terms) p.add_term(VectorValue::scalar(c), f);
    return p;
}

// Independent convolution oracle: coefficient of Tf at lambda is the kernel
// coefficient at -lambda times the coefficient of f at lambda.
TrigPolynomial operator_via_kernel(const TrigPolynomial& K, const TrigPolynomial& f) {
    TrigPolynomial out(f.basis, f.dim);
    for (const auto& term : f.terms) {
        Frequency neg = -term.freq;
        for (const auto& kt : K.terms)
            if (kt.freq == neg) {
                out.terms.push_back({term.coeff * kt.coeff.components[0], term.freq});
                break;
            }
    }
    out.canonicalize();
    return out;
}

} // namespace

TEST_CASE("build_kernel: Fejer coefficients for basis {1}, m=1, N=2") {
    KernelSpec spec{BasisSet{{1.0}, {}}, {1}, {2}};
    auto K = build_kernel(spec);
    REQUIRE(K.terms.size() == 3);
    // 1 + (1/2) e^{it} + (1/2) e^{-it}
    CHECK(bohr_mean(K, Frequency::zero(1)).value.components[0] == Complex(1.0));
    CHECK(bohr_mean(K, Frequency::unit(1, 0)).value.components[0] == Complex(0.5));
    CHECK(bohr_mean(K, -Frequency::unit(1, 0)).value.components[0] == Complex(0.5));
    for (double t = -3.0; t <= 3.0; t += 0.1)
        CHECK(std::abs(evaluate(K, t).components[0] -
                       Complex(1.0 + std::cos(t))) < 1e-14);
}

TEST_CASE("kernel value at zero is N; zero-frequency coefficient is 1") {
    for (std::int64_t N : {1, 2, 5, 9}) {
        KernelSpec spec{BasisSet{{1.0}, {}}, {1}, {N}};
        auto K = build_kernel(spec);
        CHECK(std::abs(evaluate(K, 0.0).components[0] -
                       Complex(static_cast<double>(N))) < 1e-12);
        CHECK(bohr_mean(K, Frequency::zero(1)).value.components[0] == Complex(1.0));
    }
}

TEST_CASE("build_kernel enforces the expanded term cap") {
    KernelSpec spec{BasisSet{{1.0, 2.7}, {}}, {1, 1}, {2000, 2000}};
    CHECK_THROWS_AS(build_kernel(spec), SizeLimit);
}

TEST_CASE("apply_operator: constants, single-tone damping, off-grid zeroing") {
    BasisSet b{{2.2}, {}};
    KernelSpec spec{b, {1}, {4}};

    auto c = scalar_poly(b, {{Complex(3.0, -1.0), Frequency::zero(1)}});
    auto rc = apply_operator(spec, c);
    CHECK(rc.result.terms.size() == 1);
    CHECK(rc.result.terms[0].coeff.components[0] == Complex(3.0, -1.0));
    CHECK(rc.report.damping[0] == 1.0);

    auto tone = scalar_poly(b, {{1.0, Frequency::unit(1, 0)}});
    auto rt = apply_operator(spec, tone);
    CHECK(rt.result.terms[0].coeff.components[0] == Complex(0.75));
    CHECK(rt.report.certified_bound == doctest::Approx(0.25));

    auto half = scalar_poly(b, {{1.0, Frequency{{Rational(1, 2)}}}});
    auto rh = apply_operator(spec, half);
    CHECK(rh.result.empty());
    CHECK(rh.report.off_grid[0]);
}

TEST_CASE("apply_operator matches the kernel-convolution oracle exactly") {
    BasisSet b{{1.0, std::sqrt(2.0)}, {}};
    KernelSpec spec{b, {2, 1}, {5, 3}};
    auto K = build_kernel(spec);
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> U(-2.0, 2.0);
    for (int it = 0; it < 25; ++it) {
        TrigPolynomial f(b, 2);
        for (int t = 0; t < 4; ++t) {
            Frequency fr{{Rational(static_cast<int>(rng() % 7) - 3, 1 + rng() % 2),
                          Rational(static_cast<int>(rng() % 5) - 2, 1)}};
            f.add_term(VectorValue{{Complex(U(rng), U(rng)), Complex(U(rng), U(rng))}}, fr);
        }
        auto direct = apply_operator(spec, f).result;
        auto oracle = operator_via_kernel(K, f);
        REQUIRE(direct.terms.size() == oracle.terms.size());
        for (size_t i = 0; i < direct.terms.size(); ++i) {
            CHECK(direct.terms[i].freq == oracle.terms[i].freq);
            CHECK((direct.terms[i].coeff - oracle.terms[i].coeff).norm() < 1e-14);
        }
    }
}

TEST_CASE("choose_kernel_for_net: certified bounds") {
    BasisSet b1{{1.7}, {}};
    auto cst = scalar_poly(b1, {{Complex(2.0, 1.0), Frequency::zero(1)}});
    auto r0 = choose_kernel_for_net({cst}, 0.3);
    CHECK(r0.certified_bound == 0.0);

    auto tone = scalar_poly(b1, {{1.0, Frequency::unit(1, 0)}});
    auto r1 = choose_kernel_for_net({tone}, 0.1);
    CHECK(r1.spec.N[0] >= 10);
    CHECK(r1.spec.m[0] == 1);
    CHECK(r1.certified_bound <= 0.1);
    CHECK(r1.certified_bound == doctest::Approx(1.0 / static_cast<double>(r1.spec.N[0])));

    BasisSet b2{{1.0, std::sqrt(2.0)}, {}};
    auto f = scalar_poly(b2, {{2.0, Frequency::unit(2, 1)}, {1.0, Frequency::unit(2, 0)}});
    auto r2 = choose_kernel_for_net({f}, 0.05);
    CHECK(r2.certified_bound <= 0.05);
    double check = 2.0 / static_cast<double>(r2.spec.N[1]) + 1.0 / static_cast<double>(r2.spec.N[0]);
    CHECK(r2.certified_bound == doctest::Approx(check));

    // certified bound really dominates the grid-measured error
    auto damped = apply_operator(r2.spec, f).result;
    TrigPolynomial diff = f;
    for (auto& t : damped.terms) diff.add_term(t.coeff * Complex(-1.0), t.freq);
    auto err = sup_norm_estimate(diff, 0.0, 200.0, 0.05);
    CHECK(err.grid_max <= r2.certified_bound + 1e-12);
}

TEST_CASE("kernel nonnegativity and unit mean on random specs") {
    std::mt19937 rng(3);
    for (int it = 0; it < 10; ++it) {
        int r = 1 + static_cast<int>(rng() % 2);
        BasisSet b;
        b.betas = {1.0, std::sqrt(3.0)};
        b.betas.resize(static_cast<size_t>(r));
        KernelSpec spec;
        spec.basis = b;
        for (int j = 0; j < r; ++j) {
            spec.m.push_back(1 + static_cast<std::int64_t>(rng() % 3));
            spec.N.push_back(1 + static_cast<std::int64_t>(rng() % 8));
        }
        auto K = build_kernel(spec);
        CHECK(bohr_mean(K, Frequency::zero(r)).value.components[0] == Complex(1.0));
        for (double t = -20.0; t <= 20.0; t += 0.05) {
            auto v = evaluate(K, t).components[0];
            CHECK(v.real() >= -1e-9);
            CHECK(std::abs(v.imag()) < 1e-9);
        }
    }
}

TEST_CASE("contraction and convergence of the certified bound") {
    BasisSet b{{1.0, std::sqrt(2.0)}, {}};
    auto f = scalar_poly(b, {{2.0, Frequency::unit(2, 1)},
                             {1.0, Frequency::unit(2, 0)},
                             {Complex(0.0, 0.5), Frequency{{Rational(1, 2), Rational(0)}}}});
    double prev = 1e300;
    for (std::int64_t scale : {2, 4, 8, 16, 32}) {
        KernelSpec spec{b, {2, 1}, {scale, scale}};
        auto r = apply_operator(spec, f);
        CHECK(r.report.certified_bound < prev);
        prev = r.report.certified_bound;

        auto sf = sup_norm_estimate(f, 0.0, 100.0, 0.02);
        auto st = sup_norm_estimate(r.result, 0.0, 100.0, 0.02);
        CHECK(st.grid_max <= *sf.coeff_bound + 1e-12);
        CHECK(st.grid_max <= sf.grid_max + 1e-6);
    }
    CHECK(prev < 0.3);
}
