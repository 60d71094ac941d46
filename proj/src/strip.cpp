#include "apx/strip.hpp"

#include <cmath>

#include "apx/errors.hpp"

namespace apx {

namespace {

constexpr double kPi = kStripHeight;

int ap_dim(const APFunction& f) {
    if (std::holds_alternative<TrigPolynomial>(f))
        return std::get<TrigPolynomial>(f).dim;
    return std::get<EvaluationOracle>(f).dim;
}

// sinh(lambda a) / sinh(lambda pi) for a in [0, pi], overflow-safe.
double sinh_ratio(double lambda, double a) {
    if (lambda == 0.0) return a / kPi;
    double l = std::abs(lambda);
    // e^{-l(pi-a)} (1 - e^{-2la}) / (1 - e^{-2l pi})
    return std::exp(-l * (kPi - a)) * (-std::expm1(-2.0 * l * a)) / (-std::expm1(-2.0 * l * kPi));
}

} // namespace

int BoundaryPair::dim() const {
    int d1 = ap_dim(f1), d2 = ap_dim(f2);
    if (d1 != d2) throw ProfileMismatch("BoundaryPair: dimension mismatch");
    return d1;
}

VectorValue eval_strip(const StripExpSum& p, Complex z) {
    double y = z.imag();
    if (y < -1e-12 || y > kPi + 1e-12)
        throw OutOfDomain("eval_strip: Im z outside [0, pi]");
    VectorValue acc(p.dim);
    for (const auto& term : p.terms) {
        double lambda = term.freq.value(p.basis);
        Complex factor = std::exp(Complex(0.0, lambda) * z);
        for (int i = 0; i < p.dim; ++i)
            acc.components[static_cast<size_t>(i)] +=
                term.coeff.components[static_cast<size_t>(i)] * factor;
    }
    return acc;
}

StripSupNorm strip_sup_norm(const StripExpSum& p, double t0, double t1, double step) {
    if (step <= 0.0 || t1 < t0) throw OutOfDomain("strip_sup_norm: bad window");
    StripSupNorm out;
    for (double t = t0; t <= t1 + 0.5 * step; t += step) {
        out.grid_max = std::max(out.grid_max, eval_strip(p, Complex(t, 0.0)).norm());
        out.grid_max = std::max(out.grid_max, eval_strip(p, Complex(t, kPi)).norm());
    }
    for (const auto& term : p.terms) {
        double lambda = term.freq.value(p.basis);
        out.coeff_bound += term.coeff.norm() * std::max(1.0, std::exp(-lambda * kPi));
    }
    return out;
}

namespace {

// Closed-form harmonic extension of polynomial boundary data.
VectorValue extend_polynomial(const TrigPolynomial& p, bool lower_edge, Complex z) {
    double x = z.real(), y = z.imag();
    VectorValue acc(p.dim);
    for (const auto& term : p.terms) {
        double lambda = term.freq.value(p.basis);
        double a = lower_edge ? (kPi - y) : y;
        Complex factor = std::polar(1.0, lambda * x) * sinh_ratio(lambda, a);
        for (int i = 0; i < p.dim; ++i)
            acc.components[static_cast<size_t>(i)] +=
                term.coeff.components[static_cast<size_t>(i)] * factor;
    }
    return acc;
}

// Harmonic-measure density of the edge at distance y (lower) resp. pi - y (upper).
double strip_kernel(double s, double y, bool lower_edge) {
    double c = std::cos(y);
    return std::sin(y) / (2.0 * kPi * (std::cosh(s) + (lower_edge ? -c : c)));
}

VectorValue extend_oracle(const EvaluationOracle& f, bool lower_edge, Complex z,
                          const QuadraturePlan& quad) {
    double x = z.real(), y = z.imag();
    double T = quad.t_trunc;
    // kernel tail: for s >= max(T, 5), cosh(s) -+ cos(y) >= e^s / 4
    double tail = f.bound * std::sin(y) * (4.0 / kPi) * std::exp(-T);
    if (tail > quad.tol)
        throw NonConverged("poisson_extend_strip: truncation tail above tolerance");

    auto integrate = [&](double h) {
        long long n = std::max<long long>(4, static_cast<long long>(std::ceil(2.0 * T / h)));
        double hh = 2.0 * T / static_cast<double>(n);
        std::vector<Complex> sum(static_cast<size_t>(f.dim)), comp(static_cast<size_t>(f.dim));
        for (long long i = 0; i < n; ++i) {
            double s = -T + (static_cast<double>(i) + 0.5) * hh;
            double w = strip_kernel(s, y, lower_edge) * hh;
            VectorValue v = f.eval(x + s);
            for (int c = 0; c < f.dim; ++c) {
                Complex yk = v.components[static_cast<size_t>(c)] * w - comp[static_cast<size_t>(c)];
                Complex sk = sum[static_cast<size_t>(c)] + yk;
                comp[static_cast<size_t>(c)] = (sk - sum[static_cast<size_t>(c)]) - yk;
                sum[static_cast<size_t>(c)] = sk;
            }
        }
        VectorValue out(f.dim);
        out.components = sum;
        return out;
    };

    double h = quad.step;
    VectorValue est = integrate(h);
    for (int r = 0; r < quad.max_refinements; ++r) {
        VectorValue next = integrate(h / 2.0);
        double diff = (next - est).norm();
        est = next;
        h /= 2.0;
        if (diff <= 0.5 * quad.tol) return est;
    }
    throw NonConverged("poisson_extend_strip: refinement exhausted");
}

VectorValue extend_edge(const APFunction& f, bool lower_edge, Complex z,
                        const QuadraturePlan& quad) {
    if (std::holds_alternative<TrigPolynomial>(f))
        return extend_polynomial(std::get<TrigPolynomial>(f), lower_edge, z);
    return extend_oracle(std::get<EvaluationOracle>(f), lower_edge, z, quad);
}

} // namespace

VectorValue poisson_extend_strip(const BoundaryPair& bp, Complex z, const QuadraturePlan& quad) {
    double y = z.imag();
    if (y <= 0.0 || y >= kPi)
        throw OutOfDomain("poisson_extend_strip: z must be interior to the strip");
    bp.dim();
    VectorValue v = extend_edge(bp.f1, true, z, quad);
    v += extend_edge(bp.f2, false, z, quad);
    return v;
}

VectorValue StripHarmonic::operator()(Complex z) const {
    double y = z.imag();
    if (y <= 1e-15) return boundary(+1, z.real());
    if (y >= kPi - 1e-15) return boundary(-1, z.real());
    return poisson_extend_strip(data, z, quad);
}

VectorValue StripHarmonic::boundary(int k, double t) const {
    const APFunction& f = (k == +1) ? data.f1 : data.f2;
    if (std::holds_alternative<TrigPolynomial>(f))
        return evaluate(std::get<TrigPolynomial>(f), t);
    return std::get<EvaluationOracle>(f).eval(t);
}

} // namespace apx
