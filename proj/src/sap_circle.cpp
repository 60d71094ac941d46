#include "apx/sap_circle.hpp"

#include <algorithm>
#include <cmath>

#include "apx/bochner_fejer.hpp"
#include "apx/errors.hpp"

namespace apx {

namespace {

constexpr double kPi = kStripHeight;
constexpr double kTwoPi = 2.0 * kPi;

double wrap_pi(double a) {  // into (-pi, pi]
    double w = std::remainder(a, kTwoPi);
    return w == -kPi ? kPi : w;
}

VectorValue eval_ap(const APFunction& f, double t) {
    if (std::holds_alternative<TrigPolynomial>(f))
        return evaluate(std::get<TrigPolynomial>(f), t);
    return std::get<EvaluationOracle>(f).eval(t);
}

int ap_dim(const APFunction& f) {
    if (std::holds_alternative<TrigPolynomial>(f))
        return std::get<TrigPolynomial>(f).dim;
    return std::get<EvaluationOracle>(f).dim;
}

} // namespace

double smooth_ramp(double u) {
    if (u <= 0.0) return 1.0;
    if (u >= 1.0) return 0.0;
    double s = u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
    return 1.0 - s;
}

void SingularSet::canonicalize() {
    for (auto& a : angles) a = wrap_pi(a);
    std::sort(angles.begin(), angles.end());
    for (size_t i = 1; i < angles.size(); ++i)
        if (angles[i] - angles[i - 1] < 1e-12)
            throw OutOfDomain("SingularSet: duplicate points");
}

bool SingularSet::contains(double theta, double tol) const {
    for (double a : angles)
        if (std::abs(wrap_pi(theta - a)) < tol) return true;
    return false;
}

VectorValue APProfile::eval(int k, double t) const {
    return eval_ap(k > 0 ? h_plus : h_minus, t);
}

int APProfile::dim() const {
    int d = ap_dim(h_plus);
    if (d != ap_dim(h_minus)) throw ProfileMismatch("APProfile: arm dimensions differ");
    return d;
}

SAPFunction build_sap(SingularSet singular, std::vector<APProfile> profiles,
                      BoundaryEvaluator background, std::vector<double> blend, int dim) {
    singular.canonicalize();
    if (profiles.size() != singular.angles.size() || blend.size() != singular.angles.size())
        throw ProfileMismatch("build_sap: one profile and blend radius per singular point");
    std::sort(profiles.begin(), profiles.end(),
              [](const APProfile& a, const APProfile& b) {
                  return wrap_pi(a.z0_angle) < wrap_pi(b.z0_angle);
              });
    for (size_t i = 0; i < profiles.size(); ++i) {
        if (std::abs(wrap_pi(profiles[i].z0_angle) - singular.angles[i]) > 1e-12)
            throw ProfileMismatch("build_sap: profile base points must equal singular points");
        if (profiles[i].dim() != dim)
            throw ProfileMismatch("build_sap: profile dimension");
        if (!(profiles[i].scale > 0.0 && profiles[i].scale < kPi))
            throw OutOfDomain("build_sap: profile scale outside (0, pi)");
        if (!(blend[i] > 0.0)) throw OutOfDomain("build_sap: blend radius must be positive");
    }
    // blend regions must be pairwise disjoint on the circle
    size_t n = singular.angles.size();
    if (n > 1)
        for (size_t i = 0; i < n; ++i) {
            size_t j = (i + 1) % n;
            double gap = singular.angles[j] - singular.angles[i];
            if (gap <= 0.0) gap += kTwoPi;
            if (blend[i] + blend[j] >= gap)
                throw OverlappingBlends("build_sap: blend regions overlap");
        }

    SAPFunction f;
    f.singular = std::move(singular);
    f.profiles = std::move(profiles);
    f.background = std::move(background);
    f.blend = std::move(blend);
    f.dim = dim;

    double m = 0.0;
    for (int j = 0; j < 4096; ++j) {
        double theta = (j + 0.5) * kTwoPi / 4096.0;
        m = std::max(m, f.eval(theta).norm());
    }
    f.bound = 1.5 * m;
    return f;
}

VectorValue SAPFunction::eval(double theta) const {
    for (size_t i = 0; i < singular.angles.size(); ++i) {
        double delta = wrap_pi(theta - singular.angles[i]);
        double sigma = std::abs(delta);
        if (sigma < 1e-12)
            throw AtSingularPoint("SAPFunction: evaluation at a singular point");
        if (sigma >= blend[i]) continue;
        int k = delta > 0.0 ? +1 : -1;
        const APProfile& prof = profiles[i];
        VectorValue p = prof.eval(k, std::log(sigma / prof.scale));
        double w = smooth_ramp(sigma / blend[i]);
        VectorValue bg = background(theta);
        return Complex(w) * p + Complex(1.0 - w) * bg;
    }
    return background(theta);
}

VectorValue eval_boundary(const SAPFunction& f, double theta) { return f.eval(theta); }

namespace {

// Sup over a log-scale grid on arc k of ||f - candidate pullback||, the arc
// restricted to angular offsets sigma < s_arc.
double arc_sup(const SAPFunction& f, double t0, const APProfile& cand, int k,
               double s_arc, double span = 30.0, double step = 0.05) {
    double t_hi = std::log(s_arc / cand.scale);
    double sup = 0.0;
    for (double t = t_hi; t >= t_hi - span; t -= step) {
        double sigma = cand.scale * std::exp(t);
        if (sigma < 1e-11) break;  // stay off the singular-point guard
        VectorValue fv = f.eval(t0 + k * sigma);
        VectorValue cv = cand.eval(k, t);
        sup = std::max(sup, (fv - cv).norm());
    }
    return sup;
}

} // namespace

VerifyReport verify_sap(const SAPFunction& f, double z0_angle, double eps,
                        const APProfile& candidate) {
    if (eps <= 0.0) throw OutOfDomain("verify_sap: eps must be positive");
    VerifyReport rep;
    rep.best_sup = 1e300;
    double s = candidate.scale;
    for (int n = 0; n <= 20; ++n) {
        double s_n = s * std::pow(2.0, -n);
        double sup = std::max(arc_sup(f, z0_angle, candidate, +1, s_n),
                              arc_sup(f, z0_angle, candidate, -1, s_n));
        ++rep.trials;
        rep.best_sup = std::min(rep.best_sup, sup);
        if (sup < eps) {
            rep.pass = true;
            rep.s_epsilon = s_n;
            rep.sup_error = sup;
            return rep;
        }
    }
    rep.sup_error = rep.best_sup;
    return rep;
}

BoundaryPair strip_pullback(const SAPFunction& f, double z0_angle, double s) {
    if (!(s > 0.0 && s < kPi)) throw OutOfDomain("strip_pullback: s outside (0, pi)");
    auto arm = [&f, z0_angle](int k) {
        return EvaluationOracle{
            [&f, z0_angle, k](double t) {
                double sigma = LogChart::t_to_sigma(t);
                return f.eval(z0_angle + k * sigma);
            },
            f.bound, f.dim};
    };
    return BoundaryPair{arm(+1), arm(-1)};
}

LocalApproximant local_approximant(const SAPFunction& f, double z0_angle, double eps) {
    if (eps <= 0.0) throw OutOfDomain("local_approximant: eps must be positive");
    LocalApproximant out;

    TrigPolynomial q_plus, q_minus;
    double s = 1.0;
    bool have_profile = false;
    for (const auto& prof : f.profiles) {
        if (std::abs(wrap_pi(prof.z0_angle - z0_angle)) > 1e-12) continue;
        if (!std::holds_alternative<TrigPolynomial>(prof.h_plus) ||
            !std::holds_alternative<TrigPolynomial>(prof.h_minus))
            throw ProfileMismatch("local_approximant: polynomial profiles required");
        s = prof.scale;
        // chart coordinate is t_profile + ln s up to o(1) at the point
        q_plus = shift(std::get<TrigPolynomial>(prof.h_plus), -std::log(s));
        q_minus = shift(std::get<TrigPolynomial>(prof.h_minus), -std::log(s));
        have_profile = true;
        break;
    }
    if (!have_profile) {
        // continuous point: constant candidate, the one-sided limit
        VectorValue c = f.eval(z0_angle + 1e-7);
        BasisSet b{{1.0}, {}};
        q_plus = TrigPolynomial(b, f.dim);
        q_plus.add_term(c, Frequency::zero(1));
        q_minus = q_plus;
    }

    if (!q_plus.basis.same_as(q_minus.basis))
        throw ProfileMismatch("local_approximant: profile arms share no basis");
    auto chosen = choose_kernel_for_net({q_plus, q_minus}, eps / 4.0);
    out.smoothing_bound = chosen.certified_bound;
    TrigPolynomial tq_plus = apply_operator(chosen.spec, q_plus).result;
    TrigPolynomial tq_minus = apply_operator(chosen.spec, q_minus).result;
    out.H = StripHarmonic{BoundaryPair{tq_plus, tq_minus}, {}};

    auto arc_sup_chart = [&](double s_arc) {
        double sup = 0.0;
        for (int k : {+1, -1}) {
            const TrigPolynomial& edge = (k > 0) ? tq_plus : tq_minus;
            double t_hi = LogChart::sigma_to_t(s_arc);
            for (double t = t_hi; t >= t_hi - 30.0; t -= 0.05) {
                double sigma = LogChart::t_to_sigma(t);
                if (sigma < 1e-11) break;
                VectorValue fv = f.eval(z0_angle + k * sigma);
                VectorValue hv = evaluate(edge, t);
                sup = std::max(sup, (fv - hv).norm());
            }
        }
        return sup;
    };

    double s_top = std::min(s, kPi / 2.0);
    double best = 1e300;
    for (int n = 0; n <= 20; ++n) {
        double s_n = s_top * std::pow(2.0, -n);
        double sup = arc_sup_chart(s_n);
        ++out.trials;
        best = std::min(best, sup);
        if (sup < eps) {
            out.pass = true;
            out.s_epsilon = s_n;
            out.sup_error = sup;
            return out;
        }
    }
    out.sup_error = best;
    return out;
}

namespace {

constexpr double kGl8Node[4] = {0.18343464249564980, 0.52553240991632899,
                                0.79666647741362674, 0.96028985649753623};
constexpr double kGl8Weight[4] = {0.36268378337836198, 0.31370664587788729,
                                  0.22238103445337447, 0.10122853629037626};

// Integrates f(e^{it}) against the disk Poisson kernel over (a, b) with
// logarithmic grading toward both ends (data may jump or oscillate in log
// scale there) and Gauss-Legendre panels of the given width in log scale.
void poisson_arc(const BoundaryEvaluator& f, double r, double theta, double a,
                 double b, double panel, VectorValue& acc) {
    double len = b - a;
    if (len <= 1e-11) return;
    auto kernel = [&](double t) {
        return (1.0 - r * r) / (1.0 - 2.0 * r * std::cos(theta - t) + r * r);
    };
    for (int side = 0; side < 2; ++side) {
        // t = end + dir * e^u, u from ln(len/2) downward
        double end = side == 0 ? a : b;
        double dir = side == 0 ? 1.0 : -1.0;
        double u_hi = std::log(0.5 * len);
        int panels = static_cast<int>(std::ceil(26.0 / panel));
        for (int p = 0; p < panels; ++p) {
            double pa = u_hi - (p + 1) * panel, pb = u_hi - p * panel;
            double c = 0.5 * (pa + pb), h = 0.5 * (pb - pa);
            for (int q = 0; q < 4; ++q) {
                for (double sgn : {-1.0, 1.0}) {
                    double u = c + sgn * h * kGl8Node[q];
                    double du = std::exp(u);
                    double t = end + dir * du;
                    double w = h * kGl8Weight[q] * du * kernel(t) / kTwoPi;
                    acc += Complex(w) * f(t);
                }
            }
        }
    }
}

} // namespace

VectorValue poisson_disk(const BoundaryEvaluator& f, int dim, Complex z, double tol,
                         int max_refinements, const std::vector<double>& breakpoints) {
    double r = std::abs(z);
    if (r >= 1.0) throw OutOfDomain("poisson_disk: |z| must be < 1");
    double theta = std::arg(z);

    // smooth pieces split at the data breakpoints and at the kernel peak
    std::vector<double> cuts;
    for (double b : breakpoints) {
        double c = std::remainder(b - theta, kTwoPi);
        cuts.push_back(c < 0.0 ? c + kTwoPi : c);
    }
    cuts.push_back(0.0);
    cuts.push_back(kTwoPi);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [](double x, double y) { return std::abs(x - y) < 1e-12; }),
               cuts.end());

    auto integrate = [&](double panel) {
        VectorValue acc(dim);
        for (size_t i = 0; i + 1 < cuts.size(); ++i)
            poisson_arc(f, r, theta, theta + cuts[i], theta + cuts[i + 1], panel, acc);
        return acc;
    };

    double panel = 0.5;
    VectorValue est = integrate(panel);
    for (int k = 0; k < max_refinements; ++k) {
        panel *= 0.5;
        VectorValue next = integrate(panel);
        double diff = (next - est).norm();
        est = next;
        if (diff <= 0.5 * tol) return est;
    }
    throw NonConverged("poisson_disk: refinement exhausted");
}

APProfile generator_profile(const GeneratorSpec& spec, double at_angle, double scale) {
    if (!(scale > 0.0 && scale < kPi))
        throw OutOfDomain("generator_profile: scale outside (0, pi)");
    bool at_x = std::abs(wrap_pi(at_angle - spec.x_angle)) < 1e-12;
    bool at_y = std::abs(wrap_pi(at_angle - spec.y_angle)) < 1e-12;
    if (!at_x && !at_y)
        throw OutOfDomain("generator_profile: point is not a jump point of the generator");

    APProfile prof;
    prof.z0_angle = at_angle;
    prof.scale = scale;
    Complex base = std::exp(spec.lambda * spec.C);
    double jump = std::exp(spec.lambda);

    if (spec.lambda == 0.0) {
        BasisSet b{{1.0}, {}};
        TrigPolynomial c(b, 1);
        c.add_term(VectorValue::scalar(base), Frequency::zero(1));
        prof.h_plus = c;
        prof.h_minus = c;
        return prof;
    }

    TwoPointChart chart = TwoPointChart::between(spec.x_angle, spec.y_angle);
    BasisSet b{{spec.lambda / kPi}, {}};
    Complex il(0.0, spec.lambda / kPi);

    auto arm = [&](Complex coeff, int freq_sign) {
        TrigPolynomial p(b, 1);
        p.add_term(VectorValue::scalar(coeff),
                   freq_sign > 0 ? Frequency::unit(1, 0) : -Frequency::unit(1, 0));
        return p;
    };

    if (at_x) {
        // |phi| ~ sigma * kappa near x; ccw arm lies on the arc [x, y] (Arg 0)
        double kappa = std::abs(chart.scale) / std::abs(chart.x - chart.y);
        Complex a = base * std::exp(-il * std::log(scale * kappa));
        prof.h_plus = arm(a, -1);
        prof.h_minus = arm(jump * a, -1);
    } else {
        // |phi| ~ kappa / sigma near y; ccw arm leaves the arc (Arg pi)
        double kappa = std::abs(chart.scale) * std::abs(chart.x - chart.y);
        Complex a = base * std::exp(-il * std::log(kappa / scale));
        prof.h_plus = arm(jump * a, +1);
        prof.h_minus = arm(a, +1);
    }
    return prof;
}

VectorValue poisson_disk(const SAPFunction& f, Complex z, double tol) {
    BoundaryEvaluator ev = [&f](double t) {
        try {
            return f.eval(t);
        } catch (const AtSingularPoint&) {
            return f.eval(t + 1e-9);  // boundary data only matters a.e.
        }
    };
    return poisson_disk(ev, f.dim, z, tol, 8, f.singular.angles);
}

} // namespace apx
