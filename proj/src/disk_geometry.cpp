#include "apx/disk_geometry.hpp"

#include <cmath>

#include "apx/errors.hpp"

namespace apx {

namespace {

constexpr double kPi = kStripHeight;
constexpr double kBoundaryBand = 1e-9;  // |z| above 1 - this is treated as boundary

double wrap_2pi(double a) {
    double w = std::fmod(a, 2.0 * kPi);
    if (w < 0.0) w += 2.0 * kPi;
    return w;
}

} // namespace

Complex MobiusChart::apply(Complex z) const {
    Complex den = z0 + z;
    if (std::abs(den) < 1e-14)
        throw PoleAt("mobius: evaluation at the pole -z0");
    return Complex(0.0, 2.0) * (z0 - z) / den;
}

Complex MobiusChart::inverse(Complex w) const {
    Complex den = Complex(0.0, 2.0) + w;
    if (std::abs(den) < 1e-14) throw PoleAt("mobius inverse: w = -2i");
    return z0 * (Complex(0.0, 2.0) - w) / den;
}

Complex mobius(const MobiusChart& chart, Complex z) { return chart.apply(z); }

Complex principal_log(Complex w) {
    if (w == Complex(0.0, 0.0)) throw LogOfZero("principal_log: w = 0");
    return std::log(w);  // Arg in (-pi, pi]
}

TwoPointChart TwoPointChart::between(double x_angle, double y_angle) {
    TwoPointChart c;
    c.x_angle = x_angle;
    c.y_angle = y_angle;
    c.x = std::polar(1.0, x_angle);
    c.y = std::polar(1.0, y_angle);
    double span = wrap_2pi(y_angle - x_angle);
    if (span == 0.0) throw OutOfDomain("TwoPointChart: coincident endpoints");
    Complex m = std::polar(1.0, x_angle + 0.5 * span);
    c.scale = (m - c.y) / (m - c.x);
    return c;
}

Complex TwoPointChart::apply(Complex z) const {
    Complex den = z - y;
    if (std::abs(den) < 1e-14) throw PoleAt("mobius_two_point: evaluation at y");
    return scale * (z - x) / den;
}

Complex mobius_two_point(double x_angle, double y_angle, Complex z) {
    return TwoPointChart::between(x_angle, y_angle).apply(z);
}

bool on_ccw_arc(double theta, double a, double b) {
    double span = wrap_2pi(b - a);
    double off = wrap_2pi(theta - a);
    return off > 0.0 && off < span;
}

Complex sap_generator(const GeneratorSpec& spec, Complex z) {
    TwoPointChart chart = TwoPointChart::between(spec.x_angle, spec.y_angle);
    Complex il_pi(0.0, spec.lambda / kPi);
    if (std::abs(z) < 1.0 - kBoundaryBand) {
        Complex w = chart.apply(z);  // open upper half-plane
        return std::exp(-il_pi * principal_log(w) + spec.lambda * spec.C);
    }
    // Boundary: phi is real there; the branch is the limit from the upper
    // half-plane, so Arg = 0 on positive values (the arc [x, y] through the
    // mapped midpoint) and pi on negative ones.
    double theta = std::arg(z);
    double ax = wrap_2pi(theta - spec.x_angle);
    double ay = wrap_2pi(theta - spec.y_angle);
    if (ax < 1e-12 || 2.0 * kPi - ax < 1e-12)
        throw LogOfZero("sap_generator: evaluation at the point x");
    if (ay < 1e-12 || 2.0 * kPi - ay < 1e-12)
        throw PoleAt("sap_generator: evaluation at the point y");
    Complex zb = std::polar(1.0, theta);
    double mod = std::abs(chart.scale) * std::abs(zb - chart.x) / std::abs(zb - chart.y);
    double arg = on_ccw_arc(theta, spec.x_angle, spec.y_angle) ? 0.0 : kPi;
    Complex logphi(std::log(mod), arg);
    return std::exp(-il_pi * logphi + spec.lambda * spec.C);
}

LogChart LogChart::at_angle(double t0) {
    LogChart c;
    c.t0 = t0;
    c.phi.z0 = std::polar(1.0, t0);
    return c;
}

Complex LogChart::to_strip(Complex z) const {
    if (std::abs(z) < 1.0 - kBoundaryBand)
        return principal_log(phi.apply(z));
    double dt = std::arg(z) - t0;
    dt = std::remainder(dt, 2.0 * kPi);  // in (-pi, pi]
    if (std::abs(dt) < 1e-15) throw LogOfZero("LogChart: evaluation at z0");
    if (std::abs(std::abs(dt) - kPi) < 1e-15) throw PoleAt("LogChart: evaluation at -z0");
    // boundary image of phi_{z0} is 2 tan(dt/2)
    double t = std::log(2.0 * std::tan(0.5 * std::abs(dt)));
    return Complex(t, dt > 0.0 ? 0.0 : kPi);
}

Complex LogChart::from_strip(Complex w) const {
    return phi.inverse(std::exp(w));
}

VectorValue StripChartFunction::operator()(Complex z) const {
    return eval_strip(F, chart.to_strip(z));
}

} // namespace apx
