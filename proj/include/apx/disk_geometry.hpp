#pragma once

#include <complex>

#include "apx/ap_core.hpp"
#include "apx/strip.hpp"

namespace apx {

/// Open circle arc { e^{i(t0 + k t)} : 0 <= t < s }, k = +1 counterclockwise.
struct CircleArc {
    double t0 = 0.0;
    double s = 1.0;   // in (0, pi)
    int k = +1;       // orientation

    Complex point(double t) const { return std::polar(1.0, t0 + k * t); }
};

/// Conformal chart of the disk onto the upper half-plane,
/// z -> 2i(z0 - z)/(z0 + z), with z0 -> 0 and pole at -z0.
struct MobiusChart {
    Complex z0{1.0, 0.0};

    Complex apply(Complex z) const;
    Complex inverse(Complex w) const;  // z0 (2i - w)/(2i + w)
};

/// ln|w| + i Arg(w) with Arg in (-pi, pi]; maps the closed upper half-plane
/// minus the origin into the strip 0 <= Im <= pi.
Complex principal_log(Complex w);

Complex mobius(const MobiusChart& chart, Complex z);

/// The Moebius map determined by x -> 0, counterclockwise-arc midpoint -> 1,
/// y -> infinity; maps the disk onto the upper half-plane.
struct TwoPointChart {
    Complex x, y;
    Complex scale;        // (m - y)/(m - x)
    double x_angle = 0.0, y_angle = 0.0;

    static TwoPointChart between(double x_angle, double y_angle);
    Complex apply(Complex z) const;
};

Complex mobius_two_point(double x_angle, double y_angle, Complex z);

/// Bounded holomorphic unit of fixed boundary-modulus jump: the boundary
/// modulus is e^{lambda} on the open arc from y to x (counterclockwise) and 1
/// on the complementary arc, with jumps exactly at x and y.
struct GeneratorSpec {
    double lambda = 0.0;
    double x_angle = 0.0;
    double y_angle = kStripHeight;
    Complex C{0.0, 0.0};  // normalization constant in the exponent
};

/// Evaluates exp(-(i lambda / pi) Log phi_{x,y}(z) + lambda C). Points with
/// |z| > 1 - 1e-9 are treated as boundary points and receive their one-sided
/// limit from inside the disk (the branch of Arg fixed by the arc side).
Complex sap_generator(const GeneratorSpec& spec, Complex z);

/// Whether e^{i theta} lies on the open counterclockwise arc from a to b.
bool on_ccw_arc(double theta, double a, double b);

/// Chart z -> Log(phi_{z0}(z)) taking the disk into the strip; boundary
/// points land on the strip edges (counterclockwise side -> Im = 0).
struct LogChart {
    MobiusChart phi;
    double t0 = 0.0;  // angle of z0

    static LogChart at_angle(double t0);
    Complex to_strip(Complex z) const;
    Complex from_strip(Complex w) const;

    /// Arc-length coordinate maps between the angular offset sigma in (0, pi)
    /// and the boundary coordinate t on the strip edge.
    static double sigma_to_t(double sigma) { return std::log(2.0 * std::tan(0.5 * sigma)); }
    static double t_to_sigma(double t) { return 2.0 * std::atan(0.5 * std::exp(t)); }
};

/// Exponential sum transported through a LogChart: z -> F(Log(phi_{z0}(z))).
/// Holomorphic on the open disk, defined on the closed disk minus {z0, -z0}.
struct StripChartFunction {
    StripExpSum F;
    LogChart chart;

    VectorValue operator()(Complex z) const;
};

} // namespace apx
