#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "apx/disk_geometry.hpp"
#include "apx/strip.hpp"

namespace apx {

/// Finite set of boundary angles, kept sorted and distinct.
struct SingularSet {
    std::vector<double> angles;

    void canonicalize();
    bool contains(double theta, double tol = 1e-12) const;
};

/// Boundary behaviour near one singular point: along the two approaching
/// arcs, f(e^{i(t0 + k s e^t)}) is described by the profile h_k(t), t < 0.
struct APProfile {
    double z0_angle = 0.0;
    APFunction h_minus;  // k = -1 arc (clockwise side)
    APFunction h_plus;   // k = +1 arc (counterclockwise side)
    double scale = 1.0;  // s in (0, pi)

    VectorValue eval(int k, double t) const;
    int dim() const;
};

using BoundaryEvaluator = std::function<VectorValue(double)>;  // angle -> value

/// Boundary function assembled from a continuous background and log-scale
/// almost periodic profiles near each singular point. Within the blend radius
/// the value interpolates between profile and background with a C^2 ramp
/// that equals the profile in the limit at the singular point.
struct SAPFunction {
    SingularSet singular;
    std::vector<APProfile> profiles;  // one per singular point, same order
    BoundaryEvaluator background;
    std::vector<double> blend;        // blend radius per singular point
    int dim = 1;
    double bound = 0.0;               // measured sup bound

    VectorValue eval(double theta) const;
};

SAPFunction build_sap(SingularSet singular, std::vector<APProfile> profiles,
                      BoundaryEvaluator background, std::vector<double> blend, int dim);

VectorValue eval_boundary(const SAPFunction& f, double theta);

struct VerifyReport {
    bool pass = false;
    double s_epsilon = 0.0;   // largest trial arc length that passed
    double sup_error = 0.0;   // measured sup at s_epsilon (or best trial if failing)
    double best_sup = 0.0;    // smallest sup over all trials
    int trials = 0;
};

/// Checks the defining arc-wise approximation property against candidate
/// profiles via the trial schedule s_n = s 2^{-n}, n <= 20.
VerifyReport verify_sap(const SAPFunction& f, double z0_angle, double eps,
                        const APProfile& candidate);

/// Transports boundary data near z0 to the two strip edges through the
/// Moebius/Log chart (counterclockwise arc -> R, clockwise arc -> R + i pi).
BoundaryPair strip_pullback(const SAPFunction& f, double z0_angle, double s);

struct LocalApproximant {
    StripHarmonic H;
    double s_epsilon = 0.0;
    double sup_error = 0.0;       // measured over both arcs at s_epsilon
    double smoothing_bound = 0.0; // certified Bochner-Fejer damping bound
    bool pass = false;
    int trials = 0;
};

/// Harmonic strip approximant of the pullback profiles near z0: profiles are
/// shifted to chart coordinates, smoothed by the product Fejer operator with
/// certified budget eps/4, then extended harmonically. The arc radius s_eps
/// is found by the same trial schedule as verify_sap.
LocalApproximant local_approximant(const SAPFunction& f, double z0_angle, double eps);

/// Disk Poisson integral (1/2pi) int P_r(theta - t) f(e^{it}) dt of bounded
/// boundary data, refined until successive grids differ by less than tol.
VectorValue poisson_disk(const BoundaryEvaluator& f, int dim, Complex z,
                         double tol = 1e-9, int max_refinements = 8,
                         const std::vector<double>& breakpoints = {});
VectorValue poisson_disk(const SAPFunction& f, Complex z, double tol = 1e-9);

/// C^2 ramp: 1 on u <= 0 decreasing to 0 at u >= 1 (quintic smoothstep).
double smooth_ramp(double u);

/// Exact log-scale profile of a generator near one of its two jump points
/// (at_angle must be spec.x_angle or spec.y_angle): a single exponential
///   h_k(t) = a_k e^{i mu t},  mu = -lambda/pi at x, +lambda/pi at y,
/// with the modulus jump e^{lambda} carried by the arm on the jump side.
APProfile generator_profile(const GeneratorSpec& spec, double at_angle, double scale);

} // namespace apx
