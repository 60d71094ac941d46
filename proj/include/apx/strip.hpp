#pragma once

#include <variant>

#include "apx/ap_core.hpp"

namespace apx {

/// Closed strip 0 <= Im z <= pi.
inline constexpr double kStripHeight = 3.14159265358979323846;

/// Exponential sum z -> sum_l b_l e^{i lambda_l z}, bounded on the strip.
/// Shares the TrigPolynomial term layout; evaluation takes complex z.
using StripExpSum = TrigPolynomial;

/// Boundary data on the two strip edges: f1 on R (Im z = 0), f2 on R + i pi,
/// both parametrized by the real coordinate.
struct BoundaryPair {
    APFunction f1;
    APFunction f2;

    int dim() const;
};

/// Truncation and refinement control for boundary-kernel quadrature.
struct QuadraturePlan {
    double step = 0.01;
    double t_trunc = 40.0;
    double tol = 1e-8;
    int max_refinements = 8;
};

VectorValue eval_strip(const StripExpSum& p, Complex z);

struct StripSupNorm {
    double grid_max = 0.0;   // max over grids on both boundary lines
    double coeff_bound = 0.0; // sum ||b_l|| max(1, e^{-lambda pi})
};
StripSupNorm strip_sup_norm(const StripExpSum& p, double t0, double t1, double step);

/// Bounded harmonic extension of the boundary pair, evaluated at interior z.
/// Polynomial data uses the separated closed form
///   e^{i lambda t} on R        ->  e^{i lambda x} sinh(lambda (pi - y)) / sinh(lambda pi)
///   e^{i lambda t} on R + i pi ->  e^{i lambda x} sinh(lambda y) / sinh(lambda pi)
/// (lambda = 0: linear interpolation). Oracle data is convolved with the
/// strip harmonic-measure densities
///   (1/2pi) sin y / (cosh(x - t) - cos y)   and   (1/2pi) sin y / (cosh(x - t) + cos y).
VectorValue poisson_extend_strip(const BoundaryPair& bp, Complex z,
                                 const QuadraturePlan& quad = {});

/// Harmonic extension as a reusable object (closed form for polynomial data).
struct StripHarmonic {
    BoundaryPair data;
    QuadraturePlan quad;
    VectorValue operator()(Complex z) const;
    /// Boundary trace on edge k (+1 -> Im z = 0, -1 -> Im z = pi).
    VectorValue boundary(int k, double t) const;
};

} // namespace apx
