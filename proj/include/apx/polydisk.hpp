#pragma once

#include "apx/dbar_glue.hpp"

namespace apx {

/// One coordinate factor of a tensor-product function on the polydisk:
/// a boundary-jump generator, a polynomial, or semi-almost periodic boundary
/// data extended harmonically into the disk.
struct TensorFactor {
    enum class Kind { generator, poly, sap };
    Kind kind = Kind::poly;
    GeneratorSpec gen;
    DiskPoly poly;
    std::shared_ptr<SAPFunction> sap;

    Complex interior(Complex z) const;
    Complex boundary(double theta) const;
    std::vector<double> singular_angles() const;
    /// 1-D pipeline input (generator and poly factors only).
    PipelineInput pipeline_input() const;
    bool same_as(const TensorFactor& o) const;
};

struct TensorTerm {
    Complex weight{1.0, 0.0};
    std::vector<TensorFactor> factors;  // one per coordinate
};

/// Finite sum of weighted products of per-coordinate factors,
/// F(z_1..z_n) = sum_t w_t prod_k f_{t,k}(z_k).
struct TensorFunction {
    int n = 1;
    std::vector<TensorTerm> terms;

    void validate() const;
};

/// Evaluation at a polydisk point; coordinates with |z_k| >= 1 - 1e-9 are
/// evaluated through the boundary trace.
VectorValue tensor_eval(const TensorFunction& F, const std::vector<Complex>& z);

struct TensorSupNorm {
    double grid_max = 0.0;
    std::optional<double> product_bound;  // single product term only
};

/// Grid max over the distinguished boundary (singular points avoided by the
/// half-offset grid); for a single product term also the product of factor
/// sups as an upper bound.
TensorSupNorm tensor_sup_norm(const TensorFunction& F, int grid_per_dim = 256);

struct TensorApproxReport {
    double eps = 0.0;
    double reported_bound = 0.0;   // telescoped from per-factor runs
    double measured_error = 0.0;   // torus-grid max of ||F - F_approx||
    std::vector<double> factor_errors;
    std::vector<double> factor_sups;
    std::vector<ApproximationReport> factor_reports;  // one per distinct factor
};

struct TensorApproxResult {
    TensorApproxReport report;
    /// evaluator of the approximated tensor on the open polydisk
    std::function<Complex(const std::vector<Complex>&)> F_approx;
    std::shared_ptr<const void> state;
};

/// Factor-wise approximation: each non-polynomial factor runs the 1-D
/// pipeline (identical factors share one run); the total error bound
/// telescopes as sum_k (prod_{j<k} ||u_j||) ||f_k - u_k|| (prod_{j>k} ||f_j||)
/// per term. For n = 1 the result is exactly the 1-D pipeline result.
TensorApproxResult tensor_approximate(const TensorFunction& F, double eps,
                                      const GlueConfig& cfg = {});

} // namespace apx
