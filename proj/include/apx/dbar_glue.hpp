#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "apx/cauchy.hpp"
#include "apx/sap_circle.hpp"

namespace apx {

/// Intersection of an open disk centered at a boundary point with the closed
/// unit disk minus the point itself.
struct CircularNeighbourhood {
    double center_angle = 0.0;
    double radius = 1.0;  // euclidean radius, <= 1

    bool contains(Complex z) const;
};

/// Polynomial in z with vector coefficients (a disk-algebra element).
struct DiskPoly {
    std::vector<VectorValue> coeffs;
    VectorValue eval(Complex z) const;
    bool empty() const { return coeffs.empty(); }
};

/// One chart of the boundary cover: a neighbourhood, the quality span on
/// which the local approximant stays eps-close to the input, and the
/// approximant itself.
struct LocalChart {
    std::string kind;            // "singular" | "flank" | "constant" | "global"
    double center_angle = 0.0;   // the chart point z_k
    double span_left = 0.0;      // quality span [left, right] around the circle
    double span_right = 0.0;     // (unwrapped angles, left < right)
    CircularNeighbourhood nbhd;
    FieldEvaluator f;
    double measured_sup = 0.0;   // probe sup of ||input - f|| over the span
    // certificate payload for singular charts: sum_l b_l e^{i mu_l w} through
    // the Log chart at center_angle, optionally times (z + z0)/(2 z0)
    std::vector<std::pair<VectorValue, double>> exp_terms;
    bool corrected = false;
};

/// Partition of unity subordinate to a circular cover: complementary C^2
/// ramps in disjoint crossover windows, so the bumps sum to 1 exactly.
class PartitionOfUnity {
public:
    /// crossover[i] separates chart i from chart i+1 (cyclically);
    /// transition[i] is the half-width of the ramp window at crossover[i].
    PartitionOfUnity(std::vector<double> centers, std::vector<double> crossovers,
                     std::vector<double> transitions);

    int size() const { return static_cast<int>(centers_.size()); }
    double rho(int k, double theta) const;
    double drho(int k, double theta) const;  // d/dtheta
    Complex dbar_rho(int k, Complex z) const;
    double center(int k) const { return centers_[static_cast<size_t>(k)]; }
    double crossover(int k) const { return crossovers_[static_cast<size_t>(k)]; }
    double transition(int k) const { return transitions_[static_cast<size_t>(k)]; }
    double min_transition() const;

    /// Charts with nonzero bump at theta (at most two), with values and
    /// theta-derivatives.
    struct Active {
        int k;
        double rho;
        double drho;
    };
    std::vector<Active> active(double theta) const;

private:
    std::vector<double> centers_, crossovers_, transitions_;
    std::vector<std::pair<double, int>> order_;  // wrapped crossovers, sorted
};

struct CocyclePair {
    int k = 0, j = 0;
    GridField field;       // c_kj = f_k - f_j on the chart overlap within A
    double sup = 0.0;
    double residual = -1.0;  // holomorphy defect, -1 if the patch was too small
};

struct Cocycle {
    std::vector<CocyclePair> pairs;
    double sup = 0.0;  // max over pairs
    double max_residual = 0.0;
};

/// Antisymmetric 1-cocycle c_kj = f_k - f_j on chart overlaps intersected
/// with the annulus {r_lo <= |z| <= 1}; holomorphy of each piece is verified
/// by finite differences.
Cocycle build_cocycle(const std::vector<LocalChart>& charts, double r_lo,
                      int n_theta, int rows, double residual_cap = 0.05);

struct Resolution {
    std::vector<GridField> tilde_f;     // one field per chart, on its support
    GridField h;                        // global dbar data on the annulus
    FieldEvaluator h_eval;              // analytic form -sum_l dbar(rho_l) f_l
    double chart_identity_defect = 0.0; // max |(tilde_k - tilde_j) - c_kj|
    double h_chart_defect = 0.0;        // finite-difference cross-chart defect
    double h_sup = 0.0;
};

/// Splits the cocycle as c_kj = tilde_f_k - tilde_f_j with
/// tilde_f_j = sum_l rho_l (f_j - f_l); the dbar data
/// h = -sum_l dbar(rho_l) f_l is chart-independent.
Resolution resolve_cocycle(const std::vector<LocalChart>& charts,
                           const PartitionOfUnity& pou, const Cocycle& cocycle,
                           double r_lo, int n_theta, int rows);

/// Pointwise plus whole-ring access to a field (the dbar potentials are
/// cheapest per full ring of the polar grid).
struct RingField {
    std::function<VectorValue(Complex)> at;
    std::function<void(double, double, std::vector<Complex>&)> ring;  // (r, theta0, out)
    int n_theta = 0;
    int dim = 1;
};
RingField make_ring_field(const AnnularCauchy& ac);
RingField make_ring_field(FieldEvaluator f, int n_theta, int dim);

struct FirstGlue {
    std::vector<GridField> c_i;       // holomorphic per-chart corrections
    GridField f_eps;                  // glued field on the annulus
    FieldEvaluator f_eps_eval;
    double c_sup = 0.0;               // max ||c_i||
    double c_residual = 0.0;
    double chart_mismatch = 0.0;      // disagreement of f_i - c_i across charts
    double H_sup = 0.0;
};

/// c_i = tilde_f_i - H and f_eps = f_i - c_i, single-valued on the annulus
/// (GlueMismatch if the per-chart formulas disagree). The grid holomorphy
/// defect of each c_i is reported; the dbar solve itself is certified by the
/// direct defect measurement in the pipeline.
FirstGlue first_glue(const std::vector<LocalChart>& charts,
                     const PartitionOfUnity& pou, const RingField& H,
                     double r_lo, int n_theta, int rows);

/// Radial C^2 partition subordinate to the two-chart cover {A', D'}:
/// rho_Dp = 1 on the core, ramps to 0 across the band (1-w, 1-w/2).
struct RadialPartition {
    double width = 0.0;              // w(A)
    double rho_Dp(double r) const;
    double drho_Dp(double r) const;  // d/dr
    double rho_Ap(double r) const { return 1.0 - rho_Dp(r); }
    Complex dbar_rho_Dp(Complex z) const;
    double max_gradient() const;     // 2 * 1.875 / w, attained mid-band
    double gradient_constant() const;  // max gradient * band width (C_rho)
};

RadialPartition radial_partition(double width);

struct CertificateBlock {
    double z0_angle = 0.0;
    std::vector<std::pair<VectorValue, double>> exp_terms;  // (b, mu)
    bool corrected = true;
};

struct Certificate {
    std::vector<CertificateBlock> blocks;
    std::vector<GeneratorSpec> recovered;   // paired into explicit generators
    bool disk_algebra_part = false;
    double remainder_sup = 0.0;             // sup ||F_eps - blocks - poly|| on the annulus
};

struct ApproximationReport {
    double eps = 0.0;
    double width = 0.0;
    int charts = 0;
    std::map<std::string, double> stage_errors;
    double C = 0.0;        // sup||H|| / (w sup||h||)
    double C_prime = 0.0;  // sup||G|| / eps
    double C_bar = 0.0;    // max(sup||c_A'||, sup||c_D'||) / eps
    double C_hat = 0.0;    // sup||f - F_eps|| / eps
    double dbar_residual = 0.0;   // worst residual / (10 h) over check patches
    double sup_error = 0.0;       // sup||f - F_eps||
    Certificate certificate;
};

struct GlueConfig {
    double initial_width = 0.02;
    double min_width = 1e-5;
    double h_budget_frac = 0.5;  // require sup||H|| <= frac * eps
    int n_theta = 16384;
    int annulus_rows = 9;
    int radial_cells = 32;
    int core_rings = 24;
    double probe_depth = 0.02;
    double residual_cap = 0.05;
    double solve_tol = 0.02;     // relative dbar-solve defect gate
    double glue_tol = 1e-6;
    int n_theta_cap = 65536;
    int max_width_shrinks = 12;
    double eps_budget_local = 0.9;  // fraction of eps the local probes may use
};

/// Input to the end-to-end approximation: holomorphic interior data with
/// semi-almost periodic boundary values and polynomial profiles at finitely
/// many singular points. The optional polynomial part is carried through the
/// charts exactly.
struct PipelineInput {
    FieldEvaluator interior;
    BoundaryEvaluator boundary;
    SingularSet singular;
    std::vector<APProfile> profiles;
    DiskPoly poly;
    int dim = 1;
    double bound = 1.0;
};

PipelineInput make_generator_input(const GeneratorSpec& spec, double scale = 1.0);
PipelineInput make_poly_input(DiskPoly poly);
/// Generator plus polynomial part (profiles pick up the constant term).
PipelineInput make_generator_plus_poly_input(const GeneratorSpec& spec, DiskPoly poly,
                                             double scale = 1.0);

struct PipelineResult {
    ApproximationReport report;
    FieldEvaluator F_eps;               // glued approximant on the open disk
    std::map<std::string, GridField> fields;
    std::shared_ptr<const void> state;  // keeps the evaluator's machinery alive
};

struct SecondGlue {
    double c_sup = 0.0;          // sup||f - f_eps|| on the overlap band
    double G_sup = 0.0;
    double G_solve_defect = 0.0; // finite-difference dbar G against g
    double agreement = 0.0;      // two defining formulas on D' cap A
    double cA_sup = 0.0, cD_sup = 0.0;
    double sup_error = 0.0;      // sup||f - F_eps|| over the disk grids
};

struct SecondGlueResult {
    SecondGlue report;
    FieldEvaluator F_eps;   // glued approximant on the open disk
    GridField F_band;       // F_eps sampled on the overlap band
    std::shared_ptr<const void> state;
};

/// Two-chart gluing over {A', D'}: c = f - f_eps on the band of width w/2,
/// g = -dbar(rho_D') c, G its area-integral potential, and
/// F_eps = f - c_D' on D' and f_eps - c_A' on A. The two formulas are
/// compared on the band (GlueMismatch above cfg.glue_tol) and every constant
/// is measured.
SecondGlueResult second_glue(const FieldEvaluator& f, const RingField& f_eps, int dim,
                             double width, int n_theta, int rows,
                             const GlueConfig& cfg = {});

/// End-to-end run: local approximants -> cover -> cocycle -> resolution ->
/// area-integral dbar solve -> two-chart gluing, with every constant measured.
PipelineResult approximate(const PipelineInput& input, double eps,
                           const GlueConfig& cfg = {});

} // namespace apx
