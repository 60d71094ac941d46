#pragma once

#include <cstdint>
#include <vector>

#include "apx/ap_core.hpp"

namespace apx {

/// Product Fejer kernel specification: grid denominators m_j refine the
/// frequency lattice (nu_j/m_j)*beta_j, Fejer orders N_j set the damping
/// factors (1 - |nu_j|/N_j).
struct KernelSpec {
    BasisSet basis;
    std::vector<std::int64_t> m;
    std::vector<std::int64_t> N;

    std::size_t expanded_term_cap = 1000000;
    void validate() const;
};

struct ApplyReport {
    std::vector<double> damping;   // per input term, the factor applied
    std::vector<bool> off_grid;    // true if the term was zeroed as off-grid
    double certified_bound = 0.0;  // sum ||b_l|| (1 - damping_l), bounds ||f - Tf||
};

struct AppliedOperator {
    TrigPolynomial result;
    ApplyReport report;
};

struct ChosenKernel {
    KernelSpec spec;
    double certified_bound = 0.0;  // certified upper bound on max_f ||f - Tf||
};

/// Expands K(t) = prod_j F_{N_j}(beta_j t / m_j) as a trigonometric
/// polynomial with real coefficients prod_j (1 - |nu_j|/N_j).
TrigPolynomial build_kernel(const KernelSpec& spec);

/// The smoothing operator f -> M_t{ f(. + t) K(t) }: damps on-grid
/// frequencies, zeroes off-grid ones (flagged in the report).
AppliedOperator apply_operator(const KernelSpec& spec, const TrigPolynomial& f);

/// Smallest-order spec (uniformly scaled) whose certified damping bound
/// sum ||b_l||(1 - prod_j(1 - |p_lj|/N_j)) is <= eps for every input.
ChosenKernel choose_kernel_for_net(const std::vector<TrigPolynomial>& fs, double eps);

/// Same certified-bound arithmetic with the strip weight max(1, e^{-lambda pi});
/// bounds ||f - Tf|| in the strip sup norm.
ChosenKernel choose_kernel_for_net_strip(const std::vector<TrigPolynomial>& fs, double eps);

} // namespace apx
