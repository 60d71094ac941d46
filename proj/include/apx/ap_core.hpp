#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "apx/rational.hpp"
#include "apx/vector_value.hpp"

namespace apx {

/// Real frequencies beta_1..beta_r, declared rationally independent by the
/// caller. All frequency bookkeeping is exact linear algebra over this basis.
struct BasisSet {
    std::vector<double> betas;
    std::vector<std::string> labels;

    int size() const { return static_cast<int>(betas.size()); }
    void validate() const;
    bool same_as(const BasisSet& o) const { return betas == o.betas; }
};

/// Exact rational coordinate vector over a BasisSet. The real value is
/// sum_j coords[j] * beta_j; equality is exact coordinate equality.
struct Frequency {
    std::vector<Rational> coords;

    static Frequency zero(int r) { return Frequency{std::vector<Rational>(static_cast<size_t>(r))}; }
    static Frequency unit(int r, int j, Rational c = Rational(1)) {
        Frequency f = zero(r);
        f.coords[static_cast<size_t>(j)] = c;
        return f;
    }

    double value(const BasisSet& basis) const;
    bool is_zero() const {
        for (const auto& c : coords) if (c.num != 0) return false;
        return true;
    }
    friend bool operator==(const Frequency& a, const Frequency& b) { return a.coords == b.coords; }
    friend bool operator<(const Frequency& a, const Frequency& b);
    Frequency operator-() const {
        Frequency f = *this;
        for (auto& c : f.coords) c = -c;
        return f;
    }
    friend Frequency operator+(const Frequency& a, const Frequency& b);
};

/// Finite exponential sum  t -> sum_l b_l e^{i lambda_l t}  with vector
/// coefficients. Canonical form: terms sorted by frequency coordinates,
/// duplicate frequencies merged, exact-zero coefficients dropped.
struct TrigPolynomial {
    struct Term {
        VectorValue coeff;
        Frequency freq;
    };

    BasisSet basis;
    std::vector<Term> terms;
    int dim = 1;

    TrigPolynomial() = default;
    TrigPolynomial(BasisSet b, int d) : basis(std::move(b)), dim(d) {}

    void add_term(VectorValue coeff, Frequency freq);
    void canonicalize();

    /// Coefficient-sum upper bound  sum_l ||b_l||  for the sup norm.
    double coeff_bound() const;
    bool empty() const { return terms.empty(); }
};

/// Black-box bounded evaluator on the real line; stands in for a general
/// almost periodic function given only through sampling.
struct EvaluationOracle {
    std::function<VectorValue(double)> eval;
    double bound = 0.0;
    int dim = 1;
};

using APFunction = std::variant<TrigPolynomial, EvaluationOracle>;

/// Truncation schedule for mean values lim_{T->oo} (1/2T) int_{-T}^{T}.
/// Windows T_k = T1 * 2^(k-1), k = 1..levels, composite midpoint rule.
struct AveragingPlan {
    double T1 = 25.0;
    int levels = 8;
    double step = 0.01;
    double tol = 1e-3;
};

struct BohrMeanResult {
    VectorValue value;
    std::vector<double> window_sizes;
    std::vector<double> successive_diffs; // ||estimate_k - estimate_{k-1}||
    bool converged = true;                // flags NonConverged, result still usable
};

struct SupNormEstimate {
    double grid_max = 0.0;                 // lower bound of the true sup norm
    std::optional<double> coeff_bound;     // sum ||b_l||, upper bound (polynomials only)
};

// -- operations --------------------------------------------------------------

VectorValue evaluate(const TrigPolynomial& p, double t);

/// S_tau: term coefficients pick up the phase e^{i lambda tau}.
TrigPolynomial shift(const TrigPolynomial& p, double tau);

/// Mean value M_t{ f(t) e^{-i lambda t} }; closed form for polynomials.
BohrMeanResult bohr_mean(const TrigPolynomial& p, const Frequency& lambda);
BohrMeanResult bohr_mean(const TrigPolynomial& p, double lambda);
BohrMeanResult bohr_mean(const EvaluationOracle& f, double lambda,
                         const AveragingPlan& plan = {});

/// Terms with nonzero coefficient, sorted by real frequency value.
std::vector<std::pair<Frequency, VectorValue>> spectrum(const TrigPolynomial& p);

SupNormEstimate sup_norm_estimate(const TrigPolynomial& p, double t0, double t1, double step);
SupNormEstimate sup_norm_estimate(const EvaluationOracle& f, double t0, double t1, double step);

} // namespace apx
