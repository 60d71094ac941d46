#include "apx/ap_core.hpp"

#include <algorithm>
#include <cmath>

#include "apx/errors.hpp"

namespace apx {

void BasisSet::validate() const {
    for (size_t i = 0; i < betas.size(); ++i) {
        if (betas[i] == 0.0) throw OutOfDomain("BasisSet: zero element");
        for (size_t j = i + 1; j < betas.size(); ++j)
            if (betas[i] == betas[j]) throw OutOfDomain("BasisSet: duplicate element");
    }
}

double Frequency::value(const BasisSet& basis) const {
    if (coords.size() != basis.betas.size())
        throw OutOfDomain("Frequency: coordinate/basis size mismatch");
    double v = 0.0;
    for (size_t j = 0; j < coords.size(); ++j) v += coords[j].value() * basis.betas[j];
    return v;
}

bool operator<(const Frequency& a, const Frequency& b) {
    return std::lexicographical_compare(a.coords.begin(), a.coords.end(),
                                        b.coords.begin(), b.coords.end());
}

Frequency operator+(const Frequency& a, const Frequency& b) {
    if (a.coords.size() != b.coords.size())
        throw OutOfDomain("Frequency: size mismatch in addition");
    Frequency f = a;
    for (size_t j = 0; j < f.coords.size(); ++j) f.coords[j] = f.coords[j] + b.coords[j];
    return f;
}

void TrigPolynomial::add_term(VectorValue coeff, Frequency freq) {
    if (coeff.dim() != dim) throw ProfileMismatch("TrigPolynomial: coefficient dimension");
    if (static_cast<int>(freq.coords.size()) != basis.size())
        throw OutOfDomain("TrigPolynomial: frequency size vs basis");
    terms.push_back({std::move(coeff), std::move(freq)});
    canonicalize();
}

void TrigPolynomial::canonicalize() {
    std::stable_sort(terms.begin(), terms.end(),
                     [](const Term& a, const Term& b) { return a.freq < b.freq; });
    std::vector<Term> merged;
    for (auto& t : terms) {
        if (!merged.empty() && merged.back().freq == t.freq)
            merged.back().coeff += t.coeff;
        else
            merged.push_back(std::move(t));
    }
    std::erase_if(merged, [](const Term& t) { return t.coeff.is_zero(); });
    terms = std::move(merged);
}

double TrigPolynomial::coeff_bound() const {
    double s = 0.0;
    for (const auto& t : terms) s += t.coeff.norm();
    return s;
}

VectorValue evaluate(const TrigPolynomial& p, double t) {
    VectorValue acc(p.dim);
    for (const auto& term : p.terms) {
        double lambda = term.freq.value(p.basis);
        Complex phase = std::polar(1.0, lambda * t);
        for (int i = 0; i < p.dim; ++i)
            acc.components[static_cast<size_t>(i)] +=
                term.coeff.components[static_cast<size_t>(i)] * phase;
    }
    return acc;
}

TrigPolynomial shift(const TrigPolynomial& p, double tau) {
    TrigPolynomial q = p;
    for (auto& term : q.terms) {
        double lambda = term.freq.value(p.basis);
        term.coeff *= std::polar(1.0, lambda * tau);
    }
    return q;
}

BohrMeanResult bohr_mean(const TrigPolynomial& p, const Frequency& lambda) {
    BohrMeanResult r;
    r.value = VectorValue(p.dim);
    for (const auto& term : p.terms)
        if (term.freq == lambda) { r.value = term.coeff; break; }
    return r;
}

BohrMeanResult bohr_mean(const TrigPolynomial& p, double lambda) {
    BohrMeanResult r;
    r.value = VectorValue(p.dim);
    double tol = 1e-12 * std::max(1.0, std::abs(lambda));
    for (const auto& term : p.terms) {
        if (std::abs(term.freq.value(p.basis) - lambda) <= tol) {
            r.value = term.coeff;
            break;
        }
    }
    return r;
}

namespace {

// Composite midpoint of g over [-T, T], Kahan-compensated per component.
VectorValue midpoint_mean(const std::function<VectorValue(double)>& g, int dim,
                          double T, double step) {
    long long n = std::max<long long>(2, static_cast<long long>(std::ceil(2.0 * T / step)));
    double h = 2.0 * T / static_cast<double>(n);
    std::vector<Complex> sum(static_cast<size_t>(dim)), comp(static_cast<size_t>(dim));
    for (long long i = 0; i < n; ++i) {
        double t = -T + (static_cast<double>(i) + 0.5) * h;
        VectorValue v = g(t);
        for (int c = 0; c < dim; ++c) {
            Complex y = v.components[static_cast<size_t>(c)] - comp[static_cast<size_t>(c)];
            Complex s = sum[static_cast<size_t>(c)] + y;
            comp[static_cast<size_t>(c)] = (s - sum[static_cast<size_t>(c)]) - y;
            sum[static_cast<size_t>(c)] = s;
        }
    }
    VectorValue out(dim);
    for (int c = 0; c < dim; ++c)
        out.components[static_cast<size_t>(c)] = sum[static_cast<size_t>(c)] * (h / (2.0 * T));
    return out;
}

} // namespace

BohrMeanResult bohr_mean(const EvaluationOracle& f, double lambda, const AveragingPlan& plan) {
    BohrMeanResult r;
    auto g = [&](double t) {
        VectorValue v = f.eval(t);
        v *= std::polar(1.0, -lambda * t);
        return v;
    };
    VectorValue prev(f.dim);
    for (int k = 1; k <= plan.levels; ++k) {
        double T = plan.T1 * std::pow(2.0, k - 1);
        VectorValue est = midpoint_mean(g, f.dim, T, plan.step);
        r.window_sizes.push_back(T);
        if (k > 1) r.successive_diffs.push_back((est - prev).norm());
        prev = est;
    }
    r.value = prev;
    r.converged = r.successive_diffs.empty() || r.successive_diffs.back() <= plan.tol;
    return r;
}

std::vector<std::pair<Frequency, VectorValue>> spectrum(const TrigPolynomial& p) {
    std::vector<std::pair<Frequency, VectorValue>> out;
    out.reserve(p.terms.size());
    for (const auto& t : p.terms) out.emplace_back(t.freq, t.coeff);
    std::stable_sort(out.begin(), out.end(), [&](const auto& a, const auto& b) {
        return a.first.value(p.basis) < b.first.value(p.basis);
    });
    return out;
}

SupNormEstimate sup_norm_estimate(const TrigPolynomial& p, double t0, double t1, double step) {
    if (step <= 0.0 || t1 < t0) throw OutOfDomain("sup_norm_estimate: bad window");
    SupNormEstimate e;
    for (double t = t0; t <= t1 + 0.5 * step; t += step)
        e.grid_max = std::max(e.grid_max, evaluate(p, t).norm());
    e.coeff_bound = p.coeff_bound();
    return e;
}

SupNormEstimate sup_norm_estimate(const EvaluationOracle& f, double t0, double t1, double step) {
    if (step <= 0.0 || t1 < t0) throw OutOfDomain("sup_norm_estimate: bad window");
    SupNormEstimate e;
    for (double t = t0; t <= t1 + 0.5 * step; t += step)
        e.grid_max = std::max(e.grid_max, f.eval(t).norm());
    return e;
}

Rational Rational::parse(const std::string& s) {
    size_t slash = s.find('/');
    try {
        if (slash == std::string::npos)
            return Rational(std::stoll(s));
        std::int64_t n = std::stoll(s.substr(0, slash));
        std::int64_t d = std::stoll(s.substr(slash + 1));
        return Rational(n, d);
    } catch (const std::exception&) {
        throw std::invalid_argument("Rational: cannot parse '" + s + "'");
    }
}

} // namespace apx
