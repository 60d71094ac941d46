#include "apx/bochner_fejer.hpp"

#include <algorithm>
#include <cmath>

#include "apx/errors.hpp"

namespace apx {

void KernelSpec::validate() const {
    basis.validate();
    size_t r = basis.betas.size();
    if (m.size() != r || N.size() != r)
        throw OutOfDomain("KernelSpec: basis/m/N size mismatch");
    for (size_t j = 0; j < r; ++j)
        if (m[j] < 1 || N[j] < 1) throw OutOfDomain("KernelSpec: m_j, N_j must be >= 1");
}

TrigPolynomial build_kernel(const KernelSpec& spec) {
    spec.validate();
    size_t r = spec.basis.betas.size();

    // Nonzero factors require |nu_j| <= N_j - 1.
    std::size_t count = 1;
    for (size_t j = 0; j < r; ++j) {
        std::size_t w = static_cast<std::size_t>(2 * spec.N[j] - 1);
        if (count > spec.expanded_term_cap / w + 1) count = spec.expanded_term_cap + 1;
        else count *= w;
        if (count > spec.expanded_term_cap)
            throw SizeLimit("build_kernel: expanded term count exceeds cap");
    }

    TrigPolynomial K(spec.basis, 1);
    std::vector<std::int64_t> nu(r, 0);
    for (size_t j = 0; j < r; ++j) nu[j] = -(spec.N[j] - 1);
    bool done = (r == 0);
    if (r == 0) {
        K.add_term(VectorValue::scalar(1.0), Frequency::zero(0));
        return K;
    }
    std::vector<TrigPolynomial::Term> terms;
    while (!done) {
        double c = 1.0;
        Frequency f = Frequency::zero(static_cast<int>(r));
        for (size_t j = 0; j < r; ++j) {
            c *= 1.0 - static_cast<double>(std::llabs(nu[j])) / static_cast<double>(spec.N[j]);
            f.coords[j] = Rational(nu[j], spec.m[j]);
        }
        terms.push_back({VectorValue::scalar(c), std::move(f)});
        // advance the lattice counter
        size_t j = 0;
        for (;; ++j) {
            if (j == r) { done = true; break; }
            if (++nu[j] <= spec.N[j] - 1) break;
            nu[j] = -(spec.N[j] - 1);
        }
    }
    K.terms = std::move(terms);
    K.canonicalize();
    return K;
}

namespace {

// Damping factor for one frequency: prod_j (1 - |p_j|/N_j) if every
// coordinate lies on the lattice nu_j/m_j with |p_j| < N_j, else 0.
// off_grid reports a coordinate with non-integer p_j = coord * m_j.
double damping_factor(const KernelSpec& spec, const Frequency& freq, bool& off_grid) {
    off_grid = false;
    double d = 1.0;
    for (size_t j = 0; j < freq.coords.size(); ++j) {
        const Rational& c = freq.coords[j];
        if (spec.m[j] % c.den != 0) { off_grid = true; return 0.0; }
        std::int64_t p = c.num * (spec.m[j] / c.den);
        std::int64_t ap = p < 0 ? -p : p;
        if (ap >= spec.N[j]) return 0.0;
        d *= 1.0 - static_cast<double>(ap) / static_cast<double>(spec.N[j]);
    }
    return d;
}

} // namespace

AppliedOperator apply_operator(const KernelSpec& spec, const TrigPolynomial& f) {
    spec.validate();
    if (!spec.basis.same_as(f.basis))
        throw OutOfDomain("apply_operator: kernel and input share no basis");
    AppliedOperator out;
    out.result = TrigPolynomial(f.basis, f.dim);
    for (const auto& term : f.terms) {
        bool off = false;
        double d = damping_factor(spec, term.freq, off);
        out.report.damping.push_back(d);
        out.report.off_grid.push_back(off);
        out.report.certified_bound += term.coeff.norm() * (1.0 - d);
        if (d != 0.0)
            out.result.terms.push_back({term.coeff * Complex(d), term.freq});
    }
    out.result.canonicalize();
    return out;
}

namespace {

ChosenKernel choose_kernel_impl(const std::vector<TrigPolynomial>& fs, double eps,
                                bool strip_weight) {
    if (eps <= 0.0) throw OutOfDomain("choose_kernel_for_net: eps must be positive");
    if (fs.empty()) throw OutOfDomain("choose_kernel_for_net: no inputs");
    const BasisSet& basis = fs.front().basis;
    for (const auto& f : fs)
        if (!f.basis.same_as(basis))
            throw OutOfDomain("choose_kernel_for_net: inputs share no basis");
    size_t r = basis.betas.size();

    std::vector<std::int64_t> m(r, 1);
    for (const auto& f : fs)
        for (const auto& term : f.terms)
            for (size_t j = 0; j < r; ++j)
                m[j] = lcm_checked(m[j], term.freq.coords[j].den);

    // integer lattice coordinates p_lj and per-term norms
    struct Entry {
        double weight;
        std::vector<std::int64_t> p;
    };
    std::vector<std::vector<Entry>> entries(fs.size());
    std::vector<std::int64_t> base(r, 1);
    for (size_t fi = 0; fi < fs.size(); ++fi) {
        for (const auto& term : fs[fi].terms) {
            Entry e;
            e.weight = term.coeff.norm();
            if (strip_weight) {
                double lambda = term.freq.value(basis);
                e.weight *= std::max(1.0, std::exp(-lambda * M_PI));
            }
            e.p.resize(r);
            for (size_t j = 0; j < r; ++j) {
                const Rational& c = term.freq.coords[j];
                e.p[j] = c.num * (m[j] / c.den);
                base[j] = std::max<std::int64_t>(base[j], e.p[j] < 0 ? -e.p[j] : e.p[j]);
            }
            entries[fi].push_back(std::move(e));
        }
    }

    auto bound_for = [&](std::int64_t scale) {
        std::vector<double> N(r);
        for (size_t j = 0; j < r; ++j)
            N[j] = static_cast<double>(base[j]) * static_cast<double>(scale);
        double worst = 0.0;
        for (const auto& fe : entries) {
            double b = 0.0;
            for (const auto& e : fe) {
                double d = 1.0;
                for (size_t j = 0; j < r; ++j)
                    d *= 1.0 - static_cast<double>(std::llabs(e.p[j])) / N[j];
                b += e.weight * (1.0 - d);
            }
            worst = std::max(worst, b);
        }
        return worst;
    };

    std::int64_t lo = 1, hi = 2;
    while (bound_for(hi) > eps) {
        hi *= 2;
        if (hi > (std::int64_t(1) << 40))
            throw Unrepresentable("choose_kernel_for_net: required order out of range");
    }
    while (lo < hi) {
        std::int64_t mid = lo + (hi - lo) / 2;
        if (bound_for(mid) <= eps) hi = mid;
        else lo = mid + 1;
    }

    ChosenKernel out;
    out.spec.basis = basis;
    out.spec.m = m;
    out.spec.N.resize(r);
    for (size_t j = 0; j < r; ++j) out.spec.N[j] = base[j] * lo;
    out.certified_bound = bound_for(lo);
    return out;
}

} // namespace

ChosenKernel choose_kernel_for_net(const std::vector<TrigPolynomial>& fs, double eps) {
    return choose_kernel_impl(fs, eps, false);
}

ChosenKernel choose_kernel_for_net_strip(const std::vector<TrigPolynomial>& fs, double eps) {
    return choose_kernel_impl(fs, eps, true);
}

} // namespace apx
