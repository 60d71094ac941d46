#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "apx/errors.hpp"

namespace apx {

using Complex = std::complex<double>;

enum class NormTag { sup, euclidean };

/// Element of a finite-dimensional complex coefficient space.
/// The default norm is the sup norm over components.
struct VectorValue {
    std::vector<Complex> components;
    NormTag norm_tag = NormTag::sup;

    VectorValue() = default;
    explicit VectorValue(int d, NormTag tag = NormTag::sup)
        : components(static_cast<size_t>(d)), norm_tag(tag) {
        if (d < 1) throw OutOfDomain("VectorValue: dimension must be >= 1");
    }
    VectorValue(std::initializer_list<Complex> cs, NormTag tag = NormTag::sup)
        : components(cs), norm_tag(tag) {}
    static VectorValue scalar(Complex c) { return VectorValue{{c}}; }

    int dim() const { return static_cast<int>(components.size()); }

    double norm() const {
        if (norm_tag == NormTag::sup) {
            double m = 0.0;
            for (const auto& c : components) m = std::max(m, std::abs(c));
            return m;
        }
        double s = 0.0;
        for (const auto& c : components) s += std::norm(c);
        return std::sqrt(s);
    }

    VectorValue& operator+=(const VectorValue& o) {
        check_dim(o);
        for (size_t i = 0; i < components.size(); ++i) components[i] += o.components[i];
        return *this;
    }
    VectorValue& operator-=(const VectorValue& o) {
        check_dim(o);
        for (size_t i = 0; i < components.size(); ++i) components[i] -= o.components[i];
        return *this;
    }
    VectorValue& operator*=(Complex c) {
        for (auto& x : components) x *= c;
        return *this;
    }
    friend VectorValue operator+(VectorValue a, const VectorValue& b) { a += b; return a; }
    friend VectorValue operator-(VectorValue a, const VectorValue& b) { a -= b; return a; }
    friend VectorValue operator*(Complex c, VectorValue v) { v *= c; return v; }
    friend VectorValue operator*(VectorValue v, Complex c) { v *= c; return v; }

    bool is_zero() const {
        return std::all_of(components.begin(), components.end(),
                           [](Complex c) { return c == Complex(0.0, 0.0); });
    }

private:
    void check_dim(const VectorValue& o) const {
        if (components.size() != o.components.size())
            throw ProfileMismatch("VectorValue: dimension mismatch");
    }
};

} // namespace apx
