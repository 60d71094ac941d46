#pragma once

#include <functional>
#include <map>
#include <vector>

#include "apx/grid_field.hpp"

namespace apx {

/// Disk (r_inner = 0) or origin-centered annulus carrying the source term.
struct Region {
    double r_inner = 0.0;
    double r_outer = 1.0;

    bool contains(Complex z) const {
        double r = std::abs(z);
        return r >= r_inner && r <= r_outer;
    }
    /// Intersection of the ray z + rho e^{i phi}, rho >= 0, with the region:
    /// up to two intervals; returns the count.
    int ray_intervals(Complex z, double phi, double lo[2], double hi[2]) const;
};

struct CauchyQuad {
    int n_phi = 256;
    int n_rho = 256;  // radial nodes, split across the ray intervals
};

using FieldEvaluator = std::function<VectorValue(Complex)>;

/// Masked bilinear interpolation of a sampled field; zero outside the mask.
VectorValue interp(const GridField& field, Complex z);

/// H(z) = -(1/pi) \iint_Omega h(zeta) / (zeta - z) dA(zeta), the area integral
/// solving dH/dzbar = h. Evaluated by polar recentering around z so the
/// kernel singularity becomes bounded; midpoint rule in rho, uniform in phi
/// with ray/region intersections computed exactly.
VectorValue cauchy_point(const FieldEvaluator& h, int dim, const Region& support,
                         Complex z, const CauchyQuad& quad = {});

/// Pointwise transform of a sampled source onto the target grid layout.
GridField cauchy_transform(const GridField& src, const Region& support,
                           GridField target, const CauchyQuad& quad = {});

/// Evaluator-source overload (no interpolation error).
GridField cauchy_transform(const FieldEvaluator& h, int dim, const Region& support,
                           GridField target, const CauchyQuad& quad = {});

/// In-place power-of-two FFT; forward convention a_hat[k] = sum_j a[j] w^{-jk}.
void fft_pow2(std::vector<Complex>& a, bool inverse);

/// Same area integral for sources supported on a thin annulus, computed per
/// angular Fourier mode with exact radial power kernels:
///   m >= 0:  G_m(r) = -2 \int_{s>r} g_{m+1}(s) (r/s)^m ds
///   m <= -1: G_m(r) =  2 \int_{s<r} g_{m+1}(s) (s/r)^{-m} (s/r)^{... } ds
/// (decaying powers on both sides). Radial integrals use two-point
/// Gauss-Legendre cells; the cell straddling the target radius is split
/// exactly at r. Mode vectors are cached per target radius.
class AnnularCauchy {
public:
    AnnularCauchy(FieldEvaluator g, int dim, double r_lo, double r_hi,
                  int radial_cells, int n_theta);

    VectorValue eval(Complex z) const;
    /// G on a full uniform ring theta_j = theta0 + j * (2 pi / n_theta).
    void eval_ring(double r, double theta0, std::vector<Complex>& out) const;
    /// Max of ||G|| over a sampled set of radii and the full angle grid.
    double max_norm_on_radii(const std::vector<double>& radii) const;

    int n_theta() const { return n_theta_; }

private:
    const std::vector<Complex>& modes_at(double r) const;
    void accumulate(double r, std::vector<Complex>& acc) const;
    void fill_modes(double r, std::vector<Complex>& out) const;
    void add_shell(double r, double s, double w, const Complex* gh,
                   std::vector<Complex>& acc) const;

    FieldEvaluator g_;
    int dim_;
    double r_lo_, r_hi_;
    int cells_, n_theta_;
    std::vector<double> cell_lo_, cell_hi_;
    std::vector<double> node_r_, node_w_;   // 2 GL nodes per cell
    std::vector<std::vector<Complex>> ghat_; // per node: n_theta * dim mode table
    mutable std::map<double, std::vector<Complex>> cache_;
};

} // namespace apx
