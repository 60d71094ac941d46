#include "apx/cauchy.hpp"

#include <algorithm>
#include <cmath>

#include "apx/errors.hpp"

namespace apx {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;
} // namespace

int Region::ray_intervals(Complex z, double phi, double lo[2], double hi[2]) const {
    auto disk_hit = [&](double r, double& a, double& b) {
        double bq = z.real() * std::cos(phi) + z.imag() * std::sin(phi);
        double disc = bq * bq + r * r - std::norm(z);
        if (disc <= 0.0) return false;
        double s = std::sqrt(disc);
        a = std::max(0.0, -bq - s);
        b = -bq + s;
        return b > a;
    };
    double ao, bo;
    if (!disk_hit(r_outer, ao, bo)) return 0;
    if (r_inner <= 0.0) {
        lo[0] = ao; hi[0] = bo;
        return 1;
    }
    double ai, bi;
    if (!disk_hit(r_inner, ai, bi)) {
        lo[0] = ao; hi[0] = bo;
        return 1;
    }
    int n = 0;
    if (ai > ao) { lo[n] = ao; hi[n] = ai; ++n; }
    if (bo > bi) { lo[n] = std::max(bi, ao); hi[n] = bo; ++n; }
    return n;
}

VectorValue interp(const GridField& field, Complex z) {
    double a, b;
    if (field.frame == GridFrame::cartesian) {
        a = z.real(); b = z.imag();
    } else {
        a = std::abs(z);
        b = std::arg(z);
    }
    double fa = (a - field.a0) / field.da;
    double fb = (b - field.b0) / field.db;
    bool wrap = field.frame == GridFrame::polar &&
                std::abs(field.n1 * field.db - kTwoPi) < 1e-9;
    if (wrap) {
        fb = std::fmod(fb, static_cast<double>(field.n1));
        if (fb < 0.0) fb += static_cast<double>(field.n1);
    }
    int i0 = static_cast<int>(std::floor(fa));
    int j0 = static_cast<int>(std::floor(fb));
    double ta = fa - i0, tb = fb - j0;
    VectorValue out(field.dim);
    if (i0 < 0 || i0 + 1 >= field.n0) return out;
    if (!wrap && (j0 < 0 || j0 + 1 >= field.n1)) return out;
    int ja = wrap ? ((j0 % field.n1) + field.n1) % field.n1 : j0;
    int jb = wrap ? (ja + 1) % field.n1 : j0 + 1;

    const int is[4] = {i0, i0 + 1, i0, i0 + 1};
    const int js[4] = {ja, ja, jb, jb};
    const double ws[4] = {(1 - ta) * (1 - tb), ta * (1 - tb), (1 - ta) * tb, ta * tb};
    double wsum = 0.0;
    for (int k = 0; k < 4; ++k)
        if (field.is_valid(is[k], js[k])) wsum += ws[k];
    if (wsum <= 0.0) return out;
    for (int k = 0; k < 4; ++k) {
        if (!field.is_valid(is[k], js[k]) || ws[k] == 0.0) continue;
        const Complex* v = field.at(is[k], js[k]);
        double w = ws[k] / wsum;
        for (int c = 0; c < field.dim; ++c)
            out.components[static_cast<size_t>(c)] += w * v[c];
    }
    return out;
}

VectorValue cauchy_point(const FieldEvaluator& h, int dim, const Region& support,
                         Complex z, const CauchyQuad& quad) {
    if (quad.n_phi < 4 || quad.n_rho < 2)
        throw QuadratureFailure("cauchy_point: quadrature spec too small");
    VectorValue acc(dim);
    double dphi = kTwoPi / quad.n_phi;
    for (int ip = 0; ip < quad.n_phi; ++ip) {
        double phi = (ip + 0.5) * dphi;
        Complex dir = std::polar(1.0, phi);
        Complex kfac = std::polar(1.0, -phi);
        double lo[2], hi[2];
        int ni = support.ray_intervals(z, phi, lo, hi);
        if (ni == 0) continue;
        for (int q = 0; q < ni; ++q) {
            // fixed per-interval node count keeps the quadrature error smooth in z
            int n = std::max(2, quad.n_rho / ni);
            double dr = (hi[q] - lo[q]) / n;
            for (int ir = 0; ir < n; ++ir) {
                double rho = lo[q] + (ir + 0.5) * dr;
                VectorValue v = h(z + rho * dir);
                double w = dr * dphi / kPi;
                for (int c = 0; c < dim; ++c)
                    acc.components[static_cast<size_t>(c)] -=
                        w * kfac * v.components[static_cast<size_t>(c)];
            }
        }
    }
    return acc;
}

GridField cauchy_transform(const FieldEvaluator& h, int dim, const Region& support,
                           GridField target, const CauchyQuad& quad) {
    target.dim = dim;
    target.values.assign(static_cast<std::size_t>(target.n0) * target.n1 * dim,
                         Complex(0.0));
    for (int i = 0; i < target.n0; ++i)
        for (int j = 0; j < target.n1; ++j) {
            if (!target.is_valid(i, j)) continue;
            VectorValue v = cauchy_point(h, dim, support, target.point(i, j), quad);
            Complex* dst = target.at(i, j);
            for (int c = 0; c < dim; ++c) dst[c] = v.components[static_cast<size_t>(c)];
        }
    return target;
}

GridField cauchy_transform(const GridField& src, const Region& support,
                           GridField target, const CauchyQuad& quad) {
    FieldEvaluator h = [&src](Complex z) { return interp(src, z); };
    return cauchy_transform(h, src.dim, support, std::move(target), quad);
}

void fft_pow2(std::vector<Complex>& a, bool inverse) {
    const std::size_t n = a.size();
    if (n == 0 || (n & (n - 1)) != 0)
        throw OutOfDomain("fft_pow2: length must be a power of two");
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        double ang = (inverse ? kTwoPi : -kTwoPi) / static_cast<double>(len);
        Complex wl = std::polar(1.0, ang);
        for (std::size_t i = 0; i < n; i += len) {
            Complex w(1.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                Complex u = a[i + k];
                Complex v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

AnnularCauchy::AnnularCauchy(FieldEvaluator g, int dim, double r_lo, double r_hi,
                             int radial_cells, int n_theta)
    : g_(std::move(g)), dim_(dim), r_lo_(r_lo), r_hi_(r_hi), cells_(radial_cells),
      n_theta_(n_theta) {
    if (n_theta <= 0 || (n_theta & (n_theta - 1)) != 0)
        throw OutOfDomain("AnnularCauchy: n_theta must be a power of two");
    if (r_lo <= 0.0 || r_hi <= r_lo)
        throw OutOfDomain("AnnularCauchy: bad radial band");
    const double gl = 0.5 / std::sqrt(3.0);  // two-point Gauss-Legendre offsets
    double dr = (r_hi - r_lo) / cells_;
    for (int c = 0; c < cells_; ++c) {
        double a = r_lo + c * dr, b = a + dr;
        cell_lo_.push_back(a);
        cell_hi_.push_back(b);
        double mid = 0.5 * (a + b), half = b - a;
        for (double off : {-gl, gl}) {
            node_r_.push_back(mid + off * half);
            node_w_.push_back(0.5 * half);
        }
    }
    ghat_.resize(node_r_.size());
    for (std::size_t i = 0; i < node_r_.size(); ++i) {
        ghat_[i].assign(static_cast<std::size_t>(n_theta_) * dim_, Complex(0.0));
        fill_modes(node_r_[i], ghat_[i]);
    }
}

// Samples g on the ring of radius r; stores DFT modes per component with the
// convention g(theta) = sum_n ghat_n e^{i n theta}.
void AnnularCauchy::fill_modes(double r, std::vector<Complex>& out) const {
    std::vector<std::vector<Complex>> rows(
        static_cast<std::size_t>(dim_),
        std::vector<Complex>(static_cast<std::size_t>(n_theta_)));
    double dt = kTwoPi / n_theta_;
    for (int j = 0; j < n_theta_; ++j) {
        VectorValue v = g_(std::polar(r, j * dt));
        for (int c = 0; c < dim_; ++c)
            rows[static_cast<std::size_t>(c)][static_cast<std::size_t>(j)] =
                v.components[static_cast<size_t>(c)];
    }
    for (int c = 0; c < dim_; ++c) {
        auto& row = rows[static_cast<std::size_t>(c)];
        fft_pow2(row, false);
        for (int k = 0; k < n_theta_; ++k)
            out[static_cast<std::size_t>(k) * dim_ + c] =
                row[static_cast<std::size_t>(k)] / static_cast<double>(n_theta_);
    }
}

namespace {

// (num/den)^m for m >= 0 with num <= den, underflow-clamped.
inline double power_ratio(double num, double den, int m) {
    if (m == 0) return 1.0;
    if (num <= 0.0) return 0.0;
    double l = m * (std::log(num) - std::log(den));
    return l < -745.0 ? 0.0 : std::exp(l);
}

} // namespace

// Contribution of one source shell (radius s, radial weight w) to the G-modes
// at radius r. Outer shells feed modes m >= 0 from source mode m+1 with
// kernel -2 (r/s)^m; inner shells feed m <= -1 with kernel +2 (s/r)^{-m-1} s/r.
void AnnularCauchy::add_shell(double r, double s, double w, const Complex* gh,
                              std::vector<Complex>& acc) const {
    int half = n_theta_ / 2;
    if (s > r) {
        for (int m = 0; m + 1 < half; ++m) {
            double k = -2.0 * w * power_ratio(r, s, m);
            if (k == 0.0) break;
            const Complex* gsrc = gh + static_cast<std::size_t>(m + 1) * dim_;
            Complex* dst = acc.data() + static_cast<std::size_t>(m) * dim_;
            for (int c = 0; c < dim_; ++c) dst[c] += k * gsrc[c];
        }
    } else {
        for (int m = -1; m >= -half; --m) {
            double k = 2.0 * w * power_ratio(s, r, -m);
            if (k == 0.0) break;
            int srcbin = (m + 1 < 0) ? n_theta_ + (m + 1) : m + 1;
            int dstbin = n_theta_ + m;
            const Complex* gsrc = gh + static_cast<std::size_t>(srcbin) * dim_;
            Complex* dst = acc.data() + static_cast<std::size_t>(dstbin) * dim_;
            for (int c = 0; c < dim_; ++c) dst[c] += k * gsrc[c];
        }
    }
}

void AnnularCauchy::accumulate(double r, std::vector<Complex>& acc) const {
    acc.assign(static_cast<std::size_t>(n_theta_) * dim_, Complex(0.0));
    int straddle = -1;
    if (r > r_lo_ && r < r_hi_) {
        double dr = (r_hi_ - r_lo_) / cells_;
        straddle = std::min(cells_ - 1, static_cast<int>((r - r_lo_) / dr));
        if (!(cell_lo_[static_cast<std::size_t>(straddle)] < r &&
              r < cell_hi_[static_cast<std::size_t>(straddle)]))
            straddle = -1;  // r on a cell edge, plain classification is exact
    }
    for (std::size_t i = 0; i < node_r_.size(); ++i) {
        if (static_cast<int>(i / 2) == straddle) continue;
        add_shell(r, node_r_[i], node_w_[i], ghat_[i].data(), acc);
    }
    if (straddle >= 0) {
        // split the straddling cell exactly at r
        const double gl = 0.5 / std::sqrt(3.0);
        double a = cell_lo_[static_cast<std::size_t>(straddle)];
        double b = cell_hi_[static_cast<std::size_t>(straddle)];
        std::vector<Complex> tmp(static_cast<std::size_t>(n_theta_) * dim_);
        for (auto [lo, hi] : {std::pair<double, double>{a, r}, {r, b}}) {
            double mid = 0.5 * (lo + hi), half = hi - lo;
            for (double off : {-gl, gl}) {
                double s = mid + off * half;
                fill_modes(s, tmp);
                add_shell(r, s, 0.5 * half, tmp.data(), acc);
            }
        }
    }
}

const std::vector<Complex>& AnnularCauchy::modes_at(double r) const {
    auto it = cache_.find(r);
    if (it != cache_.end()) return it->second;
    std::vector<Complex> acc;
    accumulate(r, acc);
    return cache_.emplace(r, std::move(acc)).first->second;
}

VectorValue AnnularCauchy::eval(Complex z) const {
    double r = std::abs(z), theta = std::arg(z);
    const auto& modes = modes_at(r);
    VectorValue out(dim_);
    int half = n_theta_ / 2;
    Complex w = std::polar(1.0, theta);
    Complex wp(1.0);
    for (int m = 0; m < half; ++m) {
        const Complex* src = modes.data() + static_cast<std::size_t>(m) * dim_;
        for (int c = 0; c < dim_; ++c)
            out.components[static_cast<size_t>(c)] += src[c] * wp;
        wp *= w;
    }
    Complex wm = std::conj(w);
    Complex wn = wm;
    for (int m = -1; m >= -half; --m) {
        const Complex* src = modes.data() + static_cast<std::size_t>(n_theta_ + m) * dim_;
        for (int c = 0; c < dim_; ++c)
            out.components[static_cast<size_t>(c)] += src[c] * wn;
        wn *= wm;
    }
    return out;
}

void AnnularCauchy::eval_ring(double r, double theta0, std::vector<Complex>& out) const {
    const auto& modes = modes_at(r);
    out.assign(static_cast<std::size_t>(n_theta_) * dim_, Complex(0.0));
    std::vector<Complex> work(static_cast<std::size_t>(n_theta_));
    for (int c = 0; c < dim_; ++c) {
        for (int k = 0; k < n_theta_; ++k) {
            int m = k < n_theta_ / 2 ? k : k - n_theta_;
            work[static_cast<std::size_t>(k)] =
                modes[static_cast<std::size_t>(k) * dim_ + c] * std::polar(1.0, m * theta0);
        }
        fft_pow2(work, true);
        for (int j = 0; j < n_theta_; ++j)
            out[static_cast<std::size_t>(j) * dim_ + c] = work[static_cast<std::size_t>(j)];
    }
}

double AnnularCauchy::max_norm_on_radii(const std::vector<double>& radii) const {
    double m = 0.0;
    std::vector<Complex> ring;
    for (double r : radii) {
        eval_ring(r, 0.0, ring);
        for (int j = 0; j < n_theta_; ++j) {
            double local = 0.0;
            for (int c = 0; c < dim_; ++c)
                local = std::max(local,
                                 std::abs(ring[static_cast<std::size_t>(j) * dim_ + c]));
            m = std::max(m, local);
        }
    }
    return m;
}

} // namespace apx
