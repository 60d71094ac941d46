#include "apx/dbar_glue.hpp"

#include <algorithm>
#include <climits>
#include <cmath>

#include "apx/bochner_fejer.hpp"
#include "apx/errors.hpp"

namespace apx {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

double wrap_pi(double a) {
    double w = std::remainder(a, kTwoPi);
    return w == -kPi ? kPi : w;
}
double wrap_2pi(double a) {
    double w = std::fmod(a, kTwoPi);
    return w < 0.0 ? w + kTwoPi : w;
}

// quintic smoothstep, 0 -> 1 over [0, 1]
double sstep(double u) {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    return u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
}
double sstep_deriv(double u) {
    if (u <= 0.0 || u >= 1.0) return 0.0;
    return u * u * (30.0 + u * (-60.0 + 30.0 * u));
}

} // namespace

bool CircularNeighbourhood::contains(Complex z) const {
    if (std::abs(z) > 1.0 + 1e-12) return false;
    return std::abs(z - std::polar(1.0, center_angle)) < radius;
}

VectorValue DiskPoly::eval(Complex z) const {
    if (coeffs.empty()) throw OutOfDomain("DiskPoly: empty");
    VectorValue acc(coeffs.front().dim());
    Complex p(1.0);
    for (const auto& c : coeffs) {
        acc += p * c;
        p *= z;
    }
    return acc;
}

// ---------------------------------------------------------------------------
// partition of unity
// ---------------------------------------------------------------------------

PartitionOfUnity::PartitionOfUnity(std::vector<double> centers,
                                   std::vector<double> crossovers,
                                   std::vector<double> transitions)
    : centers_(std::move(centers)), crossovers_(std::move(crossovers)),
      transitions_(std::move(transitions)) {
    if (centers_.empty()) throw CoverMismatch("PartitionOfUnity: empty cover");
    if (centers_.size() > 1 && (crossovers_.size() != centers_.size() ||
                                transitions_.size() != centers_.size()))
        throw CoverMismatch("PartitionOfUnity: one crossover per adjacent pair");
    for (double t : transitions_)
        if (!(t > 0.0))
            throw CoverMismatch("PartitionOfUnity: transitions must be positive");
    for (int i = 0; i < static_cast<int>(crossovers_.size()); ++i)
        order_.emplace_back(wrap_2pi(crossovers_[static_cast<size_t>(i)]), i);
    std::sort(order_.begin(), order_.end());
}

double PartitionOfUnity::min_transition() const {
    double m = kPi;
    for (double t : transitions_) m = std::min(m, t);
    return m;
}

std::vector<PartitionOfUnity::Active> PartitionOfUnity::active(double theta) const {
    int m = size();
    if (m == 1) return {{0, 1.0, 0.0}};
    // locate the crossovers bracketing theta; windows are disjoint, so only
    // those two can be active (crossover i separates chart i from i+1)
    double tw = wrap_2pi(theta);
    auto it = std::upper_bound(order_.begin(), order_.end(),
                               std::make_pair(tw, INT_MAX));
    int next = (it == order_.end()) ? order_.front().second : it->second;
    int prev = (it == order_.begin()) ? order_.back().second
                                      : std::prev(it)->second;
    for (int i : {prev, next}) {
        double su = wrap_pi(theta - crossovers_[static_cast<size_t>(i)]);
        double tau = transitions_[static_cast<size_t>(i)];
        if (std::abs(su) <= tau) {
            double u = (su + tau) / (2.0 * tau);
            double sv = sstep(u);
            double ds = sstep_deriv(u) / (2.0 * tau);
            int k0 = i, k1 = (i + 1) % m;
            return {{k0, 1.0 - sv, -ds}, {k1, sv, ds}};
        }
    }
    // plateau: owner is the chart after the previous crossover
    return {{(prev + 1) % m, 1.0, 0.0}};
}

double PartitionOfUnity::rho(int k, double theta) const {
    for (const auto& a : active(theta))
        if (a.k == k) return a.rho;
    return 0.0;
}

double PartitionOfUnity::drho(int k, double theta) const {
    for (const auto& a : active(theta))
        if (a.k == k) return a.drho;
    return 0.0;
}

Complex PartitionOfUnity::dbar_rho(int k, Complex z) const {
    double d = drho(k, std::arg(z));
    return d * Complex(0.0, 0.5) / std::conj(z);
}

// ---------------------------------------------------------------------------
// cocycle
// ---------------------------------------------------------------------------

namespace {

// Angular half-reach of a circular neighbourhood at circle radius r.
double angular_reach(const CircularNeighbourhood& n, double r) {
    double c = (r * r + 1.0 - n.radius * n.radius) / (2.0 * r);
    if (c >= 1.0) return 0.0;
    if (c <= -1.0) return kPi;
    return std::acos(c);
}

int eval_dim(const LocalChart& ch) {
    return ch.f(std::polar(0.999, ch.center_angle + 1e-3)).dim();
}

} // namespace

Cocycle build_cocycle(const std::vector<LocalChart>& charts, double r_lo,
                      int n_theta, int rows, double residual_cap) {
    if (rows < 2) throw CoverMismatch("build_cocycle: need at least 2 rows");
    Cocycle out;
    double dtheta = kTwoPi / n_theta;
    double w = 1.0 - r_lo;
    int m = static_cast<int>(charts.size());
    for (int k = 0; k < m; ++k) {
        for (int j = 0; j < m; ++j) {
            if (k == j) continue;
            const auto& a = charts[static_cast<size_t>(k)];
            const auto& b = charts[static_cast<size_t>(j)];
            double ra = std::max(angular_reach(a.nbhd, r_lo), angular_reach(a.nbhd, 1.0));
            double rb = std::max(angular_reach(b.nbhd, r_lo), angular_reach(b.nbhd, 1.0));
            double gap = wrap_pi(b.nbhd.center_angle - a.nbhd.center_angle);
            if (std::abs(gap) >= ra + rb) continue;
            double lo = std::max(-ra, gap - rb) + a.nbhd.center_angle;
            double hi = std::min(ra, gap + rb) + a.nbhd.center_angle;
            if (hi - lo <= 0.0) continue;
            // align with the global half-offset lattice so overlapping pair
            // grids share nodes exactly
            double lo_al = (std::floor(lo / dtheta - 0.5) + 0.5) * dtheta;
            int cols = std::max(3, static_cast<int>(std::ceil((hi - lo_al) / dtheta)) + 1);
            auto field = GridField::polar(r_lo, lo_al, w / (rows - 1), dtheta, rows, cols,
                                          eval_dim(a));
            auto keep = [&](Complex z) {
                return a.nbhd.contains(z) && b.nbhd.contains(z);
            };
            field.sample([&](Complex z) { return a.f(z) - b.f(z); }, keep);
            bool any = false;
            for (auto v : field.valid)
                if (v) { any = true; break; }
            if (!any) continue;

            CocyclePair pair;
            pair.k = k;
            pair.j = j;
            pair.sup = field.max_norm();
            try {
                pair.residual = holo_residual(field);
            } catch (const GridTooCoarse&) {
                pair.residual = -1.0;
            }
            if (pair.residual > residual_cap)
                throw NotHolomorphic("build_cocycle: cocycle piece fails the residual check");
            out.sup = std::max(out.sup, pair.sup);
            out.max_residual = std::max(out.max_residual, pair.residual);
            pair.field = std::move(field);
            out.pairs.push_back(std::move(pair));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// resolution
// ---------------------------------------------------------------------------

namespace {

VectorValue weighted_sum(const std::vector<LocalChart>& charts,
                         const std::vector<PartitionOfUnity::Active>& act, Complex z,
                         int dim) {
    VectorValue acc(dim);
    for (const auto& a : act)
        if (a.rho != 0.0) acc += Complex(a.rho) * charts[static_cast<size_t>(a.k)].f(z);
    return acc;
}

VectorValue tilde_eval(const std::vector<LocalChart>& charts,
                       const PartitionOfUnity& pou, int j, Complex z, int dim) {
    auto act = pou.active(std::arg(z));
    VectorValue acc = charts[static_cast<size_t>(j)].f(z);
    acc -= weighted_sum(charts, act, z, dim);
    return acc;
}

VectorValue fd_dbar_vec(const std::function<VectorValue(Complex)>& f, Complex z,
                        double step) {
    VectorValue fx = f(z + step) - f(z - step);
    VectorValue fy = f(z + Complex(0.0, step)) - f(z - Complex(0.0, step));
    fx *= Complex(1.0 / (2.0 * step));
    fy *= Complex(0.0, 1.0 / (2.0 * step));
    VectorValue out = fx + fy;
    out *= Complex(0.5);
    return out;
}

} // namespace

Resolution resolve_cocycle(const std::vector<LocalChart>& charts,
                           const PartitionOfUnity& pou, const Cocycle& cocycle,
                           double r_lo, int n_theta, int rows) {
    if (static_cast<int>(charts.size()) != pou.size())
        throw CoverMismatch("resolve_cocycle: partition does not match the cover");
    Resolution out;
    int dim = eval_dim(charts.front());
    double dtheta = kTwoPi / n_theta;
    double w = 1.0 - r_lo;

    out.h_eval = [&charts, &pou, dim](Complex z) {
        auto act = pou.active(std::arg(z));
        VectorValue acc(dim);
        Complex factor = Complex(0.0, 0.5) / std::conj(z);
        for (const auto& a : act)
            if (a.drho != 0.0)
                acc += (-a.drho * factor) * charts[static_cast<size_t>(a.k)].f(z);
        return acc;
    };

    for (int j = 0; j < pou.size(); ++j) {
        const auto& ch = charts[static_cast<size_t>(j)];
        double lo_al = (std::floor(ch.span_left / dtheta - 0.5) + 0.5) * dtheta;
        int cols = std::max(
            3, static_cast<int>(std::ceil((ch.span_right - lo_al) / dtheta)) + 1);
        auto field = GridField::polar(r_lo, lo_al, w / (rows - 1), dtheta, rows,
                                      cols, dim);
        field.sample([&](Complex z) { return tilde_eval(charts, pou, j, z, dim); });
        out.tilde_f.push_back(std::move(field));
    }

    out.h = GridField::polar(r_lo, 0.5 * dtheta, w / (rows - 1), dtheta, rows, n_theta,
                             dim);
    out.h.sample(out.h_eval);
    out.h_sup = out.h.max_norm();

    // c_kj = tilde_k - tilde_j on the cocycle grids
    for (const auto& pair : cocycle.pairs) {
        const GridField& g = pair.field;
        for (int i = 0; i < g.n0; ++i)
            for (int c = 0; c < g.n1; ++c) {
                if (!g.is_valid(i, c)) continue;
                Complex z = g.point(i, c);
                VectorValue lhs = tilde_eval(charts, pou, pair.k, z, dim) -
                                  tilde_eval(charts, pou, pair.j, z, dim);
                const Complex* ref = g.at(i, c);
                for (int d = 0; d < dim; ++d)
                    out.chart_identity_defect =
                        std::max(out.chart_identity_defect,
                                 std::abs(lhs.components[static_cast<size_t>(d)] - ref[d]));
            }
    }

    // chart independence of finite-difference dbar data across a window
    const CocyclePair* adj = nullptr;
    for (const auto& p : cocycle.pairs)
        if (p.j == (p.k + 1) % pou.size()) { adj = &p; break; }
    if (pou.size() > 1 && adj) {
        const auto& pair = *adj;
        double theta0 = pou.crossover(pair.k);
        double r_mid = r_lo + 0.5 * w;
        double step = std::min(w / 16.0, 1e-4);
        double worst = 0.0;
        for (double off : {-0.4, 0.0, 0.4}) {
            Complex z = std::polar(r_mid, theta0 + off * pou.min_transition());
            auto fk = [&](Complex p) { return tilde_eval(charts, pou, pair.k, p, dim); };
            auto fj = [&](Complex p) { return tilde_eval(charts, pou, pair.j, p, dim); };
            worst = std::max(worst, (fd_dbar_vec(fk, z, step) - fd_dbar_vec(fj, z, step)).norm());
        }
        out.h_chart_defect = worst;
    }
    return out;
}

// ---------------------------------------------------------------------------
// first glue
// ---------------------------------------------------------------------------

RingField make_ring_field(const AnnularCauchy& ac) {
    RingField rf;
    rf.n_theta = ac.n_theta();
    rf.at = [&ac](Complex z) { return ac.eval(z); };
    rf.ring = [&ac](double r, double theta0, std::vector<Complex>& out) {
        ac.eval_ring(r, theta0, out);
    };
    return rf;
}

RingField make_ring_field(FieldEvaluator f, int n_theta, int dim) {
    RingField rf;
    rf.n_theta = n_theta;
    rf.dim = dim;
    rf.at = f;
    rf.ring = [f, n_theta, dim](double r, double theta0, std::vector<Complex>& out) {
        out.assign(static_cast<std::size_t>(n_theta) * dim, Complex(0.0));
        double dt = kTwoPi / n_theta;
        for (int j = 0; j < n_theta; ++j) {
            VectorValue v = f(std::polar(r, theta0 + j * dt));
            for (int c = 0; c < dim; ++c)
                out[static_cast<std::size_t>(j) * dim + c] =
                    v.components[static_cast<size_t>(c)];
        }
    };
    return rf;
}

FirstGlue first_glue(const std::vector<LocalChart>& charts, const PartitionOfUnity& pou,
                     const RingField& H, double r_lo, int n_theta, int rows) {
    FirstGlue out;
    int dim = eval_dim(charts.front());
    double dtheta = kTwoPi / n_theta;
    double w = 1.0 - r_lo;

    auto H_at = H.at;
    out.f_eps_eval = [&charts, &pou, H_at, dim](Complex z) {
        auto act = pou.active(std::arg(z));
        VectorValue acc = weighted_sum(charts, act, z, dim);
        acc += H_at(z);
        return acc;
    };

    std::vector<std::vector<Complex>> h_rows(static_cast<size_t>(rows));
    for (int i = 0; i < rows; ++i)
        H.ring(r_lo + w / (rows - 1) * i, 0.5 * dtheta, h_rows[static_cast<size_t>(i)]);

    for (int j = 0; j < pou.size(); ++j) {
        const auto& ch = charts[static_cast<size_t>(j)];
        int c0 = static_cast<int>(std::floor(ch.span_left / dtheta - 0.5));
        int cols = std::max(
            3, static_cast<int>(std::ceil((ch.span_right - (c0 + 0.5) * dtheta) / dtheta)) + 1);
        auto field = GridField::polar(r_lo, (c0 + 0.5) * dtheta, w / (rows - 1), dtheta,
                                      rows, cols, dim);
        for (int i = 0; i < rows; ++i) {
            const auto& hr = h_rows[static_cast<size_t>(i)];
            for (int c = 0; c < cols; ++c) {
                int jg = ((c0 + c) % n_theta + n_theta) % n_theta;
                Complex z = field.point(i, c);
                VectorValue v = tilde_eval(charts, pou, j, z, dim);
                Complex* dst = field.at(i, c);
                for (int d = 0; d < dim; ++d)
                    dst[d] = v.components[static_cast<size_t>(d)] -
                             hr[static_cast<std::size_t>(jg) * dim + d];
            }
        }
        out.c_sup = std::max(out.c_sup, field.max_norm());
        // grid-scale finite differences overstate the defect of thin-domain
        // holomorphic fields; the residual is reported, the solver itself is
        // gated by the direct dbar-defect measurement in the pipeline
        out.c_residual = std::max(out.c_residual, holo_residual(field));
        out.c_i.push_back(std::move(field));
    }

    out.f_eps = GridField::polar(r_lo, 0.5 * dtheta, w / (rows - 1), dtheta, rows,
                                 n_theta, dim);
    for (int i = 0; i < rows; ++i) {
        const auto& hr = h_rows[static_cast<size_t>(i)];
        for (int c = 0; c < n_theta; ++c) {
            Complex z = out.f_eps.point(i, c);
            auto act = pou.active(std::arg(z));
            VectorValue v = weighted_sum(charts, act, z, dim);
            Complex* dst = out.f_eps.at(i, c);
            for (int d = 0; d < dim; ++d)
                dst[d] = v.components[static_cast<size_t>(d)] +
                         hr[static_cast<std::size_t>(c) * dim + d];
        }
    }

    // single-valuedness of f_i - c_i across each crossover window
    if (pou.size() > 1) {
        for (int k = 0; k < pou.size(); ++k) {
            int kn = (k + 1) % pou.size();
            double x = pou.crossover(k), tau = pou.transition(k);
            for (double off : {-0.5, 0.0, 0.5}) {
                for (double rf : {0.0, 0.5, 1.0}) {
                    Complex z = std::polar(r_lo + rf * w, x + off * tau);
                    VectorValue va = charts[static_cast<size_t>(k)].f(z) -
                                     tilde_eval(charts, pou, k, z, dim);
                    VectorValue vb = charts[static_cast<size_t>(kn)].f(z) -
                                     tilde_eval(charts, pou, kn, z, dim);
                    out.chart_mismatch = std::max(out.chart_mismatch, (va - vb).norm());
                }
            }
        }
    }

    if (out.chart_mismatch > 1e-9 * std::max(1.0, out.c_sup))
        throw GlueMismatch("first_glue: glued field disagrees across charts");

    double hs = 0.0;
    for (const auto& hr : h_rows)
        for (const auto& v : hr) hs = std::max(hs, std::abs(v));
    out.H_sup = hs;
    return out;
}

// ---------------------------------------------------------------------------
// radial partition
// ---------------------------------------------------------------------------

double RadialPartition::rho_Dp(double r) const {
    double a = 1.0 - width, b = 1.0 - 0.5 * width;
    return 1.0 - sstep((r - a) / (b - a));
}

double RadialPartition::drho_Dp(double r) const {
    double a = 1.0 - width, b = 1.0 - 0.5 * width;
    return -sstep_deriv((r - a) / (b - a)) / (b - a);
}

Complex RadialPartition::dbar_rho_Dp(Complex z) const {
    double r = std::abs(z);
    return drho_Dp(r) * z / (2.0 * r);
}

double RadialPartition::max_gradient() const { return 1.875 / (0.5 * width); }

double RadialPartition::gradient_constant() const { return 1.875; }

RadialPartition radial_partition(double width) {
    if (!(width > 0.0 && width < 1.0)) throw OutOfDomain("radial_partition: bad width");
    RadialPartition rp;
    rp.width = width;
    return rp;
}

// ---------------------------------------------------------------------------
// pipeline inputs
// ---------------------------------------------------------------------------

PipelineInput make_generator_input(const GeneratorSpec& spec, double scale) {
    PipelineInput in;
    in.interior = [spec](Complex z) {
        return VectorValue::scalar(sap_generator(spec, z));
    };
    in.boundary = [spec](double theta) {
        return VectorValue::scalar(sap_generator(spec, std::polar(1.0, theta)));
    };
    in.singular.angles = {spec.x_angle, spec.y_angle};
    in.singular.canonicalize();
    in.profiles = {generator_profile(spec, spec.x_angle, scale),
                   generator_profile(spec, spec.y_angle, scale)};
    std::sort(in.profiles.begin(), in.profiles.end(),
              [](const APProfile& a, const APProfile& b) {
                  return wrap_pi(a.z0_angle) < wrap_pi(b.z0_angle);
              });
    in.dim = 1;
    in.bound = std::exp(std::max(0.0, spec.lambda) +
                        std::abs(spec.lambda) * std::abs(spec.C));
    return in;
}

PipelineInput make_poly_input(DiskPoly poly) {
    PipelineInput in;
    in.dim = poly.coeffs.empty() ? 1 : poly.coeffs.front().dim();
    in.interior = [poly](Complex z) { return poly.eval(z); };
    in.boundary = [poly](double theta) { return poly.eval(std::polar(1.0, theta)); };
    double b = 0.0;
    for (const auto& c : poly.coeffs) b += c.norm();
    in.bound = b;
    in.poly = std::move(poly);
    return in;
}

PipelineInput make_generator_plus_poly_input(const GeneratorSpec& spec, DiskPoly poly,
                                             double scale) {
    PipelineInput gen = make_generator_input(spec, scale);
    PipelineInput in;
    in.singular = gen.singular;
    in.dim = gen.dim;
    auto gint = gen.interior;
    auto gbnd = gen.boundary;
    in.interior = [gint, poly](Complex z) { return gint(z) + poly.eval(z); };
    in.boundary = [gbnd, poly](double theta) {
        return gbnd(theta) + poly.eval(std::polar(1.0, theta));
    };
    // the polynomial is continuous: profiles pick up its value at the point
    in.profiles = gen.profiles;
    for (auto& prof : in.profiles) {
        VectorValue at = poly.eval(std::polar(1.0, prof.z0_angle));
        auto& hp = std::get<TrigPolynomial>(prof.h_plus);
        auto& hm = std::get<TrigPolynomial>(prof.h_minus);
        hp.add_term(at, Frequency::zero(hp.basis.size()));
        hm.add_term(at, Frequency::zero(hm.basis.size()));
    }
    in.poly = std::move(poly);
    double pb = 0.0;
    for (const auto& c : in.poly.coeffs) pb += c.norm();
    in.bound = gen.bound + pb;
    return in;
}

// ---------------------------------------------------------------------------
// cover construction
// ---------------------------------------------------------------------------

namespace {

struct CoupledLocal {
    StripExpSum smoothed;      // Bochner-Fejer smoothed coupled exponential sum
    double coupling_mismatch = 0.0;
    double smoothing_bound = 0.0;
    std::vector<std::pair<VectorValue, double>> exp_terms;
};

// Builds the holomorphic strip sum whose two edge traces match the shifted
// profile arms; the mismatch measures how far the input is from being the
// boundary pair of a holomorphic function.
CoupledLocal couple_profile(const APProfile& prof, const BasisSet*, double eps) {
    if (!std::holds_alternative<TrigPolynomial>(prof.h_plus) ||
        !std::holds_alternative<TrigPolynomial>(prof.h_minus))
        throw ProfileMismatch("approximate: polynomial profiles required");
    double lns = std::log(prof.scale);
    TrigPolynomial qp = shift(std::get<TrigPolynomial>(prof.h_plus), -lns);
    TrigPolynomial qm = shift(std::get<TrigPolynomial>(prof.h_minus), -lns);
    if (!qp.basis.same_as(qm.basis))
        throw ProfileMismatch("approximate: profile arms share no basis");

    TrigPolynomial F(qp.basis, qp.dim);
    double mismatch = 0.0;
    // union of spectra with exact frequency matching
    std::vector<Frequency> freqs;
    for (const auto& t : qp.terms) freqs.push_back(t.freq);
    for (const auto& t : qm.terms)
        if (std::find(freqs.begin(), freqs.end(), t.freq) == freqs.end())
            freqs.push_back(t.freq);
    for (const auto& fr : freqs) {
        double mu = fr.value(qp.basis);
        VectorValue cp = bohr_mean(qp, fr).value;
        VectorValue cm = bohr_mean(qm, fr).value;
        // edge coupling: the lower-edge trace e^{i mu t} pairs with
        // e^{-mu pi} e^{i mu t} on the upper edge
        double scale_up = std::exp(mu * kPi);
        VectorValue b_from_minus = std::isfinite(scale_up) ? Complex(scale_up) * cm : cm;
        VectorValue b = cp;
        if (!cm.is_zero() && std::isfinite(scale_up)) {
            b = Complex(0.5) * (cp + b_from_minus);
        }
        F.add_term(b, fr);
        VectorValue back = Complex(std::exp(-mu * kPi)) * b;
        mismatch += (b - cp).norm() + (back - cm).norm();
    }
    if (mismatch > eps / 4.0)
        throw NotHolomorphic("approximate: profile arms are not holomorphically coupled");

    CoupledLocal out;
    out.coupling_mismatch = mismatch;
    auto chosen = choose_kernel_for_net_strip({F}, eps / 8.0);
    out.smoothing_bound = chosen.certified_bound;
    out.smoothed = apply_operator(chosen.spec, F).result;
    for (const auto& t : out.smoothed.terms)
        out.exp_terms.emplace_back(t.coeff, t.freq.value(out.smoothed.basis));
    return out;
}

// sup of ||input - g|| over the boundary arc [th_lo, th_hi] and a few rings
// below it; singular angles are approached on a log-scale subgrid.
double probe_sup(const PipelineInput& in, const FieldEvaluator& g, double th_lo,
                 double th_hi, double depth) {
    double sup = 0.0;
    std::vector<double> angles;
    int n_ang = 41;
    for (int i = 0; i <= n_ang; ++i)
        angles.push_back(th_lo + (th_hi - th_lo) * i / n_ang);
    for (double ts : in.singular.angles) {
        for (double base : {ts, ts + kTwoPi, ts - kTwoPi}) {
            if (base < th_lo - 1e-12 || base > th_hi + 1e-12) continue;
            double reach = std::max(base - th_lo, th_hi - base);
            for (int k = 1; k <= 40; ++k) {
                double off = reach * std::pow(2.0, -k);
                if (off < 1e-9) break;
                if (base + off <= th_hi + 1e-12) angles.push_back(base + off);
                if (base - off >= th_lo - 1e-12) angles.push_back(base - off);
            }
        }
    }
    for (double theta : angles) {
        bool near_singular = false;
        for (double ts : in.singular.angles)
            if (std::abs(wrap_pi(theta - ts)) < 1e-9) near_singular = true;
        if (near_singular) continue;
        VectorValue bv = in.boundary(theta);
        sup = std::max(sup, (bv - g(std::polar(1.0, theta))).norm());
        for (double d : {0.25 * depth, 0.5 * depth, depth}) {
            Complex z = std::polar(1.0 - d, theta);
            sup = std::max(sup, (in.interior(z) - g(z)).norm());
        }
    }
    return sup;
}

struct CoverBuild {
    std::vector<LocalChart> charts;
    std::vector<double> crossovers, transitions;
    double local_sup = 0.0;        // worst probe among singular charts
    double cover_sup = 0.0;        // worst probe among all charts
    double coupling_mismatch = 0.0;
    double smoothing_bound = 0.0;
};

LocalChart make_chart(std::string kind, double center, double sl, double sr,
                      FieldEvaluator f, double sup, double depth) {
    LocalChart ch;
    ch.kind = std::move(kind);
    ch.center_angle = center;
    ch.span_left = sl;
    ch.span_right = sr;
    ch.f = std::move(f);
    ch.measured_sup = sup;
    double reach = std::max(center - sl, sr - center);
    double chord = 2.0 * std::sin(std::min(reach, kPi / 2.0) * 0.5);
    ch.nbhd.center_angle = center;
    ch.nbhd.radius = std::min(1.0, 1.05 * std::hypot(chord, depth));
    return ch;
}

CoverBuild build_cover(const PipelineInput& in, double eps, const GlueConfig& cfg) {
    CoverBuild out;
    double target = cfg.eps_budget_local * eps;
    double depth = cfg.probe_depth;

    if (in.singular.angles.empty()) {
        // continuous input: four identical or constant charts around the circle
        bool have_poly = !in.poly.empty();
        for (int q = 0; q < 4; ++q) {
            double c = q * kPi / 2.0;
            double half = kPi / 4.0 + 0.35;
            FieldEvaluator f;
            if (have_poly) {
                DiskPoly p = in.poly;
                f = [p](Complex z) { return p.eval(z); };
            } else {
                VectorValue v = in.boundary(c);
                f = [v](Complex) { return v; };
            }
            double sup = probe_sup(in, f, c - half, c + half, depth);
            if (sup >= target && !have_poly)
                throw VerificationFailed("cover: constant charts cannot reach the target");
            out.cover_sup = std::max(out.cover_sup, sup);
            out.charts.push_back(make_chart(have_poly ? "global" : "constant", c,
                                            c - half, c + half, f, sup, depth));
        }
    } else {
        int ns = static_cast<int>(in.singular.angles.size());
        struct Block {
            double left_end = 0.0, right_end = 0.0;     // outer coverage ends
            double left_width = 0.0, right_width = 0.0; // widths of the junction spans
            std::vector<LocalChart> charts;              // ccw order
        };
        std::vector<Block> blocks;

        for (int i = 0; i < ns; ++i) {
            double ts = in.singular.angles[static_cast<size_t>(i)];
            double gap_r = wrap_2pi(in.singular.angles[static_cast<size_t>((i + 1) % ns)] - ts);
            double gap_l = wrap_2pi(ts - in.singular.angles[static_cast<size_t>((i + ns - 1) % ns)]);
            if (ns == 1) gap_r = gap_l = kTwoPi;

            const APProfile* prof = nullptr;
            for (const auto& p : in.profiles)
                if (std::abs(wrap_pi(p.z0_angle - ts)) < 1e-12) prof = &p;
            if (!prof) throw ProfileMismatch("approximate: missing profile at a singular point");

            CoupledLocal loc = couple_profile(*prof, nullptr, eps);
            out.coupling_mismatch = std::max(out.coupling_mismatch, loc.coupling_mismatch);
            out.smoothing_bound = std::max(out.smoothing_bound, loc.smoothing_bound);

            LogChart lc = LogChart::at_angle(ts);
            Complex zs = std::polar(1.0, ts);
            StripExpSum TF = loc.smoothed;
            DiskPoly poly = in.poly;
            bool have_poly = !poly.empty();
            FieldEvaluator g_plain = [TF, lc, poly, have_poly](Complex z) {
                VectorValue v = eval_strip(TF, lc.to_strip(z));
                if (have_poly) v += poly.eval(z);
                return v;
            };
            FieldEvaluator g_corr = [TF, lc, zs, poly, have_poly](Complex z) {
                VectorValue v = eval_strip(TF, lc.to_strip(z));
                v *= (z + zs) / (2.0 * zs);
                if (have_poly) v += poly.eval(z);
                return v;
            };

            // corrected chart radius by trial
            double cap = std::min(kPi / 8.0, 0.4 * std::min(gap_l, gap_r));
            double sig_s = 0.0, sup_s = 0.0;
            for (int n = 0; n <= 28; ++n) {
                double sig = cap * std::pow(2.0, -n);
                double sup = probe_sup(in, g_corr, ts - sig, ts + sig, depth);
                if (sup < target) {
                    sig_s = sig;
                    sup_s = sup;
                    break;
                }
            }
            if (sig_s == 0.0)
                throw VerificationFailed("cover: no admissible radius at a singular point");
            out.local_sup = std::max(out.local_sup, sup_s);
            out.cover_sup = std::max(out.cover_sup, sup_s);

            Block blk;
            std::vector<LocalChart> right_side, left_side;
            for (int dir : {+1, -1}) {
                double gap = dir > 0 ? gap_r : gap_l;
                double fcap = std::min(0.55, 0.45 * gap);
                double sig_f = 0.0, sup_f = 0.0;
                for (int n = 0; n <= 24; ++n) {
                    double sig = fcap * std::pow(2.0, -n);
                    if (sig < 2.2 * sig_s) break;
                    double lo = dir > 0 ? ts + 0.3 * sig_s : ts - sig;
                    double hi = dir > 0 ? ts + sig : ts - 0.3 * sig_s;
                    double sup = probe_sup(in, g_plain, lo, hi, depth);
                    if (sup < target) {
                        sig_f = sig;
                        sup_f = sup;
                        break;
                    }
                }
                auto& side = dir > 0 ? right_side : left_side;
                double end;
                if (sig_f > 0.0) {
                    out.cover_sup = std::max(out.cover_sup, sup_f);
                    double sig_m = std::clamp(std::sqrt(sig_s * sig_f), 2.2 * sig_s,
                                              0.6 * sig_f);
                    auto span = [&](double a, double b) {
                        return dir > 0 ? std::pair<double, double>{ts + a, ts + b}
                                       : std::pair<double, double>{ts - b, ts - a};
                    };
                    auto [l1, r1] = span(0.3 * sig_s, sig_m);
                    side.push_back(make_chart("flank", 0.5 * (l1 + r1), l1, r1, g_plain,
                                              sup_f, depth));
                    if (sig_f > sig_m * 1.3) {
                        auto [l2, r2] = span(0.55 * sig_m, sig_f);
                        side.push_back(make_chart("flank", 0.5 * (l2 + r2), l2, r2,
                                                  g_plain, sup_f, depth));
                    }
                    end = sig_f;
                } else {
                    end = sig_s;
                }
                if (dir > 0) {
                    blk.right_end = ts + end;
                    blk.right_width = side.empty() ? 2.0 * sig_s
                                                   : side.back().span_right -
                                                         side.back().span_left;
                } else {
                    blk.left_end = ts - end;
                    blk.left_width = side.empty() ? 2.0 * sig_s
                                                  : side.back().span_right -
                                                        side.back().span_left;
                }
            }
            std::reverse(left_side.begin(), left_side.end());
            for (auto& ch : left_side) blk.charts.push_back(std::move(ch));
            LocalChart sing = make_chart("singular", ts, ts - sig_s, ts + sig_s, g_corr,
                                         sup_s, depth);
            sing.exp_terms = loc.exp_terms;
            sing.corrected = true;
            blk.charts.push_back(std::move(sing));
            for (auto& ch : right_side) blk.charts.push_back(std::move(ch));
            blocks.push_back(std::move(blk));
        }

        // march constant charts across the gaps between blocks
        for (int i = 0; i < ns; ++i) {
            Block& cur = blocks[static_cast<size_t>(i)];
            Block& nxt = blocks[static_cast<size_t>((i + 1) % ns)];
            for (auto& ch : cur.charts) out.charts.push_back(std::move(ch));

            double a = cur.right_end;
            double b_raw = nxt.left_end;
            double b = a + wrap_2pi(b_raw - a);
            double start = a - 0.15 * cur.right_width;
            double stop = b + 0.15 * nxt.left_width;
            double pos = start;
            int guard = 0;
            while (guard++ < 4000) {
                double q = 0.0, sup_c = 0.0;
                VectorValue cval(in.dim);
                for (int n = 0; n <= 30; ++n) {
                    double qt = 0.28 * std::pow(2.0, -n);
                    double mid = std::min(pos + qt, 0.5 * (pos + stop));
                    VectorValue v = in.boundary(mid);
                    FieldEvaluator f = [v](Complex) { return v; };
                    double sup = probe_sup(in, f, pos, std::min(pos + 2.0 * qt, stop),
                                           depth);
                    if (sup < target) {
                        q = qt;
                        sup_c = sup;
                        cval = v;
                        break;
                    }
                }
                if (q == 0.0)
                    throw VerificationFailed("cover: constant marching stalled");
                double sl = pos, sr = std::min(pos + 2.0 * q, stop);
                // the probe window was clamped at the junction line, so a
                // chart reaching it has verified quality on all of [pos, stop]
                bool last = pos + 2.0 * q >= stop - 1e-12;
                if (last) sr = stop;
                VectorValue v = cval;
                out.cover_sup = std::max(out.cover_sup, sup_c);
                out.charts.push_back(make_chart("constant", 0.5 * (sl + sr), sl, sr,
                                                [v](Complex) { return v; }, sup_c,
                                                depth));
                if (last) break;
                pos = sr - 0.5 * q;
            }
            if (guard >= 4000)
                throw VerificationFailed("cover: constant marching did not terminate");
        }
    }

    // crossovers and ramp windows in unwrapped coordinates: each crossover
    // lies inside the intersection of its two spans, after the previous
    // crossover, and keeps both chart centers inside their plateaus
    int m = static_cast<int>(out.charts.size());
    if (m == 1) return out;
    std::vector<double> aC(static_cast<size_t>(m)), aL(static_cast<size_t>(m)),
        aR(static_cast<size_t>(m));
    aC[0] = out.charts[0].center_angle;
    for (int i = 1; i < m; ++i)
        aC[static_cast<size_t>(i)] =
            aC[static_cast<size_t>(i - 1)] +
            wrap_2pi(out.charts[static_cast<size_t>(i)].center_angle -
                     out.charts[static_cast<size_t>(i - 1)].center_angle);
    for (int i = 0; i < m; ++i) {
        const auto& ch = out.charts[static_cast<size_t>(i)];
        aL[static_cast<size_t>(i)] = aC[static_cast<size_t>(i)] - (ch.center_angle - ch.span_left);
        aR[static_cast<size_t>(i)] = aC[static_cast<size_t>(i)] + (ch.span_right - ch.center_angle);
    }
    std::vector<double> X(static_cast<size_t>(m)), lo_b(static_cast<size_t>(m)),
        hi_b(static_cast<size_t>(m));
    for (int i = 0; i < m; ++i) {
        int n = (i + 1) % m;
        double shift = (i + 1 == m) ? kTwoPi : 0.0;
        double lo = std::max(aL[static_cast<size_t>(i)], aL[static_cast<size_t>(n)] + shift);
        double hi = std::min(aR[static_cast<size_t>(i)], aR[static_cast<size_t>(n)] + shift);
        if (hi <= lo) throw CoverMismatch("cover: adjacent spans do not overlap");
        double flo = std::max({lo, aC[static_cast<size_t>(i)],
                               i > 0 ? X[static_cast<size_t>(i - 1)] : -1e300});
        double fhi = std::min(hi, aC[static_cast<size_t>(n)] + shift);
        if (fhi <= flo) throw CoverMismatch("cover: no admissible crossover");
        X[static_cast<size_t>(i)] = 0.5 * (flo + fhi);
        lo_b[static_cast<size_t>(i)] = lo;
        hi_b[static_cast<size_t>(i)] = hi;
    }
    for (int i = 0; i < m; ++i) {
        double x = X[static_cast<size_t>(i)];
        double prev = i > 0 ? X[static_cast<size_t>(i - 1)]
                            : X[static_cast<size_t>(m - 1)] - kTwoPi;
        double next = i + 1 < m ? X[static_cast<size_t>(i + 1)]
                                : X[0] + kTwoPi;
        int n = (i + 1) % m;
        double shift = (i + 1 == m) ? kTwoPi : 0.0;
        double tau = std::min({0.35 * (x - lo_b[static_cast<size_t>(i)]),
                               0.35 * (hi_b[static_cast<size_t>(i)] - x),
                               0.3 * (x - prev), 0.3 * (next - x),
                               0.45 * (x - aC[static_cast<size_t>(i)]),
                               0.45 * (aC[static_cast<size_t>(n)] + shift - x)});
        if (!(tau > 0.0)) throw CoverMismatch("cover: degenerate transition window");
        out.crossovers.push_back(wrap_pi(X[static_cast<size_t>(i)]));
        out.transitions.push_back(tau);
    }
    return out;
}

// Pointwise access to an annular solve with per-radius ring caching; calls on
// the exact sampling lattice (as made by the solvers and field assembly) cost
// one inverse transform per new radius instead of a mode sum per point.
class CachedPotential {
public:
    CachedPotential(const AnnularCauchy& solver, int dim)
        : solver_(&solver), dim_(dim), n_(solver.n_theta()) {}

    VectorValue at(Complex z) const {
        double theta = std::arg(z);
        if (theta < 0.0) theta += kTwoPi;
        double jf = theta * n_ / kTwoPi;
        // whole and half-offset lattices both hit the ring cache
        for (int off = 0; off < 2; ++off) {
            double shifted = jf - 0.5 * off;
            long j = std::lround(shifted);
            if (std::abs(shifted - static_cast<double>(j)) >= 1e-7) continue;
            double r = std::abs(z);
            auto& cache = rings_[off];
            auto it = cache.find(r);
            if (it == cache.end()) {
                std::vector<Complex> ring;
                solver_->eval_ring(r, off * kPi / n_, ring);
                it = cache.emplace(r, std::move(ring)).first;
            }
            int jj = static_cast<int>(((j % n_) + n_) % n_);
            VectorValue out(dim_);
            for (int c = 0; c < dim_; ++c)
                out.components[static_cast<size_t>(c)] =
                    it->second[static_cast<std::size_t>(jj) * dim_ + c];
            return out;
        }
        return solver_->eval(z);
    }

private:
    const AnnularCauchy* solver_;
    int dim_, n_;
    mutable std::map<double, std::vector<Complex>> rings_[2];
};

} // namespace


// ---------------------------------------------------------------------------
// second glue
// ---------------------------------------------------------------------------

namespace {

struct GlueState {
    FieldEvaluator f;
    RingField f_eps;
    RadialPartition rp;
    std::unique_ptr<AnnularCauchy> G;
    double w = 0.0;
    int dim = 1;
};

VectorValue glue_value(const GlueState& st, Complex z) {
    double r = std::abs(z);
    VectorValue G = st.G->eval(z);
    if (r <= 1.0 - st.w) return st.f(z) + G;
    if (r >= 1.0 - 0.5 * st.w) {
        VectorValue out = st.f_eps.at(z);
        out += G;
        return out;
    }
    VectorValue c = st.f(z);
    c -= st.f_eps.at(z);
    VectorValue out = st.f(z);
    out -= Complex(st.rp.rho_Ap(r)) * c;
    out += G;
    return out;
}

} // namespace

SecondGlueResult second_glue(const FieldEvaluator& f, const RingField& f_eps, int dim,
                             double width, int n_theta, int rows,
                             const GlueConfig& cfg) {
    if (!(width > 0.0 && width < 1.0)) throw OutOfDomain("second_glue: bad width");
    auto st = std::make_shared<GlueState>();
    st->f = f;
    st->f_eps = f_eps;
    st->rp = radial_partition(width);
    st->w = width;
    st->dim = dim;

    FieldEvaluator c_eval = [f, f_eps](Complex z) {
        VectorValue out = f(z);
        out -= f_eps.at(z);
        return out;
    };
    RadialPartition rp = st->rp;
    FieldEvaluator g_eval = [c_eval, rp](Complex z) {
        VectorValue v = c_eval(z);
        v *= -rp.dbar_rho_Dp(z);
        return v;
    };
    st->G = std::make_unique<AnnularCauchy>(g_eval, dim, 1.0 - width,
                                            1.0 - 0.5 * width, cfg.radial_cells,
                                            n_theta);

    SecondGlueResult out;
    SecondGlue& sg = out.report;
    double band_lo = 1.0 - width, band_hi = 1.0 - 0.5 * width;
    double half_dt = kPi / n_theta;
    std::vector<double> band_r;
    for (int i = 0; i < rows; ++i)
        band_r.push_back(band_lo + (band_hi - band_lo) * i / (rows - 1));

    // band rows: c and G rings drive the agreement check, the c_A'/c_D' sups,
    // the band piece of F_eps and the error there
    out.F_band = GridField::polar(band_lo, half_dt, (band_hi - band_lo) / (rows - 1),
                                  kTwoPi / n_theta, rows, n_theta, dim);
    double sup = 0.0;
    std::vector<Complex> gring, fering;
    for (int i = 0; i < rows; ++i) {
        double r = band_r[static_cast<size_t>(i)];
        st->G->eval_ring(r, half_dt, gring);
        f_eps.ring(r, half_dt, fering);
        double rAp = rp.rho_Ap(r), rDp = rp.rho_Dp(r);
        for (int j = 0; j < n_theta; ++j) {
            Complex z = out.F_band.point(i, j);
            VectorValue fv = f(z);
            Complex* dst = out.F_band.at(i, j);
            for (int d = 0; d < dim; ++d) {
                Complex fev = fering[static_cast<std::size_t>(j) * dim + d];
                Complex G = gring[static_cast<std::size_t>(j) * dim + d];
                Complex c = fv.components[static_cast<size_t>(d)] - fev;
                sg.c_sup = std::max(sg.c_sup, std::abs(c));
                Complex a = fv.components[static_cast<size_t>(d)] - rAp * c + G;
                Complex b = fev + rDp * c + G;
                sg.agreement = std::max(sg.agreement, std::abs(a - b));
                sg.cA_sup = std::max(sg.cA_sup, std::abs(-rDp * c - G));
                sg.cD_sup = std::max(sg.cD_sup, std::abs(rAp * c - G));
                dst[d] = a;
                sup = std::max(sup, std::abs(fv.components[static_cast<size_t>(d)] - a));
            }
        }
    }
    if (sg.agreement > cfg.glue_tol)
        throw GlueMismatch("second_glue: the two gluing formulas disagree");

    std::vector<double> gr = band_r;
    for (double r = 0.05; r < 1.0 - 1e-9; r += 0.05) gr.push_back(r);
    sg.G_sup = st->G->max_norm_on_radii(gr);
    sg.cD_sup = std::max(sg.cD_sup, sg.G_sup);  // on the core c_D' = -G
    sg.cA_sup = std::max(sg.cA_sup, sg.G_sup);  // on the outer ring c_A' = -G

    // direct dbar-solve consistency of the potential
    {
        double step = width / 96.0;
        Complex z = std::polar(1.0 - 0.72 * width, 0.37);
        auto G_at = [&st](Complex p) { return st->G->eval(p); };
        VectorValue lhs = fd_dbar_vec(G_at, z, step);
        VectorValue rhs = g_eval(z);
        sg.G_solve_defect = (lhs - rhs).norm();
    }

    // sup||f - F_eps||: on the core f - F = -G; outer rows use the A-side
    // formula f_eps + G
    std::vector<double> core_radii;
    for (int i = 1; i <= cfg.core_rings; ++i)
        core_radii.push_back((1.0 - width) * i / (cfg.core_rings + 0.0) * 0.999);
    sup = std::max(sup, st->G->max_norm_on_radii(core_radii));
    for (int i = 1; i <= 4; ++i) {
        double r = 1.0 - 0.5 * width + 0.5 * width * (i / 5.0);
        st->G->eval_ring(r, half_dt, gring);
        f_eps.ring(r, half_dt, fering);
        for (int j = 0; j < n_theta; j += 2) {
            Complex z = std::polar(r, half_dt + j * kTwoPi / n_theta);
            VectorValue fv = f(z);
            for (int d = 0; d < dim; ++d) {
                Complex F = fering[static_cast<std::size_t>(j) * dim + d] +
                            gring[static_cast<std::size_t>(j) * dim + d];
                sup = std::max(sup, std::abs(fv.components[static_cast<size_t>(d)] - F));
            }
        }
    }
    sg.sup_error = sup;

    out.F_eps = [st](Complex z) { return glue_value(*st, z); };
    out.state = st;
    return out;
}

// ---------------------------------------------------------------------------
// full pipeline
// ---------------------------------------------------------------------------

namespace {

struct PipelineState {
    PipelineInput input;
    std::vector<LocalChart> charts;
    std::unique_ptr<PartitionOfUnity> pou;
    std::unique_ptr<AnnularCauchy> H;
    double width = 0.0;
    FieldEvaluator f_eps_eval;
    FieldEvaluator F;  // glued approximant from the second glue
    std::shared_ptr<const void> glue_state;
};

} // namespace

PipelineResult approximate(const PipelineInput& input, double eps, const GlueConfig& cfg) {
    if (eps <= 0.0) throw OutOfDomain("approximate: eps must be positive");
    auto state = std::make_shared<PipelineState>();
    state->input = input;
    const PipelineInput& in = state->input;
    PipelineResult result;
    ApproximationReport& rep = result.report;
    rep.eps = eps;
    int dim = in.dim;

    // --- local approximants and cover -------------------------------------
    CoverBuild cover;
    try {
        cover = build_cover(in, eps, cfg);
    } catch (const Error& e) {
        throw StageError("cover", e.what());
    }
    state->charts = std::move(cover.charts);
    rep.charts = static_cast<int>(state->charts.size());
    rep.stage_errors["coupling_mismatch"] = cover.coupling_mismatch;
    rep.stage_errors["smoothing_bound"] = cover.smoothing_bound;
    rep.stage_errors["local_sup"] = cover.local_sup;
    rep.stage_errors["cover_sup"] = cover.cover_sup;

    try {
        if (state->charts.size() == 1)
            state->pou = std::make_unique<PartitionOfUnity>(
                std::vector<double>{state->charts[0].center_angle}, std::vector<double>{},
                std::vector<double>{});
        else
            state->pou = std::make_unique<PartitionOfUnity>(
                [&] {
                    std::vector<double> c;
                    for (auto& ch : state->charts) c.push_back(ch.center_angle);
                    return c;
                }(),
                cover.crossovers, cover.transitions);
    } catch (const Error& e) {
        throw StageError("partition", e.what());
    }
    const PartitionOfUnity& pou = *state->pou;

    // partition diagnostics: exact sum and measured gradient constant
    {
        double sum_defect = 0.0, max_grad = 0.0;
        for (int j = 0; j < 4096; ++j) {
            double theta = (j + 0.5) * kTwoPi / 4096.0;
            auto act = pou.active(theta);
            double s = 0.0, g = 0.0;
            for (auto& a : act) {
                s += a.rho;
                g += std::abs(a.drho);
            }
            sum_defect = std::max(sum_defect, std::abs(s - 1.0));
            max_grad = std::max(max_grad, g);
        }
        rep.stage_errors["partition_sum_defect"] = sum_defect;
        rep.stage_errors["partition_max_gradient"] = max_grad;
    }

    // angular lattice fine enough to resolve the narrowest ramp window
    int n_theta = cfg.n_theta;
    if (pou.size() > 1) {
        double need = kTwoPi / (pou.min_transition() / 24.0);
        while (n_theta < need && n_theta < cfg.n_theta_cap) n_theta *= 2;
    }
    rep.stage_errors["n_theta"] = n_theta;

    // --- dbar data and the width loop --------------------------------------
    FieldEvaluator h_eval = [state, dim](Complex z) {
        auto act = state->pou->active(std::arg(z));
        VectorValue acc(dim);
        Complex factor = Complex(0.0, 0.5) / std::conj(z);
        for (const auto& a : act)
            if (a.drho != 0.0)
                acc += (-a.drho * factor) * state->charts[static_cast<size_t>(a.k)].f(z);
        return acc;
    };

    double w = cfg.initial_width;
    double Hsup = 0.0, hsup = 0.0;
    try {
        for (int it = 0;; ++it) {
            state->H = std::make_unique<AnnularCauchy>(h_eval, dim, 1.0 - w, 1.0,
                                                       cfg.radial_cells, n_theta);
            std::vector<double> radii;
            for (int i = 0; i <= 10; ++i)
                radii.push_back(1.0 - w + w * (0.002 + 0.996 * i / 10.0));
            Hsup = state->H->max_norm_on_radii(radii);
            hsup = 0.0;
            for (double r : {1.0 - 0.9 * w, 1.0 - 0.5 * w, 1.0 - 0.1 * w})
                for (int j = 0; j < n_theta; ++j)
                    hsup = std::max(
                        hsup, h_eval(std::polar(r, (j + 0.5) * kTwoPi / n_theta)).norm());
            if (Hsup <= cfg.h_budget_frac * eps || w <= cfg.min_width ||
                it >= cfg.max_width_shrinks)
                break;
            w *= 0.5;
        }
    } catch (const Error& e) {
        throw StageError("width", e.what());
    }
    if (Hsup > cfg.h_budget_frac * eps)
        throw StageError("width", "sup||H|| exceeds its budget at the minimal width");
    state->width = w;
    rep.width = w;
    rep.stage_errors["h_sup"] = hsup;
    rep.stage_errors["H_sup"] = Hsup;
    rep.C = hsup > 0.0 ? Hsup / (w * hsup) : 0.0;

    // --- cocycle, resolution, first glue -----------------------------------
    double r_lo = 1.0 - w;
    Cocycle cocycle;
    Resolution res;
    FirstGlue fg;
    try {
        cocycle = build_cocycle(state->charts, r_lo, n_theta, cfg.annulus_rows,
                                cfg.residual_cap);
        rep.stage_errors["cocycle_sup"] = cocycle.sup;
        rep.stage_errors["cocycle_residual"] = cocycle.max_residual;
    } catch (const Error& e) {
        throw StageError("cocycle", e.what());
    }
    try {
        res = resolve_cocycle(state->charts, pou, cocycle, r_lo, n_theta,
                              cfg.annulus_rows);
        rep.stage_errors["resolve_identity"] = res.chart_identity_defect;
        rep.stage_errors["h_chart_defect"] = res.h_chart_defect;
    } catch (const Error& e) {
        throw StageError("resolve", e.what());
    }
    try {
        fg = first_glue(state->charts, pou, make_ring_field(*state->H), r_lo,
                        n_theta, cfg.annulus_rows);
        state->f_eps_eval = fg.f_eps_eval;
        rep.stage_errors["c_i_sup"] = fg.c_sup;
        rep.stage_errors["c_i_residual"] = fg.c_residual;
        rep.stage_errors["feps_chart_mismatch"] = fg.chart_mismatch;
    } catch (const Error& e) {
        throw StageError("first_glue", e.what());
    }

    // direct dbar-solve consistency: finite-difference dbar H against h
    {
        double defect = 0.0;
        double step = w / 96.0;
        std::vector<double> sample_angles;
        if (pou.size() > 1) {
            sample_angles.push_back(pou.crossover(0));
            int knar = 0;
            for (int k = 0; k < pou.size(); ++k)
                if (pou.transition(k) < pou.transition(knar)) knar = k;
            sample_angles.push_back(pou.crossover(knar));
            sample_angles.push_back(pou.crossover(0) +
                                    0.5 * wrap_2pi(pou.crossover(1 % pou.size()) -
                                                   pou.crossover(0)));
        } else {
            sample_angles = {0.3, 2.1};
        }
        auto H_at = [&](Complex z) { return state->H->eval(z); };
        for (double th : sample_angles) {
            Complex z = std::polar(1.0 - 0.5 * w, th);
            VectorValue lhs = fd_dbar_vec(H_at, z, step);
            VectorValue rhs = h_eval(z);
            defect = std::max(defect, (lhs - rhs).norm());
        }
        rep.stage_errors["H_solve_defect"] = defect;
        if (defect > cfg.solve_tol * std::max(1.0, hsup))
            throw StageError("first_glue", "dbar H does not reproduce h within tolerance");
    }

    // sup||f - f_eps|| on the annulus
    double f_feps_sup = 0.0;
    {
        const GridField& fe = fg.f_eps;
        for (int i = 0; i < fe.n0; ++i)
            for (int j = 0; j < fe.n1; j += 4) {
                Complex z = fe.point(i, j);
                VectorValue fv = std::abs(z) >= 1.0 - 1e-12 ? in.boundary(std::arg(z))
                                                            : in.interior(z);
                const Complex* v = fe.at(i, j);
                for (int d = 0; d < dim; ++d)
                    f_feps_sup = std::max(
                        f_feps_sup, std::abs(fv.components[static_cast<size_t>(d)] - v[d]));
            }
    }
    rep.stage_errors["f_minus_feps_sup"] = f_feps_sup;

    // --- second glue ---------------------------------------------------------
    try {
        rep.stage_errors["radial_gradient_constant"] =
            radial_partition(w).gradient_constant();
        // f_eps with a fast ring path: charts plus the cached potential
        auto Hcache = std::make_shared<CachedPotential>(*state->H, dim);
        auto charts_ptr = &state->charts;
        auto pou_ptr = state->pou.get();
        RingField f_eps_rf;
        f_eps_rf.n_theta = n_theta;
        f_eps_rf.dim = dim;
        f_eps_rf.at = [Hcache, charts_ptr, pou_ptr, dim](Complex z) {
            auto act = pou_ptr->active(std::arg(z));
            VectorValue acc = weighted_sum(*charts_ptr, act, z, dim);
            acc += Hcache->at(z);
            return acc;
        };
        auto* H_raw = state->H.get();
        f_eps_rf.ring = [H_raw, charts_ptr, pou_ptr, dim, n_theta](
                            double r, double theta0, std::vector<Complex>& out) {
            H_raw->eval_ring(r, theta0, out);
            for (int j = 0; j < n_theta; ++j) {
                Complex z = std::polar(r, theta0 + j * kTwoPi / n_theta);
                auto act = pou_ptr->active(std::arg(z));
                VectorValue v = weighted_sum(*charts_ptr, act, z, dim);
                for (int d = 0; d < dim; ++d)
                    out[static_cast<std::size_t>(j) * dim + d] +=
                        v.components[static_cast<size_t>(d)];
            }
        };

        auto glue = second_glue(in.interior, f_eps_rf, dim, w, n_theta,
                                cfg.annulus_rows, cfg);
        const SecondGlue& sg = glue.report;
        rep.stage_errors["second_c_sup"] = sg.c_sup;
        rep.stage_errors["G_sup"] = sg.G_sup;
        rep.stage_errors["G_solve_defect"] = sg.G_solve_defect;
        rep.stage_errors["glue_agreement"] = sg.agreement;
        rep.stage_errors["cA_sup"] = sg.cA_sup;
        rep.stage_errors["cD_sup"] = sg.cD_sup;
        rep.C_prime = sg.G_sup / eps;
        rep.C_bar = std::max(sg.cA_sup, sg.cD_sup) / eps;
        rep.sup_error = sg.sup_error;
        rep.C_hat = sg.sup_error / eps;
        state->F = glue.F_eps;
        state->glue_state = glue.state;
        result.fields.emplace("F_eps_band", std::move(glue.F_band));
    } catch (const Error& e) {
        throw StageError("second_glue", e.what());
    }

    // --- dbar residual patches ----------------------------------------------
    try {
        double worst_ratio = 0.0;
        auto F_at = state->F;

        auto cartesian_patch = [&](Complex center, double step0) {
            for (int refine = 0; refine < 6; ++refine) {
                double step = step0 / std::pow(2.0, refine);
                auto g = GridField::cartesian(center.real() - 4 * step,
                                              center.imag() - 4 * step, step, 9, 9, dim);
                g.sample([&](Complex z) { return F_at(z); });
                double res = holo_residual(g);
                if (res < 10.0 * step || refine == 5) {
                    worst_ratio = std::max(worst_ratio, res / (10.0 * step));
                    break;
                }
            }
        };
        cartesian_patch(Complex(0.35, 0.1), 2e-3);

        auto polar_patch = [&](double r_c, double th_c, double dr0, double dth0) {
            for (int refine = 0; refine < 8; ++refine) {
                double dr = dr0 / std::pow(2.0, refine);
                double dth = dth0 / std::pow(2.0, refine);
                auto g = GridField::polar(r_c - 4 * dr, th_c - 4 * dth, dr, dth, 9, 9,
                                          dim);
                g.sample([&](Complex z) { return F_at(z); });
                double res = holo_residual(g);
                double h_eff = g.step_extent();
                if (res < 10.0 * h_eff || refine == 7) {
                    worst_ratio = std::max(worst_ratio, res / (10.0 * h_eff));
                    break;
                }
            }
        };
        // check rings sit below the source bands where finite differences are
        // meaningful; on-band holomorphy is certified by the two-formula
        // agreement and the direct solve-defect measurements
        double r_check = 1.0 - 3.0 * w;
        double free_theta = 0.0;
        if (pou.size() > 1) {
            double best = -1.0;
            for (int k = 0; k < pou.size(); ++k) {
                int kn = (k + 1) % pou.size();
                double gap = wrap_2pi(pou.crossover(kn) - pou.crossover(k));
                if (gap > best) {
                    best = gap;
                    free_theta = pou.crossover(k) + 0.5 * gap;
                }
            }
        }
        polar_patch(r_check, free_theta, w / 32.0, w / 16.0);
        if (pou.size() > 1) {
            int knar = 0;
            for (int k = 0; k < pou.size(); ++k)
                if (pou.transition(k) < pou.transition(knar)) knar = k;
            polar_patch(r_check, pou.crossover(knar), w / 32.0,
                        pou.transition(knar) / 32.0);
        }
        rep.dbar_residual = worst_ratio;
        rep.stage_errors["dbar_residual_ratio"] = worst_ratio;
    } catch (const Error& e) {
        throw StageError("residual", e.what());
    }

    // --- certificate ----------------------------------------------------------
    {
        Certificate& cert = rep.certificate;
        for (const auto& ch : state->charts) {
            if (ch.kind != "singular") continue;
            CertificateBlock blk;
            blk.z0_angle = ch.center_angle;
            blk.exp_terms = ch.exp_terms;
            blk.corrected = true;
            cert.blocks.push_back(std::move(blk));
        }
        cert.disk_algebra_part = true;
        // pair opposite chart frequencies into explicit generators
        for (size_t i = 0; i < cert.blocks.size(); ++i)
            for (size_t j = 0; j < cert.blocks.size(); ++j) {
                if (i == j) continue;
                for (const auto& [bi, mui] : cert.blocks[i].exp_terms) {
                    if (mui >= -1e-12) continue;
                    for (const auto& [bj, muj] : cert.blocks[j].exp_terms) {
                        if (std::abs(mui + muj) < 1e-9) {
                            GeneratorSpec gs;
                            gs.lambda = -kPi * mui;
                            gs.x_angle = cert.blocks[i].z0_angle;
                            gs.y_angle = cert.blocks[j].z0_angle;
                            cert.recovered.push_back(gs);
                        }
                    }
                }
            }
        // remainder after stripping the explicit blocks
        double rem = 0.0;
        for (int j = 0; j < 512; ++j) {
            Complex z = std::polar(1.0 - 0.25 * w, (j + 0.5) * kTwoPi / 512.0);
            VectorValue v = state->F(z);
            for (const auto& ch : state->charts)
                if (ch.kind == "singular") v -= ch.f(z);
            // singular charts already include the polynomial part once each;
            // add it back so exactly one copy is subtracted in total
            if (!in.poly.empty()) {
                int n_sing = static_cast<int>(cert.blocks.size());
                v += Complex(n_sing - 1) * in.poly.eval(z);
            }
            rem = std::max(rem, v.norm());
        }
        cert.remainder_sup = rem;
        rep.stage_errors["remainder_sup"] = rem;
    }

    // --- stored fields ---------------------------------------------------------
    result.fields.emplace("h", std::move(res.h));
    result.fields.emplace("f_eps", std::move(fg.f_eps));
    for (size_t i = 0; i < std::min<size_t>(res.tilde_f.size(), 4); ++i)
        result.fields.emplace("tilde_f_" + std::to_string(i), std::move(res.tilde_f[i]));
    for (size_t i = 0; i < std::min<size_t>(fg.c_i.size(), 4); ++i)
        result.fields.emplace("c_" + std::to_string(i), std::move(fg.c_i[i]));
    for (size_t i = 0; i < std::min<size_t>(cocycle.pairs.size(), 4); ++i)
        result.fields.emplace("cocycle_" + std::to_string(cocycle.pairs[i].k) + "_" +
                                  std::to_string(cocycle.pairs[i].j),
                              std::move(cocycle.pairs[i].field));

    result.F_eps = state->F;
    result.state = std::shared_ptr<const void>(state, state.get());
    return result;
}

} // namespace apx
