#include "apx/grid_field.hpp"

#include <cmath>
#include <cstdio>

#include "apx/errors.hpp"

namespace apx {

GridField GridField::cartesian(double x0, double y0, double h, int nx, int ny, int dim) {
    GridField g;
    g.frame = GridFrame::cartesian;
    g.a0 = x0; g.b0 = y0; g.da = h; g.db = h;
    g.n0 = nx; g.n1 = ny; g.dim = dim;
    g.valid.assign(static_cast<std::size_t>(nx) * ny, 1);
    g.values.assign(static_cast<std::size_t>(nx) * ny * dim, Complex(0.0));
    return g;
}

GridField GridField::polar(double r0, double theta0, double dr, double dtheta,
                           int nr, int ntheta, int dim) {
    GridField g;
    g.frame = GridFrame::polar;
    g.a0 = r0; g.b0 = theta0; g.da = dr; g.db = dtheta;
    g.n0 = nr; g.n1 = ntheta; g.dim = dim;
    g.valid.assign(static_cast<std::size_t>(nr) * ntheta, 1);
    g.values.assign(static_cast<std::size_t>(nr) * ntheta * dim, Complex(0.0));
    return g;
}

Complex GridField::point(int i0, int i1) const {
    double a = a0 + da * i0, b = b0 + db * i1;
    if (frame == GridFrame::cartesian) return Complex(a, b);
    return std::polar(a, b);
}

double GridField::step_extent() const {
    if (frame == GridFrame::cartesian) return std::max(da, db);
    double rmax = a0 + da * (n0 - 1);
    return std::max(da, rmax * db);
}

void GridField::sample(const std::function<VectorValue(Complex)>& f,
                       const std::function<bool(Complex)>& keep) {
    for (int i = 0; i < n0; ++i)
        for (int j = 0; j < n1; ++j) {
            Complex z = point(i, j);
            if (keep && !keep(z)) {
                valid[node(i, j)] = 0;
                continue;
            }
            VectorValue v = f(z);
            if (v.dim() != dim) throw ProfileMismatch("GridField::sample: dimension");
            Complex* dst = at(i, j);
            for (int c = 0; c < dim; ++c) dst[c] = v.components[static_cast<size_t>(c)];
        }
}

double GridField::max_norm() const {
    double m = 0.0;
    for (int i = 0; i < n0; ++i)
        for (int j = 0; j < n1; ++j) {
            if (!is_valid(i, j)) continue;
            const Complex* v = at(i, j);
            for (int c = 0; c < dim; ++c) m = std::max(m, std::abs(v[c]));
        }
    return m;
}

double holo_residual(const GridField& field) {
    if (field.n0 < 3 || field.n1 < 3)
        throw GridTooCoarse("holo_residual: need at least 3 nodes per axis");
    double worst = 0.0;
    for (int i = 1; i + 1 < field.n0; ++i)
        for (int j = 1; j + 1 < field.n1; ++j) {
            if (!field.is_valid(i, j) || !field.is_valid(i - 1, j) || !field.is_valid(i + 1, j) ||
                !field.is_valid(i, j - 1) || !field.is_valid(i, j + 1))
                continue;
            const Complex* am = field.at(i - 1, j);
            const Complex* ap = field.at(i + 1, j);
            const Complex* bm = field.at(i, j - 1);
            const Complex* bp = field.at(i, j + 1);
            double local = 0.0;
            for (int c = 0; c < field.dim; ++c) {
                Complex fa = (ap[c] - am[c]) / (2.0 * field.da);
                Complex fb = (bp[c] - bm[c]) / (2.0 * field.db);
                Complex defect;
                if (field.frame == GridFrame::cartesian) {
                    defect = fa + Complex(0.0, 1.0) * fb;  // f_x + i f_y
                } else {
                    double r = field.a0 + field.da * i;
                    // 2 dbar f = e^{i theta} (f_r + i f_theta / r)
                    double theta = field.b0 + field.db * j;
                    defect = std::polar(1.0, theta) * (fa + Complex(0.0, 1.0) * fb / r);
                }
                local = std::max(local, std::abs(defect));
            }
            worst = std::max(worst, local);
        }
    return worst;
}

void write_csv(const GridField& field, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw InputError("write_csv: cannot open " + path);
    std::fprintf(f, "x,y");
    for (int c = 0; c < field.dim; ++c) std::fprintf(f, ",re_%d,im_%d", c + 1, c + 1);
    std::fprintf(f, "\n");
    for (int i = 0; i < field.n0; ++i)
        for (int j = 0; j < field.n1; ++j) {
            if (!field.is_valid(i, j)) continue;
            Complex z = field.point(i, j);
            std::fprintf(f, "%.17g,%.17g", z.real(), z.imag());
            const Complex* v = field.at(i, j);
            for (int c = 0; c < field.dim; ++c)
                std::fprintf(f, ",%.17g,%.17g", v[c].real(), v[c].imag());
            std::fprintf(f, "\n");
        }
    std::fclose(f);
}

} // namespace apx
