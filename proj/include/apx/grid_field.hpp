#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "apx/vector_value.hpp"

namespace apx {

/// Frame of a uniform sampling grid. Cartesian: axis0 = x, axis1 = y.
/// Polar: axis0 = r, axis1 = theta (used for thin annular regions where a
/// Cartesian grid at the required resolution would be infeasible).
enum class GridFrame { cartesian, polar };

/// Sampled complex vector field on a uniform grid, with a validity mask for
/// nodes outside the region of interest.
struct GridField {
    GridFrame frame = GridFrame::cartesian;
    double a0 = 0.0, b0 = 0.0;  // origin (x0,y0) or (r0,theta0)
    double da = 0.0, db = 0.0;  // steps along axis0/axis1
    int n0 = 0, n1 = 0;
    int dim = 1;
    std::string region;
    std::vector<std::uint8_t> valid;
    std::vector<Complex> values;  // node-major, dim components per node

    static GridField cartesian(double x0, double y0, double h, int nx, int ny, int dim);
    static GridField polar(double r0, double theta0, double dr, double dtheta,
                           int nr, int ntheta, int dim);

    std::size_t node(int i0, int i1) const {
        return (static_cast<std::size_t>(i0) * static_cast<std::size_t>(n1) +
                static_cast<std::size_t>(i1));
    }
    bool is_valid(int i0, int i1) const { return valid[node(i0, i1)] != 0; }
    Complex* at(int i0, int i1) { return values.data() + node(i0, i1) * dim; }
    const Complex* at(int i0, int i1) const { return values.data() + node(i0, i1) * dim; }

    /// Physical location of a node.
    Complex point(int i0, int i1) const;
    /// Largest physical cell extent (finite-difference step scale).
    double step_extent() const;

    /// Fills values from an evaluator; nodes where keep() is false are masked.
    void sample(const std::function<VectorValue(Complex)>& f,
                const std::function<bool(Complex)>& keep = nullptr);

    double max_norm() const;
};

/// Max over interior nodes of the Cauchy-Riemann defect |df/dx + i df/dy|
/// (= 2 |d f / d zbar|), centered differences. Interior nodes are valid nodes
/// whose four axis neighbours are valid. Throws GridTooCoarse when fewer than
/// 3 nodes per axis.
double holo_residual(const GridField& field);

/// CSV writer, columns: x, y, re_1, im_1, ..., re_d, im_d (valid nodes only).
void write_csv(const GridField& field, const std::string& path);

} // namespace apx
