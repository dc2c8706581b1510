#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace drto {

/// Structured grid of bilinear quadrilateral elements on [0,lx] x [0,ly].
///
/// Nodes are numbered row-major from the bottom-left corner:
///   node(i,j) = j*(nx+1) + i,  0 <= i <= nx, 0 <= j <= ny.
/// Element (i,j) = j*nx + i covers [i*hx,(i+1)*hx] x [j*hy,(j+1)*hy] and its
/// four nodes are listed counter-clockwise starting at the bottom-left:
///   {BL, BR, TR, TL}.
/// Each node carries two dofs, (2*n, 2*n+1) = (x, y) displacement.
struct StructuredGrid {
    int nx = 0;
    int ny = 0;
    double lx = 1.0;
    double ly = 1.0;

    StructuredGrid() = default;
    StructuredGrid(int nx_, int ny_, double lx_, double ly_)
        : nx(nx_), ny(ny_), lx(lx_), ly(ly_) {
        if (nx < 1 || ny < 1) throw std::invalid_argument("grid: nx, ny must be >= 1");
        if (lx <= 0 || ly <= 0) throw std::invalid_argument("grid: lx, ly must be > 0");
    }

    double hx() const { return lx / nx; }
    double hy() const { return ly / ny; }
    int num_elements() const { return nx * ny; }
    int num_nodes() const { return (nx + 1) * (ny + 1); }
    int num_dofs() const { return 2 * num_nodes(); }

    int node(int i, int j) const { return j * (nx + 1) + i; }
    int element(int i, int j) const { return j * nx + i; }
    int elem_i(int e) const { return e % nx; }
    int elem_j(int e) const { return e / nx; }

    std::array<int, 4> element_nodes(int e) const {
        const int i = elem_i(e), j = elem_j(e);
        const int n0 = node(i, j);
        return {n0, n0 + 1, n0 + nx + 2, n0 + nx + 1};
    }

    /// Element centroid.
    double cx(int e) const { return (elem_i(e) + 0.5) * hx(); }
    double cy(int e) const { return (elem_j(e) + 0.5) * hy(); }
};

/// Per-element material density in [0,1].
struct DensityField {
    std::vector<double> values;

    DensityField() = default;
    explicit DensityField(std::vector<double> v) : values(std::move(v)) {}
    DensityField(int n, double fill) : values(static_cast<size_t>(n), fill) {}

    int size() const { return static_cast<int>(values.size()); }
    double operator[](int e) const { return values[static_cast<size_t>(e)]; }
    double& operator[](int e) { return values[static_cast<size_t>(e)]; }

    void validate(const StructuredGrid& grid) const {
        if (size() != grid.num_elements())
            throw std::invalid_argument("density field size " + std::to_string(size()) +
                                        " does not match grid with " +
                                        std::to_string(grid.num_elements()) + " elements");
        for (double v : values)
            if (!(v >= 0.0 && v <= 1.0))
                throw std::invalid_argument("density value outside [0,1]");
    }
};

/// Active-element mask for non-rectangular domains realized on a bounding
/// grid (L- and T-shapes). Passive elements are pinned to h = 0 and carry
/// only the void stiffness fraction.
struct DomainMask {
    std::vector<std::uint8_t> active;  // empty => everything active

    bool all_active() const { return active.empty(); }
    bool is_active(int e) const {
        return active.empty() || active[static_cast<size_t>(e)] != 0;
    }
    int count_active(int nel) const {
        if (active.empty()) return nel;
        int n = 0;
        for (auto a : active) n += (a != 0);
        return n;
    }
};

}  // namespace drto
