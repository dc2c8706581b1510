#pragma once

#include <string>
#include <vector>

#include "drto/grid.hpp"

namespace drto {

/// A boundary edge given by its two end nodes and physical length.
struct BoundaryEdge {
    int node_a = 0;
    int node_b = 0;
    double length = 0.0;
};

/// A named traction patch. During a solve, patch p receives the constant
/// traction vector (xi[2p], xi[2p+1]) where xi is the load-parameter vector.
struct LoadPatch {
    std::string name;
    std::vector<BoundaryEdge> edges;
};

/// Boundary conditions: clamped nodes (both displacement components fixed)
/// plus a list of traction patches.
struct BoundaryConditions {
    std::vector<int> fixed_nodes;
    std::vector<LoadPatch> patches;

    int load_dimension() const { return 2 * static_cast<int>(patches.size()); }

    void validate(const StructuredGrid& grid) const {
        if (static_cast<int>(fixed_nodes.size()) * 2 < 3)
            throw std::invalid_argument("boundary conditions leave rigid-body modes (need >= 3 fixed dofs)");
        for (int n : fixed_nodes)
            if (n < 0 || n >= grid.num_nodes())
                throw std::invalid_argument("fixed node index out of range");
        for (const auto& patch : patches)
            for (const auto& e : patch.edges) {
                if (e.node_a < 0 || e.node_a >= grid.num_nodes() ||
                    e.node_b < 0 || e.node_b >= grid.num_nodes())
                    throw std::invalid_argument("patch edge node out of range");
                for (int n : fixed_nodes)
                    if (n == e.node_a || n == e.node_b)
                        throw std::invalid_argument("patch '" + patch.name +
                                                    "' overlaps a clamped node");
            }
    }
};

enum class Side { Left, Right, Bottom, Top };

/// Nodes of the grid boundary on `side` whose sliding coordinate lies in
/// [t0, t1] (fractions of the side length).
std::vector<int> boundary_nodes(const StructuredGrid& grid, Side side, double t0 = 0.0,
                                double t1 = 1.0);

/// Boundary edges on `side` whose midpoints lie within [t0, t1] (fractions of
/// the side length).
std::vector<BoundaryEdge> boundary_edges(const StructuredGrid& grid, Side side,
                                         double t0 = 0.0, double t1 = 1.0);

}  // namespace drto
