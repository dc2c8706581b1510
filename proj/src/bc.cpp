#include "drto/bc.hpp"

namespace drto {

std::vector<int> boundary_nodes(const StructuredGrid& grid, Side side, double t0, double t1) {
    std::vector<int> out;
    const double eps = 1e-12;
    auto in_range = [&](double t) { return t >= t0 - eps && t <= t1 + eps; };
    switch (side) {
        case Side::Left:
        case Side::Right: {
            const int i = (side == Side::Left) ? 0 : grid.nx;
            for (int j = 0; j <= grid.ny; ++j)
                if (in_range(static_cast<double>(j) / grid.ny)) out.push_back(grid.node(i, j));
            break;
        }
        case Side::Bottom:
        case Side::Top: {
            const int j = (side == Side::Bottom) ? 0 : grid.ny;
            for (int i = 0; i <= grid.nx; ++i)
                if (in_range(static_cast<double>(i) / grid.nx)) out.push_back(grid.node(i, j));
            break;
        }
    }
    return out;
}

std::vector<BoundaryEdge> boundary_edges(const StructuredGrid& grid, Side side, double t0,
                                         double t1) {
    std::vector<BoundaryEdge> out;
    const double eps = 1e-12;
    auto in_range = [&](double t) { return t >= t0 - eps && t <= t1 + eps; };
    switch (side) {
        case Side::Left:
        case Side::Right: {
            const int i = (side == Side::Left) ? 0 : grid.nx;
            for (int j = 0; j < grid.ny; ++j)
                if (in_range((j + 0.5) / grid.ny))
                    out.push_back({grid.node(i, j), grid.node(i, j + 1), grid.hy()});
            break;
        }
        case Side::Bottom:
        case Side::Top: {
            const int j = (side == Side::Bottom) ? 0 : grid.ny;
            for (int i = 0; i < grid.nx; ++i)
                if (in_range((i + 0.5) / grid.nx))
                    out.push_back({grid.node(i, j), grid.node(i + 1, j), grid.hx()});
            break;
        }
    }
    return out;
}

}  // namespace drto
