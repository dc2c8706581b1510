#include "drto/presets.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace drto {

namespace {

// Edges along the vertical grid line nearest x = x0, for y in [y0, y1]
// (interior mask boundaries: the T-column sides, for instance).
std::vector<BoundaryEdge> vertical_line_edges(const StructuredGrid& g, double x0, double y0,
                                              double y1) {
    const int i = static_cast<int>(std::lround(x0 / g.hx()));
    std::vector<BoundaryEdge> out;
    for (int j = 0; j < g.ny; ++j) {
        const double ym = (j + 0.5) * g.hy();
        if (ym >= y0 && ym <= y1) out.push_back({g.node(i, j), g.node(i, j + 1), g.hy()});
    }
    return out;
}

DomainMask lbeam_mask(const StructuredGrid& g, double cut) {
    DomainMask mask;
    mask.active.assign(static_cast<size_t>(g.num_elements()), 1);
    for (int e = 0; e < g.num_elements(); ++e)
        if (g.cx(e) > cut * g.lx && g.cy(e) > cut * g.ly)
            mask.active[static_cast<size_t>(e)] = 0;
    return mask;
}

DomainMask t_mask(const StructuredGrid& g, double bar_y0, double col_x0, double col_x1) {
    DomainMask mask;
    mask.active.assign(static_cast<size_t>(g.num_elements()), 0);
    for (int e = 0; e < g.num_elements(); ++e) {
        const double x = g.cx(e), y = g.cy(e);
        const bool in_bar = y >= bar_y0;
        const bool in_col = x >= col_x0 && x <= col_x1;
        if (in_bar || in_col) mask.active[static_cast<size_t>(e)] = 1;
    }
    return mask;
}

double active_area(const StructuredGrid& g, const DomainMask& mask) {
    return g.hx() * g.hy() * mask.count_active(g.num_elements());
}

ProblemPreset cantilever(int nx, int ny, double pf) {
    ProblemPreset p;
    p.name = "cantilever";
    if (ny == 0) ny = std::max(1, nx / 2);
    p.grid = StructuredGrid(nx, ny, 2.0, 1.0);
    for (int n : boundary_nodes(p.grid, Side::Left)) p.bc.fixed_nodes.push_back(n);
    p.bc.patches.push_back(
        {"tip", boundary_edges(p.grid, Side::Right, 0.5 - pf / 2, 0.5 + pf / 2)});
    p.xi_nominal = {-1.0, 0.0};
    p.nominal = NominalLaw::dirac(p.xi_nominal);
    p.volume_target = 0.6;
    p.parameter_dim = 2;
    return p;
}

ProblemPreset mast(int nx, int ny, double pf) {
    ProblemPreset p;
    p.name = "mast";
    if (ny == 0) ny = std::max(1, (3 * nx) / 2);
    p.grid = StructuredGrid(nx, ny, 2.0, 3.0);
    const double bar_y0 = 2.4, col_x0 = 0.7, col_x1 = 1.3;
    p.mask = t_mask(p.grid, bar_y0, col_x0, col_x1);
    // clamp the column base
    for (int n : boundary_nodes(p.grid, Side::Bottom, col_x0 / 2.0, col_x1 / 2.0))
        p.bc.fixed_nodes.push_back(n);
    // arms: outer tip edges of the bar
    const double bar_frac0 = bar_y0 / 3.0;
    p.bc.patches.push_back({"arm_left", boundary_edges(p.grid, Side::Left, bar_frac0, 1.0)});
    p.bc.patches.push_back({"arm_right", boundary_edges(p.grid, Side::Right, bar_frac0, 1.0)});
    // wind patches on the lower column sides (interior mask boundary)
    const double wind_y0 = 0.6, wind_y1 = 0.6 + 3.0 * pf;
    p.bc.patches.push_back({"wind_left", vertical_line_edges(p.grid, col_x0, wind_y0, wind_y1)});
    p.bc.patches.push_back({"wind_right", vertical_line_edges(p.grid, col_x1, wind_y0, wind_y1)});
    // three observed load scenarios with probabilities 1/2, 1/4, 1/4
    const std::vector<double> s1 = {0, -1, 0, -1, 0, 0, 0, 0};
    const std::vector<double> s2 = {0, -1, 0, -1, -1, 0, -1, 0};
    const std::vector<double> s3 = {0, -1, 0, -1, 1, 0, 1, 0};
    p.nominal = NominalLaw::empirical({s1, s2, s3}, {0.5, 0.25, 0.25});
    p.xi_nominal = s1;
    p.volume_target = 0.3 * active_area(p.grid, p.mask);
    p.parameter_dim = 8;
    return p;
}

ProblemPreset lbeam(int nx, int ny, double pf) {
    ProblemPreset p;
    p.name = "lbeam";
    if (ny == 0) ny = nx;
    p.grid = StructuredGrid(nx, ny, 1.0, 1.0);
    const double cut = 0.4;
    p.mask = lbeam_mask(p.grid, cut);
    // clamped on the top edge of the vertical leg
    for (int n : boundary_nodes(p.grid, Side::Top, 0.0, cut)) p.bc.fixed_nodes.push_back(n);
    // load on a small region of the right-hand side of the arm
    const double yc = cut / 2.0;
    p.bc.patches.push_back(
        {"tip", boundary_edges(p.grid, Side::Right, yc - pf / 2, yc + pf / 2)});
    p.xi_nominal = {-1.0, 0.0};
    p.nominal = NominalLaw::dirac(p.xi_nominal);
    p.volume_target = 0.2;
    p.parameter_dim = 2;
    return p;
}

ProblemPreset bridge(int nx, int ny, double /*pf*/) {
    ProblemPreset p;
    p.name = "bridge";
    if (ny == 0) ny = std::max(1, nx / 2);
    p.grid = StructuredGrid(nx, ny, 2.0, 1.0);
    for (int n : boundary_nodes(p.grid, Side::Bottom)) p.bc.fixed_nodes.push_back(n);
    p.bc.patches.push_back({"deck", boundary_edges(p.grid, Side::Top)});
    p.xi_nominal = {0.0, -1.0};
    p.nominal = NominalLaw::dirac(p.xi_nominal);
    p.volume_target = 0.245;
    p.parameter_dim = 2;
    return p;
}

ProblemPreset gripper(int nx, int ny, double pf, int kl_modes) {
    ProblemPreset p;
    p.name = "gripper";
    if (ny == 0) ny = nx;
    p.grid = StructuredGrid(nx, ny, 1.0, 1.0);
    // clamped near the left corners of the top and bottom edges
    for (int n : boundary_nodes(p.grid, Side::Top, 0.0, 0.1)) p.bc.fixed_nodes.push_back(n);
    for (int n : boundary_nodes(p.grid, Side::Bottom, 0.0, 0.1)) p.bc.fixed_nodes.push_back(n);
    // actuation load on the centre of the left edge
    p.bc.patches.push_back(
        {"input", boundary_edges(p.grid, Side::Left, 0.5 - pf / 2, 0.5 + pf / 2)});
    p.fixed_loads = {0.1, 0.0};

    // jaws: two thin element blocks near the right side; the target pulls
    // them inward (toward the body)
    p.chi.assign(static_cast<size_t>(p.grid.num_elements()), 0.0);
    for (int e = 0; e < p.grid.num_elements(); ++e) {
        const double x = p.grid.cx(e), y = p.grid.cy(e);
        const bool in_x = x >= 0.85 && x <= 0.95;
        const bool lower = y >= 0.25 && y <= 0.40;
        const bool upper = y >= 0.60 && y <= 0.75;
        if (in_x && (lower || upper)) p.chi[static_cast<size_t>(e)] = 1.0;
    }
    p.u_target.assign(static_cast<size_t>(p.grid.num_dofs()), 0.0);
    for (int n = 0; n < p.grid.num_nodes(); ++n) p.u_target[static_cast<size_t>(2 * n)] = -1.0;

    p.target_displacement = true;
    p.material_uncertainty = true;
    p.parameter_dim = kl_modes;
    p.xi_nominal.assign(static_cast<size_t>(kl_modes), 0.0);
    p.nominal = NominalLaw::dirac(p.xi_nominal);
    p.volume_target = 0.3;
    p.volume_constraint_default = false;  // volume enters as a penalty instead
    return p;
}

}  // namespace

std::vector<std::string> preset_names() {
    return {"cantilever", "mast", "lbeam", "bridge", "gripper"};
}

ProblemPreset make_preset(const std::string& name, int nx, int ny, double patch_fraction,
                          int kl_modes) {
    if (nx < 2) throw std::invalid_argument("preset: nx too small");
    if (name == "cantilever") return cantilever(nx, ny, patch_fraction);
    if (name == "mast") return mast(nx, ny, patch_fraction);
    if (name == "lbeam") return lbeam(nx, ny, patch_fraction);
    if (name == "bridge") return bridge(nx, ny, patch_fraction);
    if (name == "gripper") return gripper(nx, ny, patch_fraction, kl_modes);
    throw std::invalid_argument("unknown preset '" + name + "'");
}

}  // namespace drto
