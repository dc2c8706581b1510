#include "drto/fem.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace drto {

namespace {

// Gauss points and shape-function derivatives for the reference square
// [-1,1]^2, nodes ordered {BL, BR, TR, TL}.
constexpr double kNodeXi[4] = {-1.0, 1.0, 1.0, -1.0};
constexpr double kNodeEta[4] = {-1.0, -1.0, 1.0, 1.0};

struct Quad4 {
    double N[4];
    double dNdx[4];
    double dNdy[4];
};

Quad4 shape_at(double xi, double eta, double hx, double hy) {
    Quad4 q{};
    for (int a = 0; a < 4; ++a) {
        q.N[a] = 0.25 * (1.0 + xi * kNodeXi[a]) * (1.0 + eta * kNodeEta[a]);
        const double dxi = 0.25 * kNodeXi[a] * (1.0 + eta * kNodeEta[a]);
        const double deta = 0.25 * kNodeEta[a] * (1.0 + xi * kNodeXi[a]);
        q.dNdx[a] = dxi * 2.0 / hx;
        q.dNdy[a] = deta * 2.0 / hy;
    }
    return q;
}

}  // namespace

std::array<double, 64> element_stiffness(const StructuredGrid& grid, const MaterialModel& mat) {
    const double hx = grid.hx(), hy = grid.hy();
    const double mu = mat.mu(), lam = mat.lambda2d();
    // Plane-stress constitutive matrix in Voigt form (exx, eyy, gxy).
    const double D00 = lam + 2.0 * mu, D01 = lam, D22 = mu;

    std::array<double, 64> ke{};
    const double g = 1.0 / std::sqrt(3.0);
    const double detJw = hx * hy / 4.0;  // weight 1 at each of the 4 points
    for (int gp = 0; gp < 4; ++gp) {
        const double xi = (gp % 2 == 0 ? -g : g);
        const double eta = (gp / 2 == 0 ? -g : g);
        const Quad4 q = shape_at(xi, eta, hx, hy);
        // B is 3x8: row0 = dN/dx on u_x, row1 = dN/dy on u_y, row2 mixes.
        double B[3][8] = {};
        for (int a = 0; a < 4; ++a) {
            B[0][2 * a] = q.dNdx[a];
            B[1][2 * a + 1] = q.dNdy[a];
            B[2][2 * a] = q.dNdy[a];
            B[2][2 * a + 1] = q.dNdx[a];
        }
        double DB[3][8];
        for (int c = 0; c < 8; ++c) {
            DB[0][c] = D00 * B[0][c] + D01 * B[1][c];
            DB[1][c] = D01 * B[0][c] + D00 * B[1][c];
            DB[2][c] = D22 * B[2][c];
        }
        for (int r = 0; r < 8; ++r)
            for (int c = 0; c < 8; ++c)
                ke[8 * r + c] +=
                    detJw * (B[0][r] * DB[0][c] + B[1][r] * DB[1][c] + B[2][r] * DB[2][c]);
    }
    return ke;
}

std::array<double, 64> element_mass(const StructuredGrid& grid) {
    const double hx = grid.hx(), hy = grid.hy();
    std::array<double, 64> me{};
    const double g = 1.0 / std::sqrt(3.0);
    const double detJw = hx * hy / 4.0;
    for (int gp = 0; gp < 4; ++gp) {
        const double xi = (gp % 2 == 0 ? -g : g);
        const double eta = (gp / 2 == 0 ? -g : g);
        const Quad4 q = shape_at(xi, eta, hx, hy);
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) {
                const double w = detJw * q.N[a] * q.N[b];
                me[8 * (2 * a) + 2 * b] += w;
                me[8 * (2 * a + 1) + 2 * b + 1] += w;
            }
    }
    return me;
}

SparseMatrix assemble_stiffness(const StructuredGrid& grid, const DensityField& h,
                                const MaterialModel& mat, const BoundaryConditions& bc,
                                const std::vector<double>& modulus_scale) {
    h.validate(grid);
    if (!modulus_scale.empty() &&
        static_cast<int>(modulus_scale.size()) != grid.num_elements())
        throw std::invalid_argument("modulus_scale size does not match element count");

    const int ndof = grid.num_dofs();
    const std::array<double, 64> ke = element_stiffness(grid, mat);

    std::vector<char> fixed(static_cast<size_t>(ndof), 0);
    for (int nidx : bc.fixed_nodes) {
        fixed[static_cast<size_t>(2 * nidx)] = 1;
        fixed[static_cast<size_t>(2 * nidx + 1)] = 1;
    }

    // Sparsity pattern from node adjacency on the structured grid.
    SparseMatrix A;
    A.n = ndof;
    A.row_ptr.assign(static_cast<size_t>(ndof) + 1, 0);
    const int nxn = grid.nx + 1, nyn = grid.ny + 1;
    auto neighbor_count = [&](int node) {
        const int i = node % nxn, j = node / nxn;
        const int di = (i > 0) + (i < nxn - 1) + 1;
        const int dj = (j > 0) + (j < nyn - 1) + 1;
        return di * dj;
    };
    for (int node = 0; node < grid.num_nodes(); ++node) {
        const int c = 2 * neighbor_count(node);
        A.row_ptr[static_cast<size_t>(2 * node) + 1] = c;
        A.row_ptr[static_cast<size_t>(2 * node + 1) + 1] = c;
    }
    for (int i = 0; i < ndof; ++i) A.row_ptr[static_cast<size_t>(i) + 1] += A.row_ptr[i];
    A.cols.assign(static_cast<size_t>(A.row_ptr[ndof]), 0);
    A.vals.assign(static_cast<size_t>(A.row_ptr[ndof]), 0.0);
    for (int node = 0; node < grid.num_nodes(); ++node) {
        const int i = node % nxn, j = node / nxn;
        for (int dof = 0; dof < 2; ++dof) {
            const int row = 2 * node + dof;
            int k = A.row_ptr[row];
            for (int jj = std::max(0, j - 1); jj <= std::min(nyn - 1, j + 1); ++jj)
                for (int ii = std::max(0, i - 1); ii <= std::min(nxn - 1, i + 1); ++ii) {
                    const int nb = jj * nxn + ii;
                    A.cols[static_cast<size_t>(k++)] = 2 * nb;
                    A.cols[static_cast<size_t>(k++)] = 2 * nb + 1;
                }
        }
    }

    auto add_entry = [&](int r, int c, double v) {
        for (int k = A.row_ptr[r]; k < A.row_ptr[r + 1]; ++k)
            if (A.cols[k] == c) {
                A.vals[static_cast<size_t>(k)] += v;
                return;
            }
    };

    for (int e = 0; e < grid.num_elements(); ++e) {
        double factor = mat.simp_factor(h[e]);
        if (!modulus_scale.empty()) factor *= modulus_scale[static_cast<size_t>(e)];
        const auto nodes = grid.element_nodes(e);
        int dofs[8];
        for (int a = 0; a < 4; ++a) {
            dofs[2 * a] = 2 * nodes[a];
            dofs[2 * a + 1] = 2 * nodes[a] + 1;
        }
        for (int r = 0; r < 8; ++r) {
            if (fixed[static_cast<size_t>(dofs[r])]) continue;
            for (int c = 0; c < 8; ++c) {
                if (fixed[static_cast<size_t>(dofs[c])]) continue;
                add_entry(dofs[r], dofs[c], factor * ke[8 * r + c]);
            }
        }
    }
    for (int i = 0; i < ndof; ++i)
        if (fixed[static_cast<size_t>(i)]) add_entry(i, i, 1.0);
    return A;
}

std::vector<double> assemble_loads(const StructuredGrid& grid, const BoundaryConditions& bc,
                                   const std::vector<double>& xi) {
    if (static_cast<int>(xi.size()) != bc.load_dimension())
        throw std::invalid_argument("load vector has dimension " + std::to_string(xi.size()) +
                                    ", expected " + std::to_string(bc.load_dimension()));
    std::vector<double> f(static_cast<size_t>(grid.num_dofs()), 0.0);
    for (size_t p = 0; p < bc.patches.size(); ++p) {
        const double tx = xi[2 * p], ty = xi[2 * p + 1];
        for (const auto& e : bc.patches[p].edges) {
            const double w = 0.5 * e.length;  // consistent load, constant traction
            f[static_cast<size_t>(2 * e.node_a)] += w * tx;
            f[static_cast<size_t>(2 * e.node_a + 1)] += w * ty;
            f[static_cast<size_t>(2 * e.node_b)] += w * tx;
            f[static_cast<size_t>(2 * e.node_b + 1)] += w * ty;
        }
    }
    for (int nidx : bc.fixed_nodes) {
        f[static_cast<size_t>(2 * nidx)] = 0.0;
        f[static_cast<size_t>(2 * nidx + 1)] = 0.0;
    }
    return f;
}

ElasticState solve_displacement(const StructuredGrid& grid, const DensityField& h,
                                const MaterialModel& mat, const BoundaryConditions& bc,
                                const std::vector<double>& xi, const SolveOptions& opts) {
    bc.validate(grid);
    const SparseMatrix A = assemble_stiffness(grid, h, mat, bc, opts.modulus_scale);
    const std::vector<double> f = assemble_loads(grid, bc, xi);
    ElasticState state;
    state.solve_info =
        conjugate_gradient(A, f, state.u, opts.tol, opts.max_iter_factor * grid.num_dofs());
    return state;
}

double compliance(const BoundaryConditions& bc, const std::vector<double>& xi,
                  const ElasticState& state) {
    double c = 0.0;
    for (size_t p = 0; p < bc.patches.size(); ++p) {
        const double tx = xi[2 * p], ty = xi[2 * p + 1];
        for (const auto& e : bc.patches[p].edges) {
            const double w = 0.5 * e.length;
            c += w * (tx * (state.u[static_cast<size_t>(2 * e.node_a)] +
                            state.u[static_cast<size_t>(2 * e.node_b)]) +
                      ty * (state.u[static_cast<size_t>(2 * e.node_a + 1)] +
                            state.u[static_cast<size_t>(2 * e.node_b + 1)]));
        }
    }
    return c;
}

std::vector<double> element_cross_energy(const StructuredGrid& grid, const MaterialModel& mat,
                                         const std::vector<double>& u, const std::vector<double>& v,
                                         const std::vector<double>& modulus_scale) {
    const std::array<double, 64> ke = element_stiffness(grid, mat);
    std::vector<double> out(static_cast<size_t>(grid.num_elements()), 0.0);
    for (int e = 0; e < grid.num_elements(); ++e) {
        const auto nodes = grid.element_nodes(e);
        double ue[8], ve[8];
        for (int a = 0; a < 4; ++a) {
            ue[2 * a] = u[static_cast<size_t>(2 * nodes[a])];
            ue[2 * a + 1] = u[static_cast<size_t>(2 * nodes[a] + 1)];
            ve[2 * a] = v[static_cast<size_t>(2 * nodes[a])];
            ve[2 * a + 1] = v[static_cast<size_t>(2 * nodes[a] + 1)];
        }
        double s = 0.0;
        for (int r = 0; r < 8; ++r) {
            double rowdot = 0.0;
            for (int c = 0; c < 8; ++c) rowdot += ke[8 * r + c] * ve[c];
            s += ue[r] * rowdot;
        }
        if (!modulus_scale.empty()) s *= modulus_scale[static_cast<size_t>(e)];
        out[static_cast<size_t>(e)] = s;
    }
    return out;
}

std::vector<double> compliance_sensitivity(const StructuredGrid& grid, const DensityField& h,
                                           const MaterialModel& mat, const ElasticState& state,
                                           const std::vector<double>& modulus_scale) {
    std::vector<double> energy =
        element_cross_energy(grid, mat, state.u, state.u, modulus_scale);
    std::vector<double> g(static_cast<size_t>(grid.num_elements()), 0.0);
    for (int e = 0; e < grid.num_elements(); ++e)
        g[static_cast<size_t>(e)] =
            -mat.simp_factor_derivative(h[e]) * energy[static_cast<size_t>(e)];
    return g;
}

double target_displacement_objective(const StructuredGrid& grid, const std::vector<double>& u,
                                     const std::vector<double>& u_target,
                                     const std::vector<double>& chi) {
    if (u.size() != u_target.size() || static_cast<int>(u.size()) != grid.num_dofs())
        throw std::invalid_argument("target displacement: field size mismatch");
    if (static_cast<int>(chi.size()) != grid.num_elements())
        throw std::invalid_argument("target displacement: chi size mismatch");
    const std::array<double, 64> me = element_mass(grid);
    double val = 0.0;
    for (int e = 0; e < grid.num_elements(); ++e) {
        if (chi[static_cast<size_t>(e)] == 0.0) continue;
        const auto nodes = grid.element_nodes(e);
        double we[8];
        for (int a = 0; a < 4; ++a) {
            we[2 * a] = u[static_cast<size_t>(2 * nodes[a])] -
                        u_target[static_cast<size_t>(2 * nodes[a])];
            we[2 * a + 1] = u[static_cast<size_t>(2 * nodes[a] + 1)] -
                            u_target[static_cast<size_t>(2 * nodes[a] + 1)];
        }
        double s = 0.0;
        for (int r = 0; r < 8; ++r) {
            double rowdot = 0.0;
            for (int c = 0; c < 8; ++c) rowdot += me[8 * r + c] * we[c];
            s += we[r] * rowdot;
        }
        val += chi[static_cast<size_t>(e)] * s;
    }
    return val;
}

std::vector<double> target_displacement_sensitivity(
    const StructuredGrid& grid, const DensityField& h, const MaterialModel& mat,
    const BoundaryConditions& bc, const ElasticState& state, const std::vector<double>& u_target,
    const std::vector<double>& chi, const SolveOptions& opts) {
    // Adjoint right-hand side: -2 chi M (u - u_T), elementwise.
    const std::array<double, 64> me = element_mass(grid);
    std::vector<double> rhs(static_cast<size_t>(grid.num_dofs()), 0.0);
    for (int e = 0; e < grid.num_elements(); ++e) {
        if (chi[static_cast<size_t>(e)] == 0.0) continue;
        const auto nodes = grid.element_nodes(e);
        double we[8];
        int dofs[8];
        for (int a = 0; a < 4; ++a) {
            dofs[2 * a] = 2 * nodes[a];
            dofs[2 * a + 1] = 2 * nodes[a] + 1;
            we[2 * a] = state.u[static_cast<size_t>(2 * nodes[a])] -
                        u_target[static_cast<size_t>(2 * nodes[a])];
            we[2 * a + 1] = state.u[static_cast<size_t>(2 * nodes[a] + 1)] -
                            u_target[static_cast<size_t>(2 * nodes[a] + 1)];
        }
        for (int r = 0; r < 8; ++r) {
            double rowdot = 0.0;
            for (int c = 0; c < 8; ++c) rowdot += me[8 * r + c] * we[c];
            rhs[static_cast<size_t>(dofs[r])] -= 2.0 * chi[static_cast<size_t>(e)] * rowdot;
        }
    }
    for (int nidx : bc.fixed_nodes) {
        rhs[static_cast<size_t>(2 * nidx)] = 0.0;
        rhs[static_cast<size_t>(2 * nidx + 1)] = 0.0;
    }
    const SparseMatrix A = assemble_stiffness(grid, h, mat, bc, opts.modulus_scale);
    std::vector<double> padj;
    conjugate_gradient(A, rhs, padj, opts.tol, opts.max_iter_factor * grid.num_dofs());

    std::vector<double> cross =
        element_cross_energy(grid, mat, state.u, padj, opts.modulus_scale);
    std::vector<double> g(static_cast<size_t>(grid.num_elements()), 0.0);
    for (int e = 0; e < grid.num_elements(); ++e)
        g[static_cast<size_t>(e)] =
            mat.simp_factor_derivative(h[e]) * cross[static_cast<size_t>(e)];
    return g;
}

double volume(const StructuredGrid& grid, const DensityField& h) {
    const double cell = grid.hx() * grid.hy();
    double v = 0.0;
    for (int e = 0; e < grid.num_elements(); ++e) v += h[e];
    return v * cell;
}

std::vector<double> volume_sensitivity(const StructuredGrid& grid) {
    return std::vector<double>(static_cast<size_t>(grid.num_elements()), grid.hx() * grid.hy());
}

}  // namespace drto
