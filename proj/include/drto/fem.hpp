#pragma once

#include <array>
#include <optional>
#include <vector>

#include "drto/bc.hpp"
#include "drto/grid.hpp"
#include "drto/material.hpp"
#include "drto/sparse.hpp"

namespace drto {

/// Nodal displacement field together with solver diagnostics.
struct ElasticState {
    std::vector<double> u;        // 2 dofs per node
    CgResult solve_info;
};

struct SolveOptions {
    double tol = 1e-8;            // relative residual tolerance
    int max_iter_factor = 10;     // max_iter = factor * ndof
    // Optional per-element Young's modulus multiplying MaterialModel::E
    // (random-field realizations); empty means homogeneous.
    std::vector<double> modulus_scale;
};

/// 8x8 plane-stress stiffness of one rectangular bilinear element with unit
/// Young's modulus, 2x2 Gauss quadrature (exact for this element).
std::array<double, 64> element_stiffness(const StructuredGrid& grid, const MaterialModel& mat);

/// 8x8 element mass-type matrix for the vector L2 product
/// int_e u . v dx of two bilinear fields (2x2 Gauss, exact).
std::array<double, 64> element_mass(const StructuredGrid& grid);

/// Assembles the SIMP-scaled global stiffness. Dirichlet conditions are
/// imposed by row/column elimination with a unit diagonal, keeping the
/// matrix symmetric positive definite.
SparseMatrix assemble_stiffness(const StructuredGrid& grid, const DensityField& h,
                                const MaterialModel& mat, const BoundaryConditions& bc,
                                const std::vector<double>& modulus_scale = {});

/// Consistent load vector for the patch tractions xi (two entries per patch),
/// zeroed on Dirichlet dofs.
std::vector<double> assemble_loads(const StructuredGrid& grid, const BoundaryConditions& bc,
                                   const std::vector<double>& xi);

/// Solves the elasticity system for the loads xi.
ElasticState solve_displacement(const StructuredGrid& grid, const DensityField& h,
                                const MaterialModel& mat, const BoundaryConditions& bc,
                                const std::vector<double>& xi, const SolveOptions& opts = {});

/// Work of the external loads, int_{Gamma_N} g . u ds, by edge quadrature.
double compliance(const BoundaryConditions& bc, const std::vector<double>& xi,
                  const ElasticState& state);

/// d(compliance)/dh_e = -p (1-eta) h_e^{p-1} * (element strain energy of u).
std::vector<double> compliance_sensitivity(const StructuredGrid& grid, const DensityField& h,
                                           const MaterialModel& mat, const ElasticState& state,
                                           const std::vector<double>& modulus_scale = {});

/// Weighted misfit int_D chi |u - u_T|^2 dx by element quadrature;
/// chi is a per-element 0/1 weight, u_T a nodal field.
double target_displacement_objective(const StructuredGrid& grid, const std::vector<double>& u,
                                     const std::vector<double>& u_target,
                                     const std::vector<double>& chi);

/// Adjoint-based derivative of the misfit w.r.t. the densities. Solves the
/// adjoint system (same matrix, right-hand side -2 chi (u - u_T)) and returns
/// p (1-eta) h^{p-1} * (element cross energy of u and the adjoint).
std::vector<double> target_displacement_sensitivity(
    const StructuredGrid& grid, const DensityField& h, const MaterialModel& mat,
    const BoundaryConditions& bc, const ElasticState& state, const std::vector<double>& u_target,
    const std::vector<double>& chi, const SolveOptions& opts = {});

double volume(const StructuredGrid& grid, const DensityField& h);
std::vector<double> volume_sensitivity(const StructuredGrid& grid);

/// Per-element cross strain energy u_e . K0_e v_e with the unscaled element
/// stiffness (SIMP factor excluded, modulus scale included).
std::vector<double> element_cross_energy(const StructuredGrid& grid, const MaterialModel& mat,
                                         const std::vector<double>& u, const std::vector<double>& v,
                                         const std::vector<double>& modulus_scale = {});

}  // namespace drto
