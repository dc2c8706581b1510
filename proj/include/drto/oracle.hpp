#pragma once

#include <functional>
#include <vector>

#include "drto/dro.hpp"
#include "drto/sparse.hpp"

namespace drto::oracle {

/// Result of the quadrature-based primal maximization.
struct PrimalResult {
    double value = 0.0;              // best feasible int f dQ* (minus eps H for moments)
    double lambda = 0.0;             // tilt parameter attaining it
    double transport_cost = 0.0;     // W_eps(P, Q*) at the optimum (Wasserstein case)
    std::vector<double> q_density;   // Q* density on the grid
};

/// Brute-force sup of int f dQ over the entropic-Wasserstein ball, k = 1.
/// Sweeps a log grid of tilt parameters, reconstructs the closed-form tilted
/// coupling, evaluates its transport cost and the objective by trapezoid
/// quadrature, and refines the constraint boundary by bisection. Throws if no
/// tilt is feasible (radius below the feasibility threshold).
PrimalResult primal_sup_wasserstein_1d(const std::vector<double>& f_grid,
                                       const std::vector<double>& zeta_grid,
                                       const WassersteinConfig& cfg, const NominalLaw& law);

struct MomentPrimalResult {
    double value = 0.0;       // best feasible int f dQ* - eps H(Q*)
    double mean = 0.0;        // moments of Q*
    double second_central = 0.0;
    std::vector<double> q_density;
};

/// Brute-force sup of int f dQ - eps H(Q) over the moment ambiguity set,
/// k = 1: 2d progressive grid over the exponential-family tilt
/// exp((f + a xi + b xi^2)/eps) with feasibility checks on both moment
/// inequalities.
MomentPrimalResult primal_sup_moment_1d(const std::vector<double>& f_grid,
                                        const std::vector<double>& xi_grid,
                                        const MomentConfig& cfg);

/// beta-quantile then conditional tail mean, directly from the definition.
/// The discrete version splits the atom at the quantile.
double cvar_tail_average(const std::vector<double>& samples, double beta);

/// Continuous version on a value grid with a (piecewise-linear) density:
/// inverts the CDF for the quantile, then integrates the tail exactly
/// per cell.
double cvar_tail_average_density(const std::vector<double>& values,
                                 const std::vector<double>& density, double beta);

/// Central finite differences of a scalar functional.
std::vector<double> finite_difference_gradient(
    const std::function<double(const std::vector<double>&)>& functional,
    const std::vector<double>& point, double step);

/// Dense pivoted-LU solve of an assembled sparse system (validation of CG on
/// small systems); checks the residual to 1e-12.
std::vector<double> dense_solve(const SparseMatrix& A, const std::vector<double>& b);

/// Cyclic Jacobi eigensolver for symmetric matrices (independent of Eigen);
/// returns eigenvalues in descending order and matching eigenvectors as rows.
void jacobi_eigensolve(std::vector<std::vector<double>> A, std::vector<double>& eigenvalues,
                       std::vector<std::vector<double>>& eigenvectors);

}  // namespace drto::oracle
