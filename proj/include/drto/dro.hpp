#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "drto/uncertainty.hpp"

namespace drto {

/// Black-box parametric cost: xi -> (cost, design sensitivity).
/// Implementations must be safe to call concurrently on one design.
class CostOracle {
  public:
    virtual ~CostOracle() = default;
    virtual int design_size() const = 0;
    virtual double value(const std::vector<double>& design,
                         const std::vector<double>& xi) const = 0;
    /// Cost and d(cost)/d(design) in one evaluation (shared solve).
    virtual void value_and_gradient(const std::vector<double>& design,
                                    const std::vector<double>& xi, double& value,
                                    std::vector<double>& gradient) const = 0;
};

/// Wraps a pair of callables as a CostOracle (analytic costs, tests).
class FunctionCost : public CostOracle {
  public:
    using ValueFn = std::function<double(const std::vector<double>&, const std::vector<double>&)>;
    using GradFn =
        std::function<std::vector<double>(const std::vector<double>&, const std::vector<double>&)>;

    FunctionCost(int design_size, ValueFn value, GradFn gradient = nullptr)
        : n_(design_size), value_(std::move(value)), grad_(std::move(gradient)) {}

    int design_size() const override { return n_; }
    double value(const std::vector<double>& design, const std::vector<double>& xi) const override {
        return value_(design, xi);
    }
    void value_and_gradient(const std::vector<double>& design, const std::vector<double>& xi,
                            double& value, std::vector<double>& gradient) const override {
        value = value_(design, xi);
        gradient = grad_ ? grad_(design, xi) : std::vector<double>(static_cast<size_t>(n_), 0.0);
    }

  private:
    int n_;
    ValueFn value_;
    GradFn grad_;
};

struct WassersteinConfig {
    double m = 0.0;           // ball radius
    double eps = 1e-2;        // entropy weight
    ReferenceKernel kernel;   // sigma2 + parameter space
    int n_inner = 10;         // samples per nominal atom
    double lambda_min = 1e-6;
};

struct MomentConfig {
    std::vector<double> mu0;
    std::vector<std::vector<double>> sigma0;  // SPD
    double m1 = 0.0;
    double m2 = 1.0;
    double eps = 1e-2;
    int n_samples = 10;
    ParameterSpace space;
};

struct CvarConfig {
    double beta = 0.5;
    double c_threshold = 0.0;
    double gamma = 20.0;         // softplus sharpness
    WassersteinConfig wasserstein;  // DRO variant parameters
};

/// Auxiliary dual variables co-optimized with the design.
struct AugmentedPoint {
    double lambda = 1.0;
    std::vector<double> tau;                 // |tau| <= 1 (moment)
    std::vector<std::vector<double>> S;      // k x k PSD (moment)
    double alpha = 0.0;                      // CVaR anchor
};

/// Quadratic ground cost |xi - zeta|^2.
double ground_cost(const std::vector<double>& a, const std::vector<double>& b);

/// Smooth hinge t / (1 + exp(-gamma t)) and its derivative.
double softplus(double t, double gamma);
double softplus_derivative(double t, double gamma);

// ---------------------------------------------------------------------------
// Wasserstein-ball robust functional
//   D_W(h, lambda) = lambda m
//     + lambda eps sum_i p_i log( (1/n) sum_j exp((C(h,z_ij) - lambda c(xi_i,z_ij)) /
//                                                  (lambda eps)) )
// evaluated on a frozen inner sample batch (common random numbers).
// ---------------------------------------------------------------------------

double wasserstein_dual_value(const CostOracle& oracle, const std::vector<double>& design,
                              const AugmentedPoint& pt, const WassersteinConfig& cfg,
                              const NominalLaw& law, const SampleBatch& batch);

struct WassersteinGradient {
    double value = 0.0;
    std::vector<double> design_gradient;
    double dlambda = 0.0;
};

WassersteinGradient wasserstein_dual_grad(const CostOracle& oracle,
                                          const std::vector<double>& design,
                                          const AugmentedPoint& pt, const WassersteinConfig& cfg,
                                          const NominalLaw& law, const SampleBatch& batch);

/// Quadrature-mode evaluation on a 1d grid of f-values (oracle-scale checks):
/// the inner integral over nu_xi is computed with trapezoid weights.
double wasserstein_dual_value_quadrature(const std::vector<double>& f_grid,
                                         const std::vector<double>& zeta_grid, double lambda,
                                         const WassersteinConfig& cfg, const NominalLaw& law);

/// Normalized tilted conditional density alpha(xi, .) on the grid:
/// alpha = exp((f - lambda c)/(lambda eps)) / int exp(...) dnu_xi.
/// Returns one row per nominal atom. Throws if the grid is too coarse for the
/// normalization to hold to 1e-6.
std::vector<std::vector<double>> wasserstein_primal_reconstruct(
    const std::vector<double>& f_grid, const std::vector<double>& zeta_grid, double lambda,
    const WassersteinConfig& cfg, const NominalLaw& law);

// ---------------------------------------------------------------------------
// Moment-ball robust functional (Q0-sample based)
//   D_M = lambda m1 - lambda tau.mu0 + m2 S:Sigma0
//       + eps log( (1/n) sum_j exp((C + lambda tau.xi_j - S:(xi_j-mu0)^x2)/eps) )
// ---------------------------------------------------------------------------

double moment_dual_value(const CostOracle& oracle, const std::vector<double>& design,
                         const AugmentedPoint& pt, const MomentConfig& cfg,
                         const SampleBatch& batch);

struct MomentGradient {
    double value = 0.0;
    std::vector<double> design_gradient;
    double dlambda = 0.0;
    std::vector<double> dtau;
    std::vector<std::vector<double>> dS;
};

MomentGradient moment_dual_grad(const CostOracle& oracle, const std::vector<double>& design,
                                const AugmentedPoint& pt, const MomentConfig& cfg,
                                const SampleBatch& batch);

double moment_dual_value_quadrature(const std::vector<double>& f_grid,
                                    const std::vector<double>& xi_grid, double lambda, double tau,
                                    double s, const MomentConfig& cfg);

// ---------------------------------------------------------------------------
// CVaR (exact hinge) and the CVaR-DRO constraint (softened hinge)
// ---------------------------------------------------------------------------

/// alpha + mean([c - alpha]_+) / (1-beta), exact hinge.
double cvar_value(const std::vector<double>& samples, double beta, double alpha);

struct CvarMinimum {
    double cvar = 0.0;
    double alpha_star = 0.0;  // the beta-quantile
};

/// Minimizes the representation formula by sorting; the minimizer is the
/// beta-quantile of the sample.
CvarMinimum cvar_minimize(const std::vector<double>& samples, double beta);

/// Weighted-density variant on a value grid (quadrature representation).
CvarMinimum cvar_minimize_density(const std::vector<double>& values,
                                  const std::vector<double>& density_weights, double beta);

/// D_C(h, lambda, alpha) = alpha + lambda m/(1-beta)
///   + (lambda eps/(1-beta)) sum_i p_i log((1/n) sum_j exp((softplus(C-alpha)
///       - lambda c)/(lambda eps)))
double cvar_dro_constraint_value(const CostOracle& oracle, const std::vector<double>& design,
                                 const AugmentedPoint& pt, const CvarConfig& cfg,
                                 const NominalLaw& law, const SampleBatch& batch);

struct CvarDroGradient {
    double value = 0.0;
    std::vector<double> design_gradient;
    double dlambda = 0.0;
    double dalpha = 0.0;
    double exact_cvar = 0.0;  // diagnostic: exact-hinge CVaR of the sampled costs
};

CvarDroGradient cvar_dro_constraint_grad(const CostOracle& oracle,
                                         const std::vector<double>& design,
                                         const AugmentedPoint& pt, const CvarConfig& cfg,
                                         const NominalLaw& law, const SampleBatch& batch);

/// Atom weights of an empirical law (equal by default).
std::vector<double> atom_weights(const NominalLaw& law);

}  // namespace drto
