#pragma once

#include <memory>

#include "drto/config.hpp"
#include "drto/dro.hpp"
#include "drto/fem.hpp"
#include "drto/filter.hpp"
#include "drto/kl.hpp"
#include "drto/optimizer.hpp"
#include "drto/presets.hpp"

namespace drto {

/// Parametric compliance cost on a (possibly masked) structured grid; the
/// load vector is the parameter. Densities pass through the cone filter
/// before stiffness interpolation; gradients are chained back through it.
class FemComplianceCost : public CostOracle {
  public:
    FemComplianceCost(ProblemPreset preset, MaterialModel mat,
                      std::shared_ptr<const ConeFilter> filter, SolveOptions solve_opts = {});

    int design_size() const override;
    double value(const std::vector<double>& design, const std::vector<double>& xi) const override;
    void value_and_gradient(const std::vector<double>& design, const std::vector<double>& xi,
                            double& value, std::vector<double>& gradient) const override;

    const ProblemPreset& preset() const { return preset_; }
    std::vector<double> physical_density(const std::vector<double>& design) const;

  private:
    ProblemPreset preset_;
    MaterialModel mat_;
    std::shared_ptr<const ConeFilter> filter_;
    SolveOptions solve_opts_;
};

/// Gripper cost: target-displacement misfit with small volume and compliance
/// penalties; the parameter vector drives the Karhunen-Loeve modulus field.
class TargetDisplacementCost : public CostOracle {
  public:
    TargetDisplacementCost(ProblemPreset preset, MaterialModel mat,
                           std::shared_ptr<const ConeFilter> filter,
                           std::shared_ptr<const KLBasis> basis, ModulusTransform transform,
                           double penalty_volume, double penalty_compliance,
                           SolveOptions solve_opts = {});

    int design_size() const override;
    double value(const std::vector<double>& design, const std::vector<double>& xi) const override;
    void value_and_gradient(const std::vector<double>& design, const std::vector<double>& xi,
                            double& value, std::vector<double>& gradient) const override;

  private:
    ProblemPreset preset_;
    MaterialModel mat_;
    std::shared_ptr<const ConeFilter> filter_;
    std::shared_ptr<const KLBasis> basis_;
    ModulusTransform transform_;
    double penalty_volume_;
    double penalty_compliance_;
    SolveOptions solve_opts_;
};

/// Everything needed to run one configured optimization.
struct ProblemInstance {
    RunConfig cfg;
    ProblemPreset preset;
    MaterialModel mat;
    std::shared_ptr<const ConeFilter> filter;
    std::shared_ptr<CostOracle> cost;
    ParameterSpace space;
    std::shared_ptr<const KLBasis> kl_basis;  // gripper only
    OptimizationProblem problem;
    DescentState initial;
    OptimizerConfig optimizer;
};

ProblemInstance build_instance(const RunConfig& cfg);

}  // namespace drto
