#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "drto/dro.hpp"

namespace drto {

/// Value and per-block gradients of an augmented functional
/// (h, lambda, tau, S, alpha) -> R. Blocks that a formulation does not use
/// stay empty / zero.
struct AugmentedEval {
    double value = 0.0;
    std::vector<double> grad_h;
    double dlambda = 0.0;
    std::vector<double> dtau;
    std::vector<std::vector<double>> dS;
    double dalpha = 0.0;
    double diagnostic_exact_cvar = 0.0;
};

/// The iteration index keys the per-iteration sample batch (fresh samples per
/// step; a frozen functional simply ignores it).
using AugmentedFunctional = std::function<AugmentedEval(
    const std::vector<double>& h, const AugmentedPoint& pt, std::uint64_t iteration)>;

struct EqualityConstraint {
    std::string name;
    std::function<double(const std::vector<double>&)> value;  // target 0
    std::function<std::vector<double>(const std::vector<double>&)> gradient;
};

struct InequalityConstraint {
    std::string name;
    AugmentedFunctional eval;  // active when value >= bound - tol
    double bound = 0.0;
};

struct OptimizationProblem {
    AugmentedFunctional objective;
    std::vector<EqualityConstraint> equalities;
    std::vector<InequalityConstraint> inequalities;
    // When set, auxiliary blocks follow the first inequality constraint
    // instead of the objective (CVaR formulations: the constraint is
    // minimized over its own dual variables).
    bool aux_in_constraint = false;
    bool has_lambda = false, has_tau = false, has_S = false, has_alpha = false;
    double lambda_floor = 1e-6;
    std::vector<std::uint8_t> free_design;  // empty = all free; 0 = pinned
    std::function<double(const std::vector<double>&)> volume_of;  // for the log
};

struct LogRow {
    std::uint64_t iter = 0;
    double objective = 0.0;
    double volume = 0.0;
    double lambda = 0.0;
    double alpha = 0.0;
    double step_norm = 0.0;
    double constraint = 0.0;
    double tau_norm = 0.0;
    double s_trace = 0.0;
};

using ConvergenceLog = std::vector<LogRow>;

struct DescentState {
    std::vector<double> h;
    AugmentedPoint pt;
    std::uint64_t iteration = 0;
};

struct OptimizerConfig {
    int iterations = 100;
    double step_h = 0.05;       // move limit (normalized mode) or raw step
    double step_lambda = 0.1;
    double step_tau = 0.1;
    double step_S = 0.1;
    double step_alpha = 0.1;
    double decay_t0 = 50.0;     // steps scale by 1/sqrt(1 + t/t0)
    double restore = 0.5;       // range-space restoration fraction per step
    double active_tol = 1e-3;   // inequality activation band (relative)
    bool normalized_design_step = true;
    std::function<void(const LogRow&)> on_row;  // optional streaming sink
};

/// Projections per variable block.
std::vector<double> project_density(std::vector<double> h,
                                    const std::vector<std::uint8_t>& free_design);
double project_multiplier(double lambda, double floor_value);
std::vector<double> project_unit_ball(std::vector<double> tau);
std::vector<std::vector<double>> project_psd(std::vector<std::vector<double>> S);

/// One null-space descent step: splits the design update into a null-space
/// (objective) component and a range-space (feasibility restoration)
/// component of the active constraints; auxiliary blocks take plain projected
/// gradient steps.
DescentState null_space_step(const DescentState& state, const OptimizationProblem& problem,
                             const OptimizerConfig& cfg, LogRow* row = nullptr);

struct RunResult {
    DescentState state;
    ConvergenceLog log;
};

RunResult run(const OptimizationProblem& problem, DescentState initial,
              const OptimizerConfig& cfg);

}  // namespace drto
