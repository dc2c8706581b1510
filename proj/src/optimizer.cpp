#include "drto/optimizer.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace drto {

std::vector<double> project_density(std::vector<double> h,
                                    const std::vector<std::uint8_t>& free_design) {
    for (size_t e = 0; e < h.size(); ++e) {
        if (!free_design.empty() && !free_design[e]) {
            h[e] = 0.0;
            continue;
        }
        h[e] = std::clamp(h[e], 0.0, 1.0);
    }
    return h;
}

double project_multiplier(double lambda, double floor_value) {
    return std::max(lambda, floor_value);
}

std::vector<double> project_unit_ball(std::vector<double> tau) {
    double n2 = 0.0;
    for (double t : tau) n2 += t * t;
    if (n2 > 1.0) {
        const double s = 1.0 / std::sqrt(n2);
        for (auto& t : tau) t *= s;
    }
    return tau;
}

std::vector<std::vector<double>> project_psd(std::vector<std::vector<double>> S) {
    const int k = static_cast<int>(S.size());
    if (k == 0) return S;
    Eigen::MatrixXd M(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) M(i, j) = 0.5 * (S[i][j] + S[j][i]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
    Eigen::VectorXd d = es.eigenvalues().cwiseMax(0.0);
    Eigen::MatrixXd P = es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) S[i][j] = P(i, j);
    return S;
}

namespace {

double decayed(double base, std::uint64_t t, double t0) {
    return base / std::sqrt(1.0 + static_cast<double>(t) / t0);
}

void mask_pinned(std::vector<double>& v, const std::vector<std::uint8_t>& free_design) {
    if (free_design.empty()) return;
    for (size_t e = 0; e < v.size(); ++e)
        if (!free_design[e]) v[e] = 0.0;
}

}  // namespace

DescentState null_space_step(const DescentState& state, const OptimizationProblem& problem,
                             const OptimizerConfig& cfg, LogRow* row) {
    DescentState next = state;
    const std::uint64_t t = state.iteration;

    const AugmentedEval obj = problem.objective(state.h, state.pt, t);

    // evaluate inequalities and decide the active set
    std::vector<AugmentedEval> ineq_evals;
    std::vector<int> active;
    const AugmentedEval* aux_source = &obj;
    for (size_t c = 0; c < problem.inequalities.size(); ++c) {
        const auto& con = problem.inequalities[c];
        ineq_evals.push_back(con.eval(state.h, state.pt, t));
        const double scale = std::max(1.0, std::abs(con.bound));
        if (ineq_evals.back().value >= con.bound - cfg.active_tol * scale)
            active.push_back(static_cast<int>(c));
    }
    if (problem.aux_in_constraint && !ineq_evals.empty()) aux_source = &ineq_evals.front();

    // constraint rows: equalities (residual g) and active inequalities
    // (residual value - bound)
    std::vector<std::vector<double>> rows;
    std::vector<double> residuals;
    for (const auto& eq : problem.equalities) {
        rows.push_back(eq.gradient(state.h));
        residuals.push_back(eq.value(state.h));
    }
    for (int c : active) {
        rows.push_back(ineq_evals[static_cast<size_t>(c)].grad_h);
        residuals.push_back(ineq_evals[static_cast<size_t>(c)].value -
                            problem.inequalities[static_cast<size_t>(c)].bound);
    }
    std::vector<double> grad_obj = obj.grad_h;
    mask_pinned(grad_obj, problem.free_design);
    for (auto& r : rows) mask_pinned(r, problem.free_design);

    // null-space projection xi_J and range-space restoration xi_C
    std::vector<double> xi_J = grad_obj;
    std::vector<double> xi_C(state.h.size(), 0.0);
    if (!rows.empty()) {
        const int nc = static_cast<int>(rows.size());
        Eigen::MatrixXd gram(nc, nc);
        Eigen::VectorXd gj(nc), res(nc);
        for (int a = 0; a < nc; ++a) {
            res(a) = residuals[static_cast<size_t>(a)];
            double s = 0.0;
            for (size_t e = 0; e < state.h.size(); ++e)
                s += rows[static_cast<size_t>(a)][e] * grad_obj[e];
            gj(a) = s;
            for (int b = 0; b <= a; ++b) {
                double g = 0.0;
                for (size_t e = 0; e < state.h.size(); ++e)
                    g += rows[static_cast<size_t>(a)][e] * rows[static_cast<size_t>(b)][e];
                gram(a, b) = g;
                gram(b, a) = g;
            }
        }
        if (!(gram.diagonal().minCoeff() > 0.0))
            throw std::runtime_error("null_space_step: a constraint gradient vanishes");
        const Eigen::VectorXd mu = gram.ldlt().solve(gj);
        const Eigen::VectorXd nu = gram.ldlt().solve(res);
        for (size_t e = 0; e < state.h.size(); ++e) {
            double pj = 0.0, pc = 0.0;
            for (int a = 0; a < nc; ++a) {
                pj += mu(a) * rows[static_cast<size_t>(a)][e];
                pc += nu(a) * rows[static_cast<size_t>(a)][e];
            }
            xi_J[e] -= pj;
            xi_C[e] = pc;
        }
    }

    // design update: -alpha_J xi_J - alpha_C xi_C
    double alpha_J = decayed(cfg.step_h, t, cfg.decay_t0);
    if (cfg.normalized_design_step) {
        double mx = 0.0;
        for (double v : xi_J) mx = std::max(mx, std::abs(v));
        alpha_J = (mx > 1e-300) ? alpha_J / mx : 0.0;
    }
    double step_norm = 0.0;
    for (size_t e = 0; e < state.h.size(); ++e) {
        const double d = -alpha_J * xi_J[e] - cfg.restore * xi_C[e];
        next.h[e] += d;
        step_norm += d * d;
    }
    next.h = project_density(std::move(next.h), problem.free_design);

    // auxiliary blocks: plain projected gradient on their owning functional
    if (problem.has_lambda) {
        next.pt.lambda -= decayed(cfg.step_lambda, t, cfg.decay_t0) * aux_source->dlambda;
        next.pt.lambda = project_multiplier(next.pt.lambda, problem.lambda_floor);
    }
    if (problem.has_tau && !aux_source->dtau.empty()) {
        for (size_t i = 0; i < next.pt.tau.size(); ++i)
            next.pt.tau[i] -= decayed(cfg.step_tau, t, cfg.decay_t0) * aux_source->dtau[i];
        next.pt.tau = project_unit_ball(std::move(next.pt.tau));
    }
    if (problem.has_S && !aux_source->dS.empty()) {
        for (size_t i = 0; i < next.pt.S.size(); ++i)
            for (size_t j = 0; j < next.pt.S[i].size(); ++j)
                next.pt.S[i][j] -= decayed(cfg.step_S, t, cfg.decay_t0) * aux_source->dS[i][j];
        next.pt.S = project_psd(std::move(next.pt.S));
    }
    if (problem.has_alpha) {
        next.pt.alpha -= decayed(cfg.step_alpha, t, cfg.decay_t0) * aux_source->dalpha;
    }
    next.iteration = state.iteration + 1;

    if (row) {
        row->iter = t;
        row->objective = obj.value;
        row->volume = problem.volume_of ? problem.volume_of(state.h) : 0.0;
        row->lambda = state.pt.lambda;
        row->alpha = state.pt.alpha;
        row->step_norm = std::sqrt(step_norm);
        row->constraint = ineq_evals.empty() ? 0.0 : ineq_evals.front().value;
        double tn = 0.0;
        for (double v : state.pt.tau) tn += v * v;
        row->tau_norm = std::sqrt(tn);
        double tr = 0.0;
        for (size_t i = 0; i < state.pt.S.size(); ++i) tr += state.pt.S[i][i];
        row->s_trace = tr;
    }
    return next;
}

RunResult run(const OptimizationProblem& problem, DescentState initial,
              const OptimizerConfig& cfg) {
    if (cfg.iterations < 1) throw std::invalid_argument("optimizer: iterations must be >= 1");
    RunResult result;
    result.state = std::move(initial);
    result.log.reserve(static_cast<size_t>(cfg.iterations));
    for (int it = 0; it < cfg.iterations; ++it) {
        LogRow row;
        result.state = null_space_step(result.state, problem, cfg, &row);
        result.log.push_back(row);
        if (cfg.on_row) cfg.on_row(row);
    }
    return result;
}

}  // namespace drto
