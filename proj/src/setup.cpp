#include "drto/setup.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace drto {

FemComplianceCost::FemComplianceCost(ProblemPreset preset, MaterialModel mat,
                                     std::shared_ptr<const ConeFilter> filter,
                                     SolveOptions solve_opts)
    : preset_(std::move(preset)), mat_(mat), filter_(std::move(filter)),
      solve_opts_(std::move(solve_opts)) {}

int FemComplianceCost::design_size() const { return preset_.grid.num_elements(); }

std::vector<double> FemComplianceCost::physical_density(
    const std::vector<double>& design) const {
    return filter_ ? filter_->apply(design) : design;
}

double FemComplianceCost::value(const std::vector<double>& design,
                                const std::vector<double>& xi) const {
    const DensityField h(physical_density(design));
    const ElasticState state = solve_displacement(preset_.grid, h, mat_, preset_.bc, xi,
                                                  solve_opts_);
    return compliance(preset_.bc, xi, state);
}

void FemComplianceCost::value_and_gradient(const std::vector<double>& design,
                                           const std::vector<double>& xi, double& value,
                                           std::vector<double>& gradient) const {
    const DensityField h(physical_density(design));
    const ElasticState state = solve_displacement(preset_.grid, h, mat_, preset_.bc, xi,
                                                  solve_opts_);
    value = compliance(preset_.bc, xi, state);
    gradient = compliance_sensitivity(preset_.grid, h, mat_, state);
    if (filter_) gradient = filter_->chain(gradient);
}

TargetDisplacementCost::TargetDisplacementCost(ProblemPreset preset, MaterialModel mat,
                                               std::shared_ptr<const ConeFilter> filter,
                                               std::shared_ptr<const KLBasis> basis,
                                               ModulusTransform transform, double penalty_volume,
                                               double penalty_compliance, SolveOptions solve_opts)
    : preset_(std::move(preset)), mat_(mat), filter_(std::move(filter)),
      basis_(std::move(basis)), transform_(transform), penalty_volume_(penalty_volume),
      penalty_compliance_(penalty_compliance), solve_opts_(std::move(solve_opts)) {}

int TargetDisplacementCost::design_size() const { return preset_.grid.num_elements(); }

double TargetDisplacementCost::value(const std::vector<double>& design,
                                     const std::vector<double>& xi) const {
    const DensityField h(filter_ ? filter_->apply(design) : design);
    SolveOptions opts = solve_opts_;
    opts.modulus_scale = realize_modulus(*basis_, transform_, xi);
    const ElasticState state =
        solve_displacement(preset_.grid, h, mat_, preset_.bc, preset_.fixed_loads, opts);
    double v = target_displacement_objective(preset_.grid, state.u, preset_.u_target,
                                             preset_.chi);
    if (penalty_compliance_ != 0.0)
        v += penalty_compliance_ * compliance(preset_.bc, preset_.fixed_loads, state);
    if (penalty_volume_ != 0.0) v += penalty_volume_ * volume(preset_.grid, h);
    return v;
}

void TargetDisplacementCost::value_and_gradient(const std::vector<double>& design,
                                                const std::vector<double>& xi, double& value,
                                                std::vector<double>& gradient) const {
    const DensityField h(filter_ ? filter_->apply(design) : design);
    SolveOptions opts = solve_opts_;
    opts.modulus_scale = realize_modulus(*basis_, transform_, xi);
    const ElasticState state =
        solve_displacement(preset_.grid, h, mat_, preset_.bc, preset_.fixed_loads, opts);
    value = target_displacement_objective(preset_.grid, state.u, preset_.u_target, preset_.chi);
    gradient = target_displacement_sensitivity(preset_.grid, h, mat_, preset_.bc, state,
                                               preset_.u_target, preset_.chi, opts);
    if (penalty_compliance_ != 0.0) {
        value += penalty_compliance_ * compliance(preset_.bc, preset_.fixed_loads, state);
        const std::vector<double> cg =
            compliance_sensitivity(preset_.grid, h, mat_, state, opts.modulus_scale);
        for (size_t e = 0; e < gradient.size(); ++e) gradient[e] += penalty_compliance_ * cg[e];
    }
    if (penalty_volume_ != 0.0) {
        value += penalty_volume_ * volume(preset_.grid, h);
        const double cell = preset_.grid.hx() * preset_.grid.hy();
        for (auto& g : gradient) g += penalty_volume_ * cell;
    }
    if (filter_) gradient = filter_->chain(gradient);
}

namespace {

std::vector<double> masked_cell_gradient(const ProblemPreset& preset) {
    const double cell = preset.grid.hx() * preset.grid.hy();
    std::vector<double> g(static_cast<size_t>(preset.grid.num_elements()), cell);
    for (int e = 0; e < preset.grid.num_elements(); ++e)
        if (!preset.mask.is_active(e)) g[static_cast<size_t>(e)] = 0.0;
    return g;
}

double max_abs_atom(const NominalLaw& law) {
    double m = 0.0;
    if (law.is_empirical()) {
        for (const auto& a : law.empirical_law().atoms)
            for (double v : a) m = std::max(m, std::abs(v));
    } else {
        for (double v : law.gaussian_law().mean) m = std::max(m, std::abs(v));
    }
    return m;
}

AugmentedEval from_wasserstein(const WassersteinGradient& g) {
    AugmentedEval ev;
    ev.value = g.value;
    ev.grad_h = g.design_gradient;
    ev.dlambda = g.dlambda;
    return ev;
}

AugmentedEval from_moment(const MomentGradient& g) {
    AugmentedEval ev;
    ev.value = g.value;
    ev.grad_h = g.design_gradient;
    ev.dlambda = g.dlambda;
    ev.dtau = g.dtau;
    ev.dS = g.dS;
    return ev;
}

}  // namespace

ProblemInstance build_instance(const RunConfig& cfg) {
    ProblemInstance inst;
    inst.cfg = cfg;
    inst.preset = make_preset(cfg.preset, cfg.nx, cfg.ny, cfg.patch_fraction, cfg.kl_modes);
    if (cfg.volume_target >= 0.0) inst.preset.volume_target = cfg.volume_target;

    inst.mat.E = cfg.young_modulus;
    inst.mat.nu = cfg.poisson_ratio;
    inst.mat.eta = cfg.eta;
    inst.mat.p = cfg.simp_p;
    inst.mat.validate();

    const StructuredGrid& grid = inst.preset.grid;
    if (cfg.filter_radius_factor > 0.0) {
        const double r = cfg.filter_radius_factor * std::max(grid.hx(), grid.hy());
        inst.filter = std::make_shared<ConeFilter>(grid, r, inst.preset.mask);
    }

    // parameter space: ball of radius R (auto: 10 (sigma + max |atom|))
    const int k = inst.preset.parameter_dim;
    double radius = cfg.xi_radius;
    if (radius <= 0.0) {
        const double sigma = std::sqrt(std::max(cfg.sigma2, cfg.law_sigma2));
        radius = 10.0 * (sigma + std::max(1.0, max_abs_atom(inst.preset.nominal)));
    }
    inst.space = ParameterSpace::ball(k, radius);

    // cost oracle
    if (inst.preset.target_displacement) {
        CovarianceSpec cov{cfg.kl_amplitude, cfg.kl_correlation_length};
        inst.kl_basis =
            std::make_shared<KLBasis>(build_kl_basis(grid, cov, cfg.kl_modes));
        if (inst.kl_basis->num_modes() < cfg.kl_modes)
            throw std::runtime_error("setup: KL basis truncated below the requested modes");
        inst.cost = std::make_shared<TargetDisplacementCost>(
            inst.preset, inst.mat, inst.filter, inst.kl_basis, ModulusTransform{},
            cfg.penalty_volume, cfg.penalty_compliance);
    } else {
        inst.cost = std::make_shared<FemComplianceCost>(inst.preset, inst.mat, inst.filter);
    }

    // free-design mask and uniform feasible start
    OptimizationProblem& prob = inst.problem;
    prob.free_design.assign(static_cast<size_t>(grid.num_elements()), 1);
    int n_active = 0;
    for (int e = 0; e < grid.num_elements(); ++e) {
        if (!inst.preset.mask.is_active(e)) prob.free_design[static_cast<size_t>(e)] = 0;
        else ++n_active;
    }
    const double active_area = grid.hx() * grid.hy() * n_active;
    const double h0 = std::clamp(inst.preset.volume_target / active_area, 0.0, 1.0);
    inst.initial.h.assign(static_cast<size_t>(grid.num_elements()), 0.0);
    for (int e = 0; e < grid.num_elements(); ++e)
        if (inst.preset.mask.is_active(e)) inst.initial.h[static_cast<size_t>(e)] = h0;

    // volume of the physical (filtered) density, used by the constraint and
    // the log
    auto filter = inst.filter;
    auto preset_copy = inst.preset;
    auto volume_of = [filter, preset_copy](const std::vector<double>& h) {
        const std::vector<double> hf = filter ? filter->apply(h) : h;
        double v = 0.0;
        for (int e = 0; e < preset_copy.grid.num_elements(); ++e)
            v += hf[static_cast<size_t>(e)];
        return v * preset_copy.grid.hx() * preset_copy.grid.hy();
    };
    prob.volume_of = volume_of;

    const bool volume_constrained =
        cfg.volume_constraint && inst.preset.volume_constraint_default;
    const bool cvar_mode =
        cfg.formulation == Formulation::Cvar || cfg.formulation == Formulation::CvarDro;
    if (volume_constrained && !cvar_mode) {
        EqualityConstraint eq;
        eq.name = "volume";
        const double vt = inst.preset.volume_target;
        eq.value = [volume_of, vt](const std::vector<double>& h) { return volume_of(h) - vt; };
        auto grad = masked_cell_gradient(inst.preset);
        eq.gradient = [filter, grad](const std::vector<double>&) {
            return filter ? filter->chain(grad) : grad;
        };
        prob.equalities.push_back(std::move(eq));
    }

    // shared pieces for the probabilistic formulations
    std::shared_ptr<CostOracle> cost = inst.cost;
    const NominalLaw nominal = inst.preset.nominal;
    const ParameterSpace space = inst.space;
    const std::uint64_t seed = cfg.seed;
    prob.lambda_floor = cfg.lambda_min;

    switch (cfg.formulation) {
        case Formulation::Deterministic: {
            const std::vector<double> xi0 = inst.preset.xi_nominal;
            prob.objective = [cost, xi0](const std::vector<double>& h, const AugmentedPoint&,
                                         std::uint64_t) {
                AugmentedEval ev;
                cost->value_and_gradient(h, xi0, ev.value, ev.grad_h);
                return ev;
            };
            break;
        }
        case Formulation::Mean: {
            if (nominal.is_empirical()) {
                const auto atoms = nominal.empirical_law().atoms;
                const auto weights = atom_weights(nominal);
                prob.objective = [cost, atoms, weights](const std::vector<double>& h,
                                                        const AugmentedPoint&, std::uint64_t) {
                    AugmentedEval ev;
                    ev.grad_h.assign(h.size(), 0.0);
                    for (size_t i = 0; i < atoms.size(); ++i) {
                        double v;
                        std::vector<double> g;
                        cost->value_and_gradient(h, atoms[i], v, g);
                        ev.value += weights[i] * v;
                        for (size_t e = 0; e < g.size(); ++e)
                            ev.grad_h[e] += weights[i] * g[e];
                    }
                    return ev;
                };
            } else {
                const auto gauss = nominal.gaussian_law();
                const int n = cfg.n_samples;
                prob.objective = [cost, gauss, space, n, seed](const std::vector<double>& h,
                                                               const AugmentedPoint&,
                                                               std::uint64_t iter) {
                    const auto samples = sample_q0(gauss, space, n, {seed, iter});
                    AugmentedEval ev;
                    ev.grad_h.assign(h.size(), 0.0);
                    for (const auto& xi : samples) {
                        double v;
                        std::vector<double> g;
                        cost->value_and_gradient(h, xi, v, g);
                        ev.value += v / n;
                        for (size_t e = 0; e < g.size(); ++e) ev.grad_h[e] += g[e] / n;
                    }
                    return ev;
                };
            }
            break;
        }
        case Formulation::Wasserstein: {
            WassersteinConfig wcfg;
            wcfg.m = cfg.m;
            wcfg.eps = cfg.eps;
            wcfg.kernel = {cfg.sigma2, space};
            wcfg.n_inner = cfg.n_inner;
            wcfg.lambda_min = cfg.lambda_min;
            prob.has_lambda = true;
            prob.objective = [cost, wcfg, nominal, seed](const std::vector<double>& h,
                                                         const AugmentedPoint& pt,
                                                         std::uint64_t iter) {
                const SampleBatch batch =
                    draw_inner_batch(nominal, wcfg.kernel, wcfg.n_inner, {seed, iter});
                return from_wasserstein(
                    wasserstein_dual_grad(*cost, h, pt, wcfg, nominal, batch));
            };
            break;
        }
        case Formulation::Moment: {
            MomentConfig mcfg;
            mcfg.mu0 = inst.preset.xi_nominal;
            mcfg.sigma0.assign(static_cast<size_t>(k), std::vector<double>(k, 0.0));
            for (int i = 0; i < k; ++i)
                mcfg.sigma0[static_cast<size_t>(i)][static_cast<size_t>(i)] = cfg.law_sigma2;
            mcfg.m1 = cfg.m1;
            mcfg.m2 = cfg.m2;
            mcfg.eps = cfg.eps;
            mcfg.n_samples = cfg.n_samples;
            mcfg.space = space;
            prob.has_lambda = true;
            prob.has_tau = true;
            prob.has_S = true;
            prob.lambda_floor = 0.0;  // the moment dual is regular at lambda = 0
            const TruncatedGaussianLaw q0{mcfg.mu0, mcfg.sigma0};
            prob.objective = [cost, mcfg, q0, space, seed](const std::vector<double>& h,
                                                           const AugmentedPoint& pt,
                                                           std::uint64_t iter) {
                SampleBatch batch;
                batch.seed = {seed, iter};
                batch.points.push_back(sample_q0(q0, space, mcfg.n_samples, batch.seed));
                return from_moment(moment_dual_grad(*cost, h, pt, mcfg, batch));
            };
            break;
        }
        case Formulation::Cvar: {
            const TruncatedGaussianLaw p_law{inst.preset.xi_nominal,
                                             [&] {
                                                 std::vector<std::vector<double>> c(
                                                     static_cast<size_t>(k),
                                                     std::vector<double>(k, 0.0));
                                                 for (int i = 0; i < k; ++i)
                                                     c[static_cast<size_t>(i)]
                                                      [static_cast<size_t>(i)] = cfg.law_sigma2;
                                                 return c;
                                             }()};
            const double beta = cfg.beta, gamma = cfg.gamma;
            const int n = cfg.n_samples;
            InequalityConstraint con;
            con.name = "cvar";
            con.bound = cfg.c_threshold;
            con.eval = [cost, p_law, space, n, seed, beta, gamma](
                           const std::vector<double>& h, const AugmentedPoint& pt,
                           std::uint64_t iter) {
                const auto samples = sample_q0(p_law, space, n, {seed, iter});
                AugmentedEval ev;
                ev.grad_h.assign(h.size(), 0.0);
                double mean_soft = 0.0, mean_sprime = 0.0;
                std::vector<double> costs(samples.size());
                for (size_t s = 0; s < samples.size(); ++s) {
                    double v;
                    std::vector<double> g;
                    cost->value_and_gradient(h, samples[s], v, g);
                    costs[s] = v;
                    const double sp = softplus(v - pt.alpha, gamma);
                    const double spd = softplus_derivative(v - pt.alpha, gamma);
                    mean_soft += sp / static_cast<double>(samples.size());
                    mean_sprime += spd / static_cast<double>(samples.size());
                    for (size_t e = 0; e < g.size(); ++e)
                        ev.grad_h[e] += spd * g[e] /
                                        (static_cast<double>(samples.size()) * (1.0 - beta));
                }
                ev.value = pt.alpha + mean_soft / (1.0 - beta);
                ev.dalpha = 1.0 - mean_sprime / (1.0 - beta);
                ev.diagnostic_exact_cvar = cvar_minimize(costs, beta).cvar;
                return ev;
            };
            prob.inequalities.push_back(std::move(con));
            prob.aux_in_constraint = true;
            prob.has_alpha = true;
            prob.objective = [volume_of, filter, grad = masked_cell_gradient(inst.preset)](
                                 const std::vector<double>& h, const AugmentedPoint&,
                                 std::uint64_t) {
                AugmentedEval ev;
                ev.value = volume_of(h);
                ev.grad_h = filter ? filter->chain(grad) : grad;
                return ev;
            };
            break;
        }
        case Formulation::CvarDro: {
            CvarConfig ccfg;
            ccfg.beta = cfg.beta;
            ccfg.c_threshold = cfg.c_threshold;
            ccfg.gamma = cfg.gamma;
            ccfg.wasserstein.m = cfg.m;
            ccfg.wasserstein.eps = cfg.eps;
            ccfg.wasserstein.kernel = {cfg.sigma2, space};
            ccfg.wasserstein.n_inner = cfg.n_inner;
            ccfg.wasserstein.lambda_min = cfg.lambda_min;
            InequalityConstraint con;
            con.name = "cvar_dro";
            con.bound = cfg.c_threshold;
            con.eval = [cost, ccfg, nominal, seed](const std::vector<double>& h,
                                                   const AugmentedPoint& pt,
                                                   std::uint64_t iter) {
                const SampleBatch batch = draw_inner_batch(nominal, ccfg.wasserstein.kernel,
                                                           ccfg.wasserstein.n_inner,
                                                           {seed, iter});
                const CvarDroGradient g =
                    cvar_dro_constraint_grad(*cost, h, pt, ccfg, nominal, batch);
                AugmentedEval ev;
                ev.value = g.value;
                ev.grad_h = g.design_gradient;
                ev.dlambda = g.dlambda;
                ev.dalpha = g.dalpha;
                ev.diagnostic_exact_cvar = g.exact_cvar;
                return ev;
            };
            prob.inequalities.push_back(std::move(con));
            prob.aux_in_constraint = true;
            prob.has_lambda = true;
            prob.has_alpha = true;
            prob.objective = [volume_of, filter, grad = masked_cell_gradient(inst.preset)](
                                 const std::vector<double>& h, const AugmentedPoint&,
                                 std::uint64_t) {
                AugmentedEval ev;
                ev.value = volume_of(h);
                ev.grad_h = filter ? filter->chain(grad) : grad;
                return ev;
            };
            break;
        }
    }

    // initial auxiliary point
    inst.initial.pt.lambda = 1.0;
    inst.initial.pt.tau.assign(prob.has_tau ? static_cast<size_t>(k) : 0, 0.0);
    if (prob.has_S)
        inst.initial.pt.S.assign(static_cast<size_t>(k), std::vector<double>(k, 0.0));
    if (prob.has_alpha) {
        // alpha starts at the sample-median cost of the initial design
        std::vector<double> samples_costs;
        const int n0 = std::max(3, cfg.n_samples);
        std::vector<std::vector<double>> pts;
        if (cfg.formulation == Formulation::CvarDro) {
            const SampleBatch b = draw_inner_batch(nominal, {cfg.sigma2, space}, n0, {seed, 0});
            for (const auto& per_atom : b.points)
                pts.insert(pts.end(), per_atom.begin(), per_atom.end());
        } else {
            const TruncatedGaussianLaw p_law{
                inst.preset.xi_nominal, [&] {
                    std::vector<std::vector<double>> c(static_cast<size_t>(k),
                                                       std::vector<double>(k, 0.0));
                    for (int i = 0; i < k; ++i)
                        c[static_cast<size_t>(i)][static_cast<size_t>(i)] = cfg.law_sigma2;
                    return c;
                }()};
            pts = sample_q0(p_law, space, n0, {seed, 0});
        }
        for (const auto& xi : pts) samples_costs.push_back(cost->value(inst.initial.h, xi));
        std::sort(samples_costs.begin(), samples_costs.end());
        inst.initial.pt.alpha = samples_costs[samples_costs.size() / 2];
    }

    inst.optimizer.iterations = cfg.iterations;
    inst.optimizer.step_h = cfg.step_h;
    inst.optimizer.step_lambda = cfg.step_lambda;
    inst.optimizer.step_tau = cfg.step_tau;
    inst.optimizer.step_S = cfg.step_s;
    inst.optimizer.step_alpha = cfg.step_alpha;
    inst.optimizer.decay_t0 = cfg.decay_t0;
    inst.optimizer.restore = cfg.restore;
    inst.optimizer.active_tol = cfg.active_tol;
    return inst;
}

}  // namespace drto
