#include "drto/dro.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "drto/parallel.hpp"

namespace drto {

double ground_cost(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("ground_cost: dimension mismatch");
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return s;
}

double softplus(double t, double gamma) {
    if (!(gamma > 0.0)) throw std::invalid_argument("softplus: gamma must be > 0");
    const double gt = gamma * t;
    if (gt >= 0.0) return t / (1.0 + std::exp(-gt));
    // t < 0: t * sigmoid(gt) written with exp(gt) to avoid overflow
    const double e = std::exp(gt);
    return t * e / (1.0 + e);
}

double softplus_derivative(double t, double gamma) {
    const double gt = gamma * t;
    double sig;
    if (gt >= 0.0) sig = 1.0 / (1.0 + std::exp(-gt));
    else {
        const double e = std::exp(gt);
        sig = e / (1.0 + e);
    }
    return sig + t * gamma * sig * (1.0 - sig);
}

std::vector<double> atom_weights(const NominalLaw& law) {
    const auto& emp = law.empirical_law();
    if (!emp.weights.empty()) return emp.weights;
    return std::vector<double>(emp.atoms.size(), 1.0 / static_cast<double>(emp.atoms.size()));
}

namespace {

void check_batch(const NominalLaw& law, const SampleBatch& batch) {
    if (!law.is_empirical())
        throw std::invalid_argument("dro: nominal law must be empirical (atoms)");
    if (batch.num_atoms() != static_cast<int>(law.empirical_law().atoms.size()))
        throw std::invalid_argument("dro: sample batch does not match the nominal atoms");
    if (batch.samples_per_atom() < 1) throw std::invalid_argument("dro: empty sample batch");
}

// Cost values C(h, z_ij) for every sample of every atom, evaluated in
// parallel, reduced in fixed order by the callers.
std::vector<std::vector<double>> evaluate_costs(const CostOracle& oracle,
                                                const std::vector<double>& design,
                                                const SampleBatch& batch) {
    const int na = batch.num_atoms(), ns = batch.samples_per_atom();
    std::vector<std::vector<double>> costs(static_cast<size_t>(na),
                                           std::vector<double>(static_cast<size_t>(ns), 0.0));
    parallel_for(na * ns, [&](int idx) {
        const int i = idx / ns, j = idx % ns;
        costs[static_cast<size_t>(i)][static_cast<size_t>(j)] =
            oracle.value(design, batch.points[static_cast<size_t>(i)][static_cast<size_t>(j)]);
    });
    return costs;
}

struct CostsAndGrads {
    std::vector<std::vector<double>> costs;
    std::vector<std::vector<std::vector<double>>> grads;
};

CostsAndGrads evaluate_costs_and_grads(const CostOracle& oracle,
                                       const std::vector<double>& design,
                                       const SampleBatch& batch) {
    const int na = batch.num_atoms(), ns = batch.samples_per_atom();
    CostsAndGrads out;
    out.costs.assign(static_cast<size_t>(na), std::vector<double>(static_cast<size_t>(ns), 0.0));
    out.grads.assign(static_cast<size_t>(na),
                     std::vector<std::vector<double>>(static_cast<size_t>(ns)));
    parallel_for(na * ns, [&](int idx) {
        const int i = idx / ns, j = idx % ns;
        oracle.value_and_gradient(
            design, batch.points[static_cast<size_t>(i)][static_cast<size_t>(j)],
            out.costs[static_cast<size_t>(i)][static_cast<size_t>(j)],
            out.grads[static_cast<size_t>(i)][static_cast<size_t>(j)]);
    });
    return out;
}

// Per-atom softmax weights of exponents a_j (stable, sums to 1).
std::vector<double> softmax(const std::vector<double>& a) {
    const double m = *std::max_element(a.begin(), a.end());
    std::vector<double> w(a.size());
    double s = 0.0;
    for (size_t j = 0; j < a.size(); ++j) {
        w[j] = std::exp(a[j] - m);
        s += w[j];
    }
    for (auto& x : w) x /= s;
    return w;
}

}  // namespace

double wasserstein_dual_value(const CostOracle& oracle, const std::vector<double>& design,
                              const AugmentedPoint& pt, const WassersteinConfig& cfg,
                              const NominalLaw& law, const SampleBatch& batch) {
    check_batch(law, batch);
    if (!(pt.lambda >= cfg.lambda_min))
        throw std::invalid_argument("wasserstein dual: lambda below lambda_min");
    const auto costs = evaluate_costs(oracle, design, batch);
    const auto weights = atom_weights(law);
    const auto& atoms = law.empirical_law().atoms;
    const double le = pt.lambda * cfg.eps;

    double outer = 0.0;
    for (size_t i = 0; i < atoms.size(); ++i) {
        std::vector<double> a(costs[i].size());
        for (size_t j = 0; j < a.size(); ++j)
            a[j] = (costs[i][j] - pt.lambda * ground_cost(atoms[i], batch.points[i][j])) / le;
        outer += weights[i] * log_mean_exp(a);
    }
    return pt.lambda * cfg.m + le * outer;
}

WassersteinGradient wasserstein_dual_grad(const CostOracle& oracle,
                                          const std::vector<double>& design,
                                          const AugmentedPoint& pt, const WassersteinConfig& cfg,
                                          const NominalLaw& law, const SampleBatch& batch) {
    check_batch(law, batch);
    if (!(pt.lambda >= cfg.lambda_min))
        throw std::invalid_argument("wasserstein dual: lambda below lambda_min");
    const auto eval = evaluate_costs_and_grads(oracle, design, batch);
    const auto weights = atom_weights(law);
    const auto& atoms = law.empirical_law().atoms;
    const double le = pt.lambda * cfg.eps;

    WassersteinGradient out;
    out.design_gradient.assign(design.size(), 0.0);
    double outer = 0.0;        // sum_i p_i log_mean_exp_i
    double weighted_cost = 0.0;  // sum_i p_i sum_j w_ij C_ij
    for (size_t i = 0; i < atoms.size(); ++i) {
        std::vector<double> a(eval.costs[i].size());
        for (size_t j = 0; j < a.size(); ++j)
            a[j] = (eval.costs[i][j] - pt.lambda * ground_cost(atoms[i], batch.points[i][j])) / le;
        outer += weights[i] * log_mean_exp(a);
        const std::vector<double> w = softmax(a);
        for (size_t j = 0; j < w.size(); ++j) {
            weighted_cost += weights[i] * w[j] * eval.costs[i][j];
            const double scale = weights[i] * w[j];
            const auto& g = eval.grads[i][j];
            for (size_t e = 0; e < g.size(); ++e) out.design_gradient[e] += scale * g[e];
        }
    }
    out.value = pt.lambda * cfg.m + le * outer;
    // d/dlambda of lambda m + lambda eps sum_i p_i LME_i; the exponent is
    // C/(lambda eps) - c/eps, so lambda d(LME)/dlambda = -<w, C>/lambda.
    out.dlambda = cfg.m + cfg.eps * outer - weighted_cost / pt.lambda;
    return out;
}

namespace {

// Normalized trapezoid log-weights of nu_xi on the grid.
std::vector<double> nu_log_weights(const std::vector<double>& zeta_grid,
                                   const std::vector<double>& trap, double xi, double sigma2) {
    std::vector<double> logw(zeta_grid.size());
    for (size_t q = 0; q < zeta_grid.size(); ++q)
        logw[q] = -(zeta_grid[q] - xi) * (zeta_grid[q] - xi) / (2.0 * sigma2) +
                  std::log(trap[q]);
    // normalize: subtract log sum exp
    double m = *std::max_element(logw.begin(), logw.end());
    double s = 0.0;
    for (double v : logw) s += std::exp(v - m);
    const double lz = m + std::log(s);
    for (auto& v : logw) v -= lz;
    return logw;
}

std::vector<double> trapezoid_weights(const std::vector<double>& grid) {
    if (grid.size() < 2) throw std::invalid_argument("quadrature grid too small");
    std::vector<double> w(grid.size(), 0.0);
    for (size_t q = 0; q + 1 < grid.size(); ++q) {
        const double hq = grid[q + 1] - grid[q];
        w[q] += 0.5 * hq;
        w[q + 1] += 0.5 * hq;
    }
    return w;
}

}  // namespace

double wasserstein_dual_value_quadrature(const std::vector<double>& f_grid,
                                         const std::vector<double>& zeta_grid, double lambda,
                                         const WassersteinConfig& cfg, const NominalLaw& law) {
    if (f_grid.size() != zeta_grid.size())
        throw std::invalid_argument("quadrature: f and grid size mismatch");
    if (!(lambda >= cfg.lambda_min))
        throw std::invalid_argument("quadrature: lambda below lambda_min");
    const auto weights = atom_weights(law);
    const auto& atoms = law.empirical_law().atoms;
    const auto trap = trapezoid_weights(zeta_grid);
    const double le = lambda * cfg.eps;

    double outer = 0.0;
    for (size_t i = 0; i < atoms.size(); ++i) {
        const double xi = atoms[i][0];
        const auto logw = nu_log_weights(zeta_grid, trap, xi, cfg.kernel.sigma2);
        std::vector<double> a(f_grid.size());
        for (size_t q = 0; q < f_grid.size(); ++q) {
            const double c = (zeta_grid[q] - xi) * (zeta_grid[q] - xi);
            a[q] = (f_grid[q] - lambda * c) / le + logw[q];
        }
        double m = *std::max_element(a.begin(), a.end());
        double s = 0.0;
        for (double v : a) s += std::exp(v - m);
        outer += weights[i] * (m + std::log(s));
    }
    return lambda * cfg.m + le * outer;
}

std::vector<std::vector<double>> wasserstein_primal_reconstruct(
    const std::vector<double>& f_grid, const std::vector<double>& zeta_grid, double lambda,
    const WassersteinConfig& cfg, const NominalLaw& law) {
    if (zeta_grid.size() < 64) throw std::invalid_argument("reconstruct: grid too coarse");
    const auto& atoms = law.empirical_law().atoms;
    const auto trap = trapezoid_weights(zeta_grid);
    const double le = lambda * cfg.eps;

    std::vector<std::vector<double>> alpha(atoms.size(),
                                           std::vector<double>(zeta_grid.size(), 0.0));
    for (size_t i = 0; i < atoms.size(); ++i) {
        const double xi = atoms[i][0];
        const auto logw = nu_log_weights(zeta_grid, trap, xi, cfg.kernel.sigma2);
        std::vector<double> a(f_grid.size());
        for (size_t q = 0; q < f_grid.size(); ++q) {
            const double c = (zeta_grid[q] - xi) * (zeta_grid[q] - xi);
            a[q] = (f_grid[q] - lambda * c) / le;
        }
        // log of int exp(a) dnu
        std::vector<double> aw(a.size());
        for (size_t q = 0; q < a.size(); ++q) aw[q] = a[q] + logw[q];
        double m = *std::max_element(aw.begin(), aw.end());
        double s = 0.0;
        for (double v : aw) s += std::exp(v - m);
        const double lz = m + std::log(s);
        double check = 0.0;
        for (size_t q = 0; q < a.size(); ++q) {
            alpha[i][q] = std::exp(a[q] - lz);
            check += alpha[i][q] * std::exp(logw[q]);
        }
        if (std::abs(check - 1.0) > 1e-6)
            throw std::runtime_error("reconstruct: tilted density normalization off by " +
                                     std::to_string(std::abs(check - 1.0)) +
                                     "; refine the zeta grid");
    }
    return alpha;
}

// ---------------------------------------------------------------------------
// Moment dual
// ---------------------------------------------------------------------------

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double frobenius(const std::vector<std::vector<double>>& A,
                 const std::vector<std::vector<double>>& B) {
    double s = 0.0;
    for (size_t i = 0; i < A.size(); ++i)
        for (size_t j = 0; j < A[i].size(); ++j) s += A[i][j] * B[i][j];
    return s;
}

// S : (x-mu0) (x-mu0)^T
double s_quadratic(const std::vector<std::vector<double>>& S, const std::vector<double>& x,
                   const std::vector<double>& mu0) {
    double s = 0.0;
    for (size_t i = 0; i < S.size(); ++i)
        for (size_t j = 0; j < S.size(); ++j)
            s += S[i][j] * (x[i] - mu0[i]) * (x[j] - mu0[j]);
    return s;
}

void check_moment_point(const AugmentedPoint& pt, const MomentConfig& cfg) {
    const size_t k = cfg.mu0.size();
    if (pt.tau.size() != k || pt.S.size() != k)
        throw std::invalid_argument("moment dual: tau/S dimension mismatch");
    if (!(pt.lambda >= 0.0)) throw std::invalid_argument("moment dual: lambda must be >= 0");
    if (dot(pt.tau, pt.tau) > 1.0 + 1e-9)
        throw std::invalid_argument("moment dual: |tau| must be <= 1");
}

}  // namespace

double moment_dual_value(const CostOracle& oracle, const std::vector<double>& design,
                         const AugmentedPoint& pt, const MomentConfig& cfg,
                         const SampleBatch& batch) {
    check_moment_point(pt, cfg);
    if (batch.num_atoms() != 1 || batch.samples_per_atom() < 1)
        throw std::invalid_argument("moment dual: expects one batch of Q0 samples");
    const auto& samples = batch.points.front();
    std::vector<double> costs(samples.size(), 0.0);
    parallel_for(static_cast<int>(samples.size()), [&](int j) {
        costs[static_cast<size_t>(j)] = oracle.value(design, samples[static_cast<size_t>(j)]);
    });

    std::vector<double> b(samples.size());
    for (size_t j = 0; j < samples.size(); ++j)
        b[j] = (costs[j] + pt.lambda * dot(pt.tau, samples[j]) -
                s_quadratic(pt.S, samples[j], cfg.mu0)) /
               cfg.eps;
    return pt.lambda * cfg.m1 - pt.lambda * dot(pt.tau, cfg.mu0) +
           cfg.m2 * frobenius(pt.S, cfg.sigma0) + cfg.eps * log_mean_exp(b);
}

MomentGradient moment_dual_grad(const CostOracle& oracle, const std::vector<double>& design,
                                const AugmentedPoint& pt, const MomentConfig& cfg,
                                const SampleBatch& batch) {
    check_moment_point(pt, cfg);
    if (batch.num_atoms() != 1 || batch.samples_per_atom() < 1)
        throw std::invalid_argument("moment dual: expects one batch of Q0 samples");
    const auto& samples = batch.points.front();
    const size_t k = cfg.mu0.size();
    const size_t n = samples.size();

    std::vector<double> costs(n, 0.0);
    std::vector<std::vector<double>> grads(n);
    parallel_for(static_cast<int>(n), [&](int j) {
        oracle.value_and_gradient(design, samples[static_cast<size_t>(j)],
                                  costs[static_cast<size_t>(j)],
                                  grads[static_cast<size_t>(j)]);
    });

    std::vector<double> b(n);
    for (size_t j = 0; j < n; ++j)
        b[j] = (costs[j] + pt.lambda * dot(pt.tau, samples[j]) -
                s_quadratic(pt.S, samples[j], cfg.mu0)) /
               cfg.eps;
    const double lme = log_mean_exp(b);
    const std::vector<double> w = softmax(b);

    MomentGradient out;
    out.value = pt.lambda * cfg.m1 - pt.lambda * dot(pt.tau, cfg.mu0) +
                cfg.m2 * frobenius(pt.S, cfg.sigma0) + cfg.eps * lme;
    out.design_gradient.assign(design.size(), 0.0);
    out.dtau.assign(k, 0.0);
    out.dS.assign(k, std::vector<double>(k, 0.0));

    double mean_tau_xi = 0.0;
    std::vector<double> mean_xi(k, 0.0);
    std::vector<std::vector<double>> mean_outer(k, std::vector<double>(k, 0.0));
    for (size_t j = 0; j < n; ++j) {
        mean_tau_xi += w[j] * dot(pt.tau, samples[j]);
        for (size_t d = 0; d < k; ++d) mean_xi[d] += w[j] * samples[j][d];
        for (size_t a = 0; a < k; ++a)
            for (size_t c = 0; c < k; ++c)
                mean_outer[a][c] +=
                    w[j] * (samples[j][a] - cfg.mu0[a]) * (samples[j][c] - cfg.mu0[c]);
        for (size_t e = 0; e < design.size(); ++e)
            out.design_gradient[e] += w[j] * grads[j][e];
    }
    out.dlambda = cfg.m1 - dot(pt.tau, cfg.mu0) + mean_tau_xi;
    for (size_t d = 0; d < k; ++d)
        out.dtau[d] = pt.lambda * (mean_xi[d] - cfg.mu0[d]);
    for (size_t a = 0; a < k; ++a)
        for (size_t c = 0; c < k; ++c)
            out.dS[a][c] = cfg.m2 * cfg.sigma0[a][c] - mean_outer[a][c];
    return out;
}

double moment_dual_value_quadrature(const std::vector<double>& f_grid,
                                    const std::vector<double>& xi_grid, double lambda, double tau,
                                    double s, const MomentConfig& cfg) {
    if (cfg.mu0.size() != 1)
        throw std::invalid_argument("moment quadrature: 1d only");
    const double mu0 = cfg.mu0.front();
    const double s0sq = cfg.sigma0.front().front();
    const auto trap = trapezoid_weights(xi_grid);
    // log weights of Q0 restricted to the grid interval, normalized
    std::vector<double> logw(xi_grid.size());
    for (size_t q = 0; q < xi_grid.size(); ++q)
        logw[q] = -(xi_grid[q] - mu0) * (xi_grid[q] - mu0) / (2.0 * s0sq) + std::log(trap[q]);
    double m = *std::max_element(logw.begin(), logw.end());
    double z = 0.0;
    for (double v : logw) z += std::exp(v - m);
    const double lz = m + std::log(z);

    std::vector<double> a(f_grid.size());
    for (size_t q = 0; q < f_grid.size(); ++q)
        a[q] = (f_grid[q] + lambda * tau * xi_grid[q] -
                s * (xi_grid[q] - mu0) * (xi_grid[q] - mu0)) /
                   cfg.eps +
               logw[q] - lz;
    double ma = *std::max_element(a.begin(), a.end());
    double sa = 0.0;
    for (double v : a) sa += std::exp(v - ma);
    return lambda * cfg.m1 - lambda * tau * mu0 + cfg.m2 * s * s0sq +
           cfg.eps * (ma + std::log(sa));
}

// ---------------------------------------------------------------------------
// CVaR
// ---------------------------------------------------------------------------

double cvar_value(const std::vector<double>& samples, double beta, double alpha) {
    if (samples.empty()) throw std::invalid_argument("cvar: empty sample set");
    if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("cvar: beta outside (0,1)");
    double s = 0.0;
    for (double c : samples) s += std::max(c - alpha, 0.0);
    return alpha + s / (static_cast<double>(samples.size()) * (1.0 - beta));
}

CvarMinimum cvar_minimize(const std::vector<double>& samples, double beta) {
    if (samples.empty()) throw std::invalid_argument("cvar: empty sample set");
    if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("cvar: beta outside (0,1)");
    std::vector<double> sorted = samples;
    std::sort(sorted.begin(), sorted.end());
    // the representation formula is piecewise linear with breakpoints at the
    // samples; its minimizer is the beta-quantile, the smallest order
    // statistic whose cumulative mass reaches beta
    const size_t n = sorted.size();
    size_t q = n - 1;
    for (size_t i = 0; i < n; ++i) {
        if (static_cast<double>(i + 1) / static_cast<double>(n) >= beta - 1e-12) {
            q = i;
            break;
        }
    }
    const double alpha = sorted[q];
    return {cvar_value(samples, beta, alpha), alpha};
}

static double expected_hinge_density(const std::vector<double>& values,
                                     const std::vector<double>& density, double alpha) {
    // int [x - alpha]_+ p(x) dx, trapezoid per cell with the kink cell split
    // analytically (p linear within each cell).
    double s = 0.0;
    for (size_t q = 0; q + 1 < values.size(); ++q) {
        const double x0 = values[q], x1 = values[q + 1];
        const double p0 = density[q], p1 = density[q + 1];
        if (x1 <= alpha) continue;
        if (x0 >= alpha) {
            s += 0.5 * (x1 - x0) * ((x0 - alpha) * p0 + (x1 - alpha) * p1);
        } else {
            // kink inside the cell: exact integral of (x - alpha) p(x) over
            // [alpha, x1] for p linear on the cell
            const double t = (alpha - x0) / (x1 - x0);
            const double pa = p0 + t * (p1 - p0);
            const double w = x1 - alpha;
            s += w * w * (pa / 6.0 + p1 / 3.0);
        }
    }
    return s;
}

CvarMinimum cvar_minimize_density(const std::vector<double>& values,
                                  const std::vector<double>& density_weights, double beta) {
    if (values.size() < 2 || values.size() != density_weights.size())
        throw std::invalid_argument("cvar density: bad inputs");
    if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("cvar: beta outside (0,1)");
    // normalize the density under the trapezoid measure
    double total = 0.0;
    for (size_t q = 0; q + 1 < values.size(); ++q)
        total += 0.5 * (values[q + 1] - values[q]) * (density_weights[q] + density_weights[q + 1]);
    std::vector<double> p(density_weights);
    for (auto& v : p) v /= total;

    auto objective = [&](double alpha) {
        return alpha + expected_hinge_density(values, p, alpha) / (1.0 - beta);
    };
    // the representation formula is convex in alpha: golden-section search
    double lo = values.front(), hi = values.back();
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = objective(x1), f2 = objective(x2);
    for (int it = 0; it < 300 && hi - lo > 1e-13 * (std::abs(hi) + 1.0); ++it) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = objective(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = objective(x2);
        }
    }
    const double alpha = 0.5 * (lo + hi);
    return {objective(alpha), alpha};
}

double cvar_dro_constraint_value(const CostOracle& oracle, const std::vector<double>& design,
                                 const AugmentedPoint& pt, const CvarConfig& cfg,
                                 const NominalLaw& law, const SampleBatch& batch) {
    check_batch(law, batch);
    const auto& wcfg = cfg.wasserstein;
    if (!(pt.lambda >= wcfg.lambda_min))
        throw std::invalid_argument("cvar dro: lambda below lambda_min");
    const auto costs = evaluate_costs(oracle, design, batch);
    const auto weights = atom_weights(law);
    const auto& atoms = law.empirical_law().atoms;
    const double le = pt.lambda * wcfg.eps;
    const double inv1mb = 1.0 / (1.0 - cfg.beta);

    double outer = 0.0;
    for (size_t i = 0; i < atoms.size(); ++i) {
        std::vector<double> a(costs[i].size());
        for (size_t j = 0; j < a.size(); ++j)
            a[j] = (softplus(costs[i][j] - pt.alpha, cfg.gamma) -
                    pt.lambda * ground_cost(atoms[i], batch.points[i][j])) /
                   le;
        outer += weights[i] * log_mean_exp(a);
    }
    return pt.alpha + pt.lambda * wcfg.m * inv1mb + le * inv1mb * outer;
}

CvarDroGradient cvar_dro_constraint_grad(const CostOracle& oracle,
                                         const std::vector<double>& design,
                                         const AugmentedPoint& pt, const CvarConfig& cfg,
                                         const NominalLaw& law, const SampleBatch& batch) {
    check_batch(law, batch);
    const auto& wcfg = cfg.wasserstein;
    if (!(pt.lambda >= wcfg.lambda_min))
        throw std::invalid_argument("cvar dro: lambda below lambda_min");
    const auto eval = evaluate_costs_and_grads(oracle, design, batch);
    const auto weights = atom_weights(law);
    const auto& atoms = law.empirical_law().atoms;
    const double le = pt.lambda * wcfg.eps;
    const double inv1mb = 1.0 / (1.0 - cfg.beta);

    CvarDroGradient out;
    out.design_gradient.assign(design.size(), 0.0);
    double outer = 0.0, weighted_soft = 0.0, weighted_sprime = 0.0;
    std::vector<double> all_costs;
    for (size_t i = 0; i < atoms.size(); ++i) {
        const auto& costs = eval.costs[i];
        all_costs.insert(all_costs.end(), costs.begin(), costs.end());
        std::vector<double> a(costs.size());
        std::vector<double> soft(costs.size()), sprime(costs.size());
        for (size_t j = 0; j < a.size(); ++j) {
            soft[j] = softplus(costs[j] - pt.alpha, cfg.gamma);
            sprime[j] = softplus_derivative(costs[j] - pt.alpha, cfg.gamma);
            a[j] = (soft[j] - pt.lambda * ground_cost(atoms[i], batch.points[i][j])) / le;
        }
        outer += weights[i] * log_mean_exp(a);
        const std::vector<double> w = softmax(a);
        for (size_t j = 0; j < w.size(); ++j) {
            const double scale = weights[i] * w[j];
            weighted_soft += scale * soft[j];
            weighted_sprime += scale * sprime[j];
            for (size_t e = 0; e < design.size(); ++e)
                out.design_gradient[e] += inv1mb * scale * sprime[j] * eval.grads[i][j][e];
        }
    }
    out.value = pt.alpha + pt.lambda * wcfg.m * inv1mb + le * inv1mb * outer;
    out.dlambda = wcfg.m * inv1mb + wcfg.eps * inv1mb * outer -
                  inv1mb * weighted_soft / pt.lambda;
    out.dalpha = 1.0 - inv1mb * weighted_sprime;
    out.exact_cvar = cvar_minimize(all_costs, cfg.beta).cvar;
    return out;
}

}  // namespace drto
