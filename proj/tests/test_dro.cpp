#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "drto/dro.hpp"
#include "drto/oracle.hpp"
#include "drto/rng.hpp"

using namespace drto;

namespace {

// analytic cost: C(h, xi) = sum_e h_e w_e(xi) + 0.5 |h|^2 (1 + |xi|^2)
// with w_e(xi) = sin(e + 1) + xi_0 / (e + 1); smooth in both arguments
double analytic_cost(const std::vector<double>& h, const std::vector<double>& xi) {
    double xi2 = 0.0;
    for (double x : xi) xi2 += x * x;
    double v = 0.0, h2 = 0.0;
    for (size_t e = 0; e < h.size(); ++e) {
        v += h[e] * (std::sin(static_cast<double>(e) + 1.0) + xi[0] / (static_cast<double>(e) + 1.0));
        h2 += h[e] * h[e];
    }
    return v + 0.5 * h2 * (1.0 + xi2);
}

std::vector<double> analytic_cost_grad(const std::vector<double>& h,
                                       const std::vector<double>& xi) {
    double xi2 = 0.0;
    for (double x : xi) xi2 += x * x;
    std::vector<double> g(h.size());
    for (size_t e = 0; e < h.size(); ++e)
        g[e] = std::sin(static_cast<double>(e) + 1.0) + xi[0] / (static_cast<double>(e) + 1.0) +
               h[e] * (1.0 + xi2);
    return g;
}

FunctionCost make_analytic(int n) {
    return FunctionCost(n, analytic_cost, analytic_cost_grad);
}

FunctionCost make_constant(int n, double c0) {
    return FunctionCost(n, [c0](const std::vector<double>&, const std::vector<double>&) {
        return c0;
    });
}

WassersteinConfig basic_wcfg(double m = 0.5, double eps = 0.05, double sigma2 = 0.1, int k = 1) {
    WassersteinConfig cfg;
    cfg.m = m;
    cfg.eps = eps;
    cfg.kernel = {sigma2, ParameterSpace::ball(k, 30.0)};
    cfg.n_inner = 8;
    return cfg;
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) v[static_cast<size_t>(i)] = a + (b - a) * i / (n - 1);
    return v;
}

}  // namespace

TEST_CASE("softplus: endpoints, saturation, hinge distance") {
    CHECK(softplus(0.0, 20.0) == 0.0);
    CHECK(softplus(100.0, 20.0) == doctest::Approx(100.0).epsilon(1e-12));
    CHECK(softplus(-100.0, 20.0) == doctest::Approx(0.0));
    double max_dev = 0.0;
    for (double t = -5.0; t <= 5.0; t += 1e-4)
        max_dev = std::max(max_dev, std::abs(softplus(t, 20.0) - std::max(t, 0.0)));
    CHECK(max_dev <= 0.02);

    // derivative matches finite differences away from the kink scale
    for (double t : {-2.0, -0.3, 0.1, 0.5, 3.0}) {
        const double fd = (softplus(t + 1e-6, 20.0) - softplus(t - 1e-6, 20.0)) / 2e-6;
        CHECK(softplus_derivative(t, 20.0) == doctest::Approx(fd).epsilon(1e-5));
    }
}

TEST_CASE("wasserstein dual: constant cost lower bound and the lambda_min limit") {
    const double c0 = 5.0;
    const auto cost = make_constant(2, c0);
    auto cfg = basic_wcfg(10.0, 0.05, 0.1);
    const NominalLaw law = NominalLaw::dirac({0.0});
    const SampleBatch batch = draw_inner_batch(law, cfg.kernel, 64, {3, 0});
    const std::vector<double> h = {0.5, 0.5};

    AugmentedPoint pt;
    pt.lambda = cfg.lambda_min;
    const double at_min = wasserstein_dual_value(cost, h, pt, cfg, law, batch);
    CHECK(at_min == doctest::Approx(c0).epsilon(1e-5));
    // Jensen: for m >= transport scale the dual never dips below c0
    for (double lam : {1e-6, 1e-3, 0.1, 1.0, 10.0}) {
        pt.lambda = lam;
        CHECK(wasserstein_dual_value(cost, h, pt, cfg, law, batch) >= c0 - 1e-9);
    }
}

TEST_CASE("wasserstein dual is affine in the radius m") {
    const auto cost = make_analytic(3);
    const NominalLaw law = NominalLaw::dirac({0.4});
    auto cfg = basic_wcfg(0.5);
    const SampleBatch batch = draw_inner_batch(law, cfg.kernel, 8, {4, 1});
    const std::vector<double> h = {0.2, 0.6, 0.9};
    AugmentedPoint pt;
    pt.lambda = 0.8;
    const double v1 = wasserstein_dual_value(cost, h, pt, cfg, law, batch);
    auto cfg2 = cfg;
    cfg2.m = cfg.m + 0.75;
    const double v2 = wasserstein_dual_value(cost, h, pt, cfg2, law, batch);
    CHECK(v2 - v1 == doctest::Approx(pt.lambda * 0.75).epsilon(1e-12));
}

TEST_CASE("wasserstein dual: monte carlo agrees with quadrature to 3 digits") {
    // 1-atom law, C(xi) = xi^2
    const int n = 10001;
    const auto grid = linspace(-3.0, 3.0, n);
    std::vector<double> f(grid.size());
    for (size_t q = 0; q < grid.size(); ++q) f[q] = grid[q] * grid[q];
    WassersteinConfig cfg = basic_wcfg(0.5, 0.01, 0.1);
    cfg.kernel.space = ParameterSpace::ball(1, 3.0);
    const NominalLaw law = NominalLaw::dirac({0.5});
    const FunctionCost cost(1, [](const std::vector<double>&, const std::vector<double>& xi) {
        return xi[0] * xi[0];
    });
    const SampleBatch batch = draw_inner_batch(law, cfg.kernel, 200000, {8, 0});
    const std::vector<double> h = {0.0};

    double best_mc = 1e300, best_quad = 1e300;
    for (int s = 0; s < 64; ++s) {
        const double lam = std::pow(10.0, -1.0 + 2.0 * s / 63.0);  // [0.1, 10]
        AugmentedPoint pt;
        pt.lambda = lam;
        best_mc = std::min(best_mc, wasserstein_dual_value(cost, h, pt, cfg, law, batch));
        best_quad =
            std::min(best_quad, wasserstein_dual_value_quadrature(f, grid, lam, cfg, law));
    }
    CHECK(best_mc == doctest::Approx(best_quad).epsilon(5e-4));
}

TEST_CASE("wasserstein gradient: softmax flattening, singleton, finite differences") {
    const int nel = 3;
    const auto cost = make_analytic(nel);
    const NominalLaw law = NominalLaw::empirical({{0.3}, {-0.2}});
    const std::vector<double> h = {0.3, 0.7, 0.5};

    SUBCASE("eps -> infinity flattens the weights to the plain mean") {
        auto cfg = basic_wcfg(0.5, 1e6, 0.2);
        const SampleBatch batch = draw_inner_batch(law, cfg.kernel, 16, {5, 0});
        AugmentedPoint pt;
        pt.lambda = 1.0;
        const auto g = wasserstein_dual_grad(cost, h, pt, cfg, law, batch);
        std::vector<double> mean(h.size(), 0.0);
        int count = 0;
        for (const auto& per_atom : batch.points)
            for (const auto& z : per_atom) {
                const auto cg = analytic_cost_grad(h, z);
                for (size_t e = 0; e < mean.size(); ++e) mean[e] += cg[e];
                ++count;
            }
        for (auto& v : mean) v /= count;
        for (size_t e = 0; e < mean.size(); ++e)
            CHECK(g.design_gradient[e] == doctest::Approx(mean[e]).epsilon(1e-4));
    }

    SUBCASE("single sample per atom reduces to the sampled sensitivity") {
        auto cfg = basic_wcfg();
        const SampleBatch batch = draw_inner_batch(law, cfg.kernel, 1, {6, 0});
        AugmentedPoint pt;
        pt.lambda = 0.7;
        const auto g = wasserstein_dual_grad(cost, h, pt, cfg, law, batch);
        std::vector<double> mean(h.size(), 0.0);
        for (const auto& per_atom : batch.points) {
            const auto cg = analytic_cost_grad(h, per_atom.front());
            for (size_t e = 0; e < mean.size(); ++e) mean[e] += 0.5 * cg[e];
        }
        for (size_t e = 0; e < mean.size(); ++e)
            CHECK(g.design_gradient[e] == doctest::Approx(mean[e]).epsilon(1e-12));
    }

    SUBCASE("frozen-batch finite differences in h and lambda") {
        auto cfg = basic_wcfg(0.5, 0.05, 0.15);
        const SampleBatch batch = draw_inner_batch(law, cfg.kernel, 12, {7, 2});
        AugmentedPoint pt;
        pt.lambda = 0.9;
        const auto g = wasserstein_dual_grad(cost, h, pt, cfg, law, batch);
        CHECK(g.value ==
              doctest::Approx(wasserstein_dual_value(cost, h, pt, cfg, law, batch)));

        auto value_at_h = [&](const std::vector<double>& hv) {
            return wasserstein_dual_value(cost, hv, pt, cfg, law, batch);
        };
        const auto fd = oracle::finite_difference_gradient(value_at_h, h, 1e-6);
        for (size_t e = 0; e < h.size(); ++e)
            CHECK(g.design_gradient[e] == doctest::Approx(fd[e]).epsilon(1e-4));

        AugmentedPoint pp = pt, pm = pt;
        pp.lambda += 1e-5;
        pm.lambda -= 1e-5;
        const double fd_lam = (wasserstein_dual_value(cost, h, pp, cfg, law, batch) -
                              wasserstein_dual_value(cost, h, pm, cfg, law, batch)) /
                             2e-5;
        CHECK(g.dlambda == doctest::Approx(fd_lam).epsilon(1e-4));
    }
}

TEST_CASE("wasserstein primal reconstruction") {
    const int n = 4001;
    const auto grid = linspace(-4.0, 4.0, n);
    WassersteinConfig cfg = basic_wcfg(0.5, 0.1, 0.1);
    cfg.kernel.space = ParameterSpace::ball(1, 4.0);
    const NominalLaw law = NominalLaw::dirac({0.2});
    const auto trap_weight = [&](size_t q) {
        const double h = grid[1] - grid[0];
        return (q == 0 || q + 1 == grid.size()) ? h / 2 : h;
    };
    // normalized nu density for integration
    std::vector<double> nu(grid.size());
    double z = 0.0;
    for (size_t q = 0; q < grid.size(); ++q) {
        nu[q] = std::exp(-(grid[q] - 0.2) * (grid[q] - 0.2) / (2.0 * cfg.kernel.sigma2));
        z += nu[q] * trap_weight(q);
    }
    for (auto& v : nu) v /= z;

    SUBCASE("constant f leaves only the lambda-independent ground-cost tilt") {
        // for constant f the closed form reduces to exp(-c/eps) normalized
        // against nu, independently of both the constant and lambda
        const std::vector<double> f(grid.size(), 3.0);
        const auto a1 = wasserstein_primal_reconstruct(f, grid, 1.3, cfg, law);
        const auto a2 = wasserstein_primal_reconstruct(f, grid, 0.2, cfg, law);
        std::vector<double> expected(grid.size());
        double z2 = 0.0;
        for (size_t q = 0; q < grid.size(); ++q) {
            expected[q] = std::exp(-(grid[q] - 0.2) * (grid[q] - 0.2) / cfg.eps);
            z2 += expected[q] * nu[q] * trap_weight(q);
        }
        for (auto& v : expected) v /= z2;
        for (size_t q = 0; q < grid.size(); q += 97) {
            CHECK(a1[0][q] == doctest::Approx(a2[0][q]).epsilon(1e-9));
            if (expected[q] > 1e-12)
                CHECK(a1[0][q] == doctest::Approx(expected[q]).epsilon(1e-9));
        }
    }
    SUBCASE("large lambda concentrates the tilt at the atom") {
        std::vector<double> f(grid.size());
        for (size_t q = 0; q < grid.size(); ++q) f[q] = std::sin(grid[q]);
        const auto alpha = wasserstein_primal_reconstruct(f, grid, 1e4, cfg, law);
        double mean = 0.0;
        for (size_t q = 0; q < grid.size(); ++q)
            mean += grid[q] * alpha[0][q] * nu[q] * trap_weight(q);
        CHECK(mean == doctest::Approx(0.2).epsilon(1e-3));
    }
    SUBCASE("linear f: tilted mean matches the closed-form Gaussian formula") {
        std::vector<double> f(grid.size());
        for (size_t q = 0; q < grid.size(); ++q) f[q] = grid[q];
        const double lambda = 2.0;
        const auto alpha = wasserstein_primal_reconstruct(f, grid, lambda, cfg, law);
        double mean = 0.0;
        for (size_t q = 0; q < grid.size(); ++q)
            mean += grid[q] * alpha[0][q] * nu[q] * trap_weight(q);
        // exponent: -(A)(z-xi)^2 + z/(lambda eps), A = 1/eps + 1/(2 sigma^2)
        const double A = 1.0 / cfg.eps + 1.0 / (2.0 * cfg.kernel.sigma2);
        const double expected = 0.2 + 1.0 / (2.0 * A * lambda * cfg.eps);
        CHECK(mean == doctest::Approx(expected).epsilon(1e-6));
    }
    SUBCASE("coarse grids are rejected") {
        const std::vector<double> tiny(32, 0.0);
        CHECK_THROWS_AS(
            wasserstein_primal_reconstruct(tiny, linspace(-1, 1, 32), 1.0, cfg, law),
            std::invalid_argument);
    }
}

TEST_CASE("moment dual: constant cost, affine m2 shift, gradients") {
    const int k = 2;
    MomentConfig cfg;
    cfg.mu0 = {0.1, -0.2};
    cfg.sigma0 = {{0.5, 0.1}, {0.1, 0.4}};
    cfg.m1 = 0.3;
    cfg.m2 = 1.5;
    cfg.eps = 0.05;
    cfg.space = ParameterSpace::ball(k, 40.0);
    const TruncatedGaussianLaw q0{cfg.mu0, cfg.sigma0};

    SampleBatch batch;
    batch.seed = {17, 0};
    batch.points.push_back(sample_q0(q0, cfg.space, 16, batch.seed));

    SUBCASE("constant cost at (lambda, S) = 0 returns exactly c0") {
        const auto cost = make_constant(2, 7.5);
        AugmentedPoint pt;
        pt.lambda = 0.0;
        pt.tau = {0.3, 0.1};
        pt.S = {{0.0, 0.0}, {0.0, 0.0}};
        CHECK(moment_dual_value(cost, {0.1, 0.2}, pt, cfg, batch) ==
              doctest::Approx(7.5).epsilon(1e-12));
    }
    SUBCASE("doubling m2 shifts the value by m2 S:Sigma0") {
        const auto cost = make_analytic(2);
        AugmentedPoint pt;
        pt.lambda = 0.4;
        pt.tau = {0.5, -0.2};
        pt.S = {{0.6, 0.1}, {0.1, 0.3}};
        const std::vector<double> h = {0.4, 0.6};
        const double v1 = moment_dual_value(cost, h, pt, cfg, batch);
        auto cfg2 = cfg;
        cfg2.m2 = 2.0 * cfg.m2;
        const double v2 = moment_dual_value(cost, h, pt, cfg2, batch);
        double s_sigma = 0.0;
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j)
                s_sigma += pt.S[static_cast<size_t>(i)][static_cast<size_t>(j)] *
                           cfg.sigma0[static_cast<size_t>(i)][static_cast<size_t>(j)];
        CHECK(v2 - v1 == doctest::Approx(cfg.m2 * s_sigma).epsilon(1e-12));
    }
    SUBCASE("gradients match frozen-batch finite differences in every block") {
        const auto cost = make_analytic(3);
        AugmentedPoint pt;
        pt.lambda = 0.7;
        pt.tau = {0.4, -0.3};
        pt.S = {{0.5, 0.15}, {0.15, 0.25}};
        const std::vector<double> h = {0.3, 0.8, 0.5};
        const auto g = moment_dual_grad(cost, h, pt, cfg, batch);
        CHECK(g.value == doctest::Approx(moment_dual_value(cost, h, pt, cfg, batch)));

        const auto fd_h = oracle::finite_difference_gradient(
            [&](const std::vector<double>& hv) {
                return moment_dual_value(cost, hv, pt, cfg, batch);
            },
            h, 1e-6);
        for (size_t e = 0; e < h.size(); ++e)
            CHECK(g.design_gradient[e] == doctest::Approx(fd_h[e]).epsilon(1e-4));

        AugmentedPoint pp = pt, pm = pt;
        pp.lambda += 1e-5;
        pm.lambda -= 1e-5;
        const double fd_lam = (moment_dual_value(cost, h, pp, cfg, batch) -
                               moment_dual_value(cost, h, pm, cfg, batch)) /
                              2e-5;
        CHECK(g.dlambda == doctest::Approx(fd_lam).epsilon(1e-4));

        for (int d = 0; d < k; ++d) {
            pp = pt;
            pm = pt;
            pp.tau[static_cast<size_t>(d)] += 1e-5;
            pm.tau[static_cast<size_t>(d)] -= 1e-5;
            const double fd_tau = (moment_dual_value(cost, h, pp, cfg, batch) -
                                   moment_dual_value(cost, h, pm, cfg, batch)) /
                                  2e-5;
            CHECK(g.dtau[static_cast<size_t>(d)] == doctest::Approx(fd_tau).epsilon(1e-4));
        }
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) {
                pp = pt;
                pm = pt;
                pp.S[static_cast<size_t>(i)][static_cast<size_t>(j)] += 1e-5;
                pm.S[static_cast<size_t>(i)][static_cast<size_t>(j)] -= 1e-5;
                const double fd_s = (moment_dual_value(cost, h, pp, cfg, batch) -
                                     moment_dual_value(cost, h, pm, cfg, batch)) /
                                    2e-5;
                CHECK(g.dS[static_cast<size_t>(i)][static_cast<size_t>(j)] ==
                      doctest::Approx(fd_s).epsilon(1e-4));
            }
    }
    SUBCASE("design gradient vanishes for h-independent costs") {
        const auto cost = make_constant(2, 3.0);
        AugmentedPoint pt;
        pt.lambda = 0.5;
        pt.tau = {0.2, 0.2};
        pt.S = {{0.1, 0.0}, {0.0, 0.1}};
        const auto g = moment_dual_grad(cost, {0.3, 0.4}, pt, cfg, batch);
        for (double v : g.design_gradient) CHECK(v == 0.0);
    }
    SUBCASE("tau gradient vanishes at lambda = 0") {
        const auto cost = make_analytic(2);
        AugmentedPoint pt;
        pt.lambda = 0.0;
        pt.tau = {0.0, 0.0};
        pt.S = {{0.2, 0.0}, {0.0, 0.2}};
        const auto g = moment_dual_grad(cost, {0.5, 0.5}, pt, cfg, batch);
        for (double v : g.dtau) CHECK(v == doctest::Approx(0.0));
    }
}

TEST_CASE("cvar on discrete samples") {
    const std::vector<double> s = {1.0, 2.0, 3.0, 4.0};
    SUBCASE("frozen representative value") {
        // 1d grid minimization oracle of the representation formula
        double best = 1e300;
        for (double a = 0.0; a <= 5.0; a += 1e-4) best = std::min(best, cvar_value(s, 0.5, a));
        CHECK(best == doctest::Approx(3.5).epsilon(1e-7));
        const auto m = cvar_minimize(s, 0.5);
        CHECK(m.cvar == doctest::Approx(3.5));
        CHECK(m.alpha_star == doctest::Approx(2.0));
    }
    SUBCASE("beta -> 0 recovers the sample mean") {
        const auto m = cvar_minimize(s, 1e-9);
        CHECK(m.cvar == doctest::Approx(2.5).epsilon(1e-6));
    }
    SUBCASE("constant samples have cvar = c for any beta") {
        for (double beta : {0.1, 0.5, 0.9})
            CHECK(cvar_minimize({2.0, 2.0, 2.0}, beta).cvar == doctest::Approx(2.0));
    }
    SUBCASE("VaR <= CVaR on random sample sets") {
        CounterRng rng(23, 0);
        for (int rep = 0; rep < 100; ++rep) {
            const int n = 2 + static_cast<int>(rng.next_uniform() * 20);
            std::vector<double> x(static_cast<size_t>(n));
            for (auto& v : x) v = rng.next_normal() * 3.0;
            const double beta = 0.05 + 0.9 * rng.next_uniform();
            const auto m = cvar_minimize(x, beta);
            CHECK(m.alpha_star <= m.cvar + 1e-12);
        }
    }
    SUBCASE("empty input throws") {
        CHECK_THROWS_AS(cvar_minimize({}, 0.5), std::invalid_argument);
        CHECK_THROWS_AS(cvar_value({}, 0.5, 0.0), std::invalid_argument);
    }
}

TEST_CASE("cvar-dro constraint") {
    const NominalLaw law = NominalLaw::dirac({0.0, -1.0});
    CvarConfig ccfg;
    ccfg.beta = 0.5;
    ccfg.gamma = 20.0;
    ccfg.wasserstein = basic_wcfg(0.4, 0.05, 0.05, 2);

    SUBCASE("constant cost at the optimal point returns about c0") {
        const double c0 = 4.0;
        const auto cost = make_constant(2, c0);
        auto cfg = ccfg;
        cfg.wasserstein.m = 50.0;
        const SampleBatch batch = draw_inner_batch(law, cfg.wasserstein.kernel, 32, {9, 0});
        AugmentedPoint pt;
        pt.lambda = cfg.wasserstein.lambda_min;
        pt.alpha = c0;
        const double v = cvar_dro_constraint_value(cost, {0.5, 0.5}, pt, cfg, law, batch);
        CHECK(v == doctest::Approx(c0).epsilon(1e-3));
    }
    SUBCASE("gradients match frozen-batch finite differences") {
        const auto cost = make_analytic(3);
        const std::vector<double> h = {0.4, 0.7, 0.2};
        const SampleBatch batch = draw_inner_batch(law, ccfg.wasserstein.kernel, 10, {10, 1});
        AugmentedPoint pt;
        pt.lambda = 0.6;
        pt.alpha = 1.2;
        const auto g = cvar_dro_constraint_grad(cost, h, pt, ccfg, law, batch);
        CHECK(g.value ==
              doctest::Approx(cvar_dro_constraint_value(cost, h, pt, ccfg, law, batch)));

        const auto fd_h = oracle::finite_difference_gradient(
            [&](const std::vector<double>& hv) {
                return cvar_dro_constraint_value(cost, hv, pt, ccfg, law, batch);
            },
            h, 1e-6);
        for (size_t e = 0; e < h.size(); ++e)
            CHECK(g.design_gradient[e] == doctest::Approx(fd_h[e]).epsilon(1e-4));

        AugmentedPoint pp = pt, pm = pt;
        pp.lambda += 1e-5;
        pm.lambda -= 1e-5;
        const double fd_lam =
            (cvar_dro_constraint_value(cost, h, pp, ccfg, law, batch) -
             cvar_dro_constraint_value(cost, h, pm, ccfg, law, batch)) /
            2e-5;
        CHECK(g.dlambda == doctest::Approx(fd_lam).epsilon(1e-4));

        pp = pt;
        pm = pt;
        pp.alpha += 1e-5;
        pm.alpha -= 1e-5;
        const double fd_alpha =
            (cvar_dro_constraint_value(cost, h, pp, ccfg, law, batch) -
             cvar_dro_constraint_value(cost, h, pm, ccfg, law, batch)) /
            2e-5;
        CHECK(g.dalpha == doctest::Approx(fd_alpha).epsilon(1e-4));
    }
    SUBCASE("beta -> 0, m = 0, tiny sigma approaches the nominal cost") {
        const auto cost = make_analytic(2);
        const std::vector<double> h = {0.5, 0.5};
        auto cfg = ccfg;
        cfg.beta = 0.01;
        cfg.wasserstein.m = 0.0;
        cfg.wasserstein.kernel.sigma2 = 1e-8;
        const SampleBatch batch = draw_inner_batch(law, cfg.wasserstein.kernel, 16, {12, 0});
        const double nominal = analytic_cost(h, {0.0, -1.0});
        double best = 1e300;
        for (double a = nominal - 2.0; a <= nominal + 2.0; a += 1e-3) {
            AugmentedPoint pt;
            pt.lambda = 1.0;
            pt.alpha = a;
            best = std::min(best, cvar_dro_constraint_value(cost, h, pt, cfg, law, batch));
        }
        CHECK(best == doctest::Approx(nominal).epsilon(0.05));
    }
}

TEST_CASE("dual optimum is monotone in the radius and the multiplier shrinks") {
    const auto cost = make_analytic(2);
    const NominalLaw law = NominalLaw::dirac({0.5});
    auto cfg = basic_wcfg(0.0, 0.05, 0.2);
    const SampleBatch batch = draw_inner_batch(law, cfg.kernel, 24, {14, 5});
    const std::vector<double> h = {0.6, 0.3};

    auto minimize_over_lambda = [&](double m) {
        auto c = cfg;
        c.m = m;
        double best = 1e300, best_lam = 0.0;
        for (int s = 0; s < 64; ++s) {
            const double lam = std::pow(10.0, -6.0 + 8.0 * s / 63.0);
            AugmentedPoint pt;
            pt.lambda = lam;
            const double v = wasserstein_dual_value(cost, h, pt, c, law, batch);
            if (v < best) {
                best = v;
                best_lam = lam;
            }
        }
        return std::pair<double, double>(best, best_lam);
    };

    double prev = -1e300;
    for (double m : {0.0, 0.5, 1.0, 2.0, 5.0}) {
        const auto [v, lam] = minimize_over_lambda(m);
        CHECK(v >= prev - 1e-12);
        prev = v;
    }
    CHECK(minimize_over_lambda(100.0).second <= minimize_over_lambda(0.0).second);
}

TEST_CASE("lambda below the floor is rejected") {
    const auto cost = make_constant(1, 1.0);
    const NominalLaw law = NominalLaw::dirac({0.0});
    auto cfg = basic_wcfg();
    const SampleBatch batch = draw_inner_batch(law, cfg.kernel, 4, {15, 0});
    AugmentedPoint pt;
    pt.lambda = 1e-9;
    CHECK_THROWS_AS(wasserstein_dual_value(cost, {0.5}, pt, cfg, law, batch),
                    std::invalid_argument);
}
