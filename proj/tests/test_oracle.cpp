#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "drto/dro.hpp"
#include "drto/oracle.hpp"
#include "drto/rng.hpp"

using namespace drto;

namespace {

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) v[static_cast<size_t>(i)] = a + (b - a) * i / (n - 1);
    return v;
}

WassersteinConfig wcfg_1d(double m, double eps, double sigma2, double R = 3.0) {
    WassersteinConfig cfg;
    cfg.m = m;
    cfg.eps = eps;
    cfg.kernel = {sigma2, ParameterSpace::ball(1, R)};
    return cfg;
}

// two-stage 64-point lambda-grid minimization of the quadrature dual
double dual_min_64(const std::vector<double>& f, const std::vector<double>& grid,
                   const WassersteinConfig& cfg, const NominalLaw& law) {
    double best = 1e300, best_lam = 1.0;
    for (int s = 0; s < 64; ++s) {
        const double lam = std::pow(10.0, -4.0 + 7.0 * s / 63.0);
        const double v = wasserstein_dual_value_quadrature(f, grid, lam, cfg, law);
        if (v < best) {
            best = v;
            best_lam = lam;
        }
    }
    for (int s = 0; s < 64; ++s) {
        const double lam = best_lam * std::pow(3.0, -1.0 + 2.0 * s / 63.0);
        best = std::min(best, wasserstein_dual_value_quadrature(f, grid, lam, cfg, law));
    }
    return best;
}

}  // namespace

TEST_CASE("wasserstein 1d: strong duality and complementary slackness on pinned instances") {
    const auto grid = linspace(-3.0, 3.0, 4001);
    std::vector<double> fq(grid.size()), fa(grid.size());
    for (size_t q = 0; q < grid.size(); ++q) {
        fq[q] = grid[q] * grid[q];
        fa[q] = 2.0 * grid[q] + 1.0;
    }
    struct Instance {
        const std::vector<double>* f;
        double sigma2, eps, m;
        std::vector<std::vector<double>> atoms;
        std::vector<double> probs;
    };
    const std::vector<Instance> pinned = {
        {&fq, 0.1, 0.01, 0.5, {{0.5}}, {}},
        {&fq, 0.1, 0.01, 2.0, {{0.5}}, {}},
        {&fq, 1.0, 0.1, 2.0, {{0.5}}, {}},
        {&fa, 1.0, 0.1, 0.5, {{0.5}}, {}},
        {&fa, 0.1, 0.1, 0.5, {{-0.5}, {0.5}}, {0.5, 0.5}},
    };
    for (const auto& inst : pinned) {
        const auto cfg = wcfg_1d(inst.m, inst.eps, inst.sigma2);
        const NominalLaw law = NominalLaw::empirical(inst.atoms, inst.probs);
        const auto primal = oracle::primal_sup_wasserstein_1d(*inst.f, grid, cfg, law);
        const double dual = dual_min_64(*inst.f, grid, cfg, law);
        CHECK(std::abs(dual - primal.value) <= 0.005 * std::abs(primal.value));
        CHECK(dual >= primal.value - 1e-6);  // weak duality
        if (primal.lambda > 1e-5)
            CHECK(std::abs(primal.transport_cost - inst.m) <= 1e-3 * (1.0 + std::abs(inst.m)));
    }
}

TEST_CASE("wasserstein 1d primal: constant f with a large radius returns the constant") {
    const auto grid = linspace(-3.0, 3.0, 2001);
    const std::vector<double> f(grid.size(), 4.2);
    const auto cfg = wcfg_1d(10.0, 0.05, 0.1);
    const auto res =
        oracle::primal_sup_wasserstein_1d(f, grid, cfg, NominalLaw::dirac({0.0}));
    CHECK(res.value == doctest::Approx(4.2).epsilon(1e-9));
}

TEST_CASE("wasserstein 1d primal: m = 0 is below the entropic feasibility threshold") {
    const auto grid = linspace(-3.0, 3.0, 2001);
    std::vector<double> f(grid.size());
    for (size_t q = 0; q < grid.size(); ++q) f[q] = grid[q] * grid[q];
    const auto cfg = wcfg_1d(0.0, 0.01, 0.1);
    CHECK_THROWS_AS(
        oracle::primal_sup_wasserstein_1d(f, grid, cfg, NominalLaw::dirac({0.5})),
        std::runtime_error);
}

TEST_CASE("moment 1d: pinned instances agree with the dual within 1 percent") {
    const auto grid = linspace(-6.0, 6.0, 2001);
    std::vector<double> fa(grid.size()), fq(grid.size()), fn(grid.size());
    for (size_t q = 0; q < grid.size(); ++q) {
        fa[q] = grid[q];
        fq[q] = grid[q] * grid[q];
        fn[q] = -grid[q];
    }
    struct Instance {
        const std::vector<double>* f;
        double mu0, s0sq, eps, m1, m2;
    };
    const std::vector<Instance> pinned = {
        {&fa, 0.0, 1.0, 0.1, 0.5, 1.0},  {&fa, 0.0, 1.0, 0.01, 0.5, 1.0},
        {&fq, 0.0, 1.0, 0.1, 0.5, 2.0},  {&fn, 0.5, 1.0, 0.1, 0.1, 1.0},
        {&fq, 0.5, 1.0, 0.1, 1.0, 1.0},
    };
    for (const auto& inst : pinned) {
        MomentConfig cfg;
        cfg.mu0 = {inst.mu0};
        cfg.sigma0 = {{inst.s0sq}};
        cfg.m1 = inst.m1;
        cfg.m2 = inst.m2;
        cfg.eps = inst.eps;
        const auto primal = oracle::primal_sup_moment_1d(*inst.f, grid, cfg);

        // 2d progressive grid over (a = lambda tau, s), embedded back into
        // the (lambda, tau, S) parameterization of the production dual
        double a_lo = -8.0, a_hi = 8.0, s_lo = 0.0, s_hi = 8.0;
        double best = 1e300;
        for (int pass = 0; pass < 8; ++pass) {
            double aa = 0.0, ss = 0.0;
            for (int ia = 0; ia < 33; ++ia)
                for (int is = 0; is < 33; ++is) {
                    const double a = a_lo + (a_hi - a_lo) * ia / 32.0;
                    const double s = s_lo + (s_hi - s_lo) * is / 32.0;
                    const double lam = std::abs(a);
                    const double tau = (a == 0.0) ? 0.0 : (a > 0 ? 1.0 : -1.0);
                    const double v =
                        moment_dual_value_quadrature(*inst.f, grid, lam, tau, s, cfg);
                    if (v < best) {
                        best = v;
                        aa = a;
                        ss = s;
                    }
                }
            const double da = 0.35 * (a_hi - a_lo), ds = 0.35 * (s_hi - s_lo);
            a_lo = aa - 0.5 * da;
            a_hi = aa + 0.5 * da;
            s_lo = std::max(0.0, ss - 0.5 * ds);
            s_hi = ss + 0.5 * ds;
        }
        CHECK(std::abs(best - primal.value) <= 0.01 * std::max(1.0, std::abs(primal.value)));
        CHECK(best >= primal.value - 1e-6);  // weak duality
        // reconstructed moments satisfy both inequalities
        CHECK(std::abs(primal.mean - inst.mu0) <= inst.m1 + 1e-3);
        CHECK(primal.second_central <= inst.m2 * inst.s0sq + 1e-3);
    }
}

TEST_CASE("moment 1d primal: constant f attains the constant at (lambda, S) = 0") {
    const auto grid = linspace(-6.0, 6.0, 2001);
    const std::vector<double> f(grid.size(), 2.5);
    MomentConfig cfg;
    cfg.mu0 = {0.0};
    cfg.sigma0 = {{1.0}};
    cfg.m1 = 0.5;
    cfg.m2 = 1.5;
    cfg.eps = 0.05;
    const auto primal = oracle::primal_sup_moment_1d(f, grid, cfg);
    CHECK(primal.value == doctest::Approx(2.5).epsilon(1e-6));
    CHECK(moment_dual_value_quadrature(f, grid, 0.0, 0.0, 0.0, cfg) ==
          doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("cvar tail average on samples equals the minimization route") {
    CHECK(oracle::cvar_tail_average({1.0, 2.0, 3.0, 4.0}, 0.5) == doctest::Approx(3.5));
    CHECK(cvar_minimize({1.0, 2.0, 3.0, 4.0}, 0.5).cvar == doctest::Approx(3.5));

    CounterRng rng(61, 0);
    for (int rep = 0; rep < 50; ++rep) {
        const int n = 3 + static_cast<int>(rng.next_uniform() * 30);
        std::vector<double> x(static_cast<size_t>(n));
        for (auto& v : x) v = 5.0 * rng.next_normal();
        const double beta = 0.05 + 0.9 * rng.next_uniform();
        CHECK(oracle::cvar_tail_average(x, beta) ==
              doctest::Approx(cvar_minimize(x, beta).cvar).epsilon(1e-12));
    }
}

TEST_CASE("cvar on continuous densities: uniform and standard normal") {
    SUBCASE("uniform on [0,1], beta = 0.9 gives exactly 0.95") {
        const auto x = linspace(0.0, 1.0, 2001);
        const std::vector<double> p(x.size(), 1.0);
        const double tail = oracle::cvar_tail_average_density(x, p, 0.9);
        const auto rep = cvar_minimize_density(x, p, 0.9);
        CHECK(tail == doctest::Approx(0.95).epsilon(1e-12));
        CHECK(std::abs(rep.cvar - tail) < 1e-9);
        CHECK(rep.alpha_star == doctest::Approx(0.9).epsilon(1e-9));
    }
    SUBCASE("standard normal, beta = 0.5 gives phi(0)/0.5") {
        const auto x = linspace(-8.0, 8.0, 40001);
        std::vector<double> p(x.size());
        for (size_t q = 0; q < x.size(); ++q)
            p[q] = std::exp(-x[q] * x[q] / 2.0) / std::sqrt(2.0 * M_PI);
        const double tail = oracle::cvar_tail_average_density(x, p, 0.5);
        const auto rep = cvar_minimize_density(x, p, 0.5);
        CHECK(tail == doctest::Approx(0.7978845608).epsilon(1e-6));
        CHECK(std::abs(rep.cvar - tail) < 1e-9);
    }
    SUBCASE("beta -> 0 approaches the mean") {
        const auto x = linspace(0.0, 2.0, 4001);
        std::vector<double> p(x.size());
        for (size_t q = 0; q < x.size(); ++q) p[q] = x[q];  // triangular, mean 4/3
        CHECK(oracle::cvar_tail_average_density(x, p, 1e-9) ==
              doctest::Approx(4.0 / 3.0).epsilon(1e-6));
    }
}

TEST_CASE("finite differences recover an analytic gradient") {
    auto f = [](const std::vector<double>& x) {
        return x[0] * x[0] + 3.0 * x[0] * x[1] + std::sin(x[1]);
    };
    const std::vector<double> x0 = {0.7, -0.4};
    const auto g = oracle::finite_difference_gradient(f, x0, 1e-6);
    CHECK(g[0] == doctest::Approx(2.0 * 0.7 + 3.0 * (-0.4)).epsilon(1e-8));
    CHECK(g[1] == doctest::Approx(3.0 * 0.7 + std::cos(-0.4)).epsilon(1e-8));
}

TEST_CASE("jacobi eigensolver on a known symmetric matrix") {
    // eigenvalues of [[2,1,0],[1,2,1],[0,1,2]] are 2 + sqrt(2), 2, 2 - sqrt(2)
    std::vector<std::vector<double>> A = {{2, 1, 0}, {1, 2, 1}, {0, 1, 2}};
    std::vector<double> evals;
    std::vector<std::vector<double>> evecs;
    oracle::jacobi_eigensolve(A, evals, evecs);
    CHECK(evals[0] == doctest::Approx(2.0 + std::sqrt(2.0)).epsilon(1e-12));
    CHECK(evals[1] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(evals[2] == doctest::Approx(2.0 - std::sqrt(2.0)).epsilon(1e-12));
    // residual of the eigen-equation
    for (int m = 0; m < 3; ++m) {
        for (int r = 0; r < 3; ++r) {
            double Av = 0.0;
            for (int c = 0; c < 3; ++c)
                Av += A[static_cast<size_t>(r)][static_cast<size_t>(c)] *
                      evecs[static_cast<size_t>(m)][static_cast<size_t>(c)];
            CHECK(Av == doctest::Approx(evals[static_cast<size_t>(m)] *
                                        evecs[static_cast<size_t>(m)][static_cast<size_t>(r)])
                            .epsilon(1e-10));
        }
    }
}
