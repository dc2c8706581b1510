#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "drto/optimizer.hpp"
#include "drto/rng.hpp"

using namespace drto;

namespace {

double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

// min 0.5 |h - a|^2  s.t.  sum h = b; the projected optimum is
// h* = a + (b - sum a)/n (when it stays inside the box).
OptimizationProblem quadratic_toy(const std::vector<double>& a, double b) {
    OptimizationProblem p;
    p.objective = [a](const std::vector<double>& h, const AugmentedPoint&, std::uint64_t) {
        AugmentedEval ev;
        ev.grad_h.resize(h.size());
        for (size_t i = 0; i < h.size(); ++i) {
            ev.value += 0.5 * (h[i] - a[i]) * (h[i] - a[i]);
            ev.grad_h[i] = h[i] - a[i];
        }
        return ev;
    };
    EqualityConstraint eq;
    eq.name = "sum";
    eq.value = [b](const std::vector<double>& h) {
        double s = 0.0;
        for (double x : h) s += x;
        return s - b;
    };
    eq.gradient = [](const std::vector<double>& h) {
        return std::vector<double>(h.size(), 1.0);
    };
    p.equalities.push_back(eq);
    return p;
}

}  // namespace

TEST_CASE("block projections") {
    SUBCASE("density box clip and pinning") {
        const auto h = project_density({-0.2, 0.5, 1.7}, {});
        CHECK(h[0] == 0.0);
        CHECK(h[1] == 0.5);
        CHECK(h[2] == 1.0);
        const auto hp = project_density({0.4, 0.6}, {1, 0});
        CHECK(hp[1] == 0.0);
    }
    SUBCASE("multiplier floor") {
        CHECK(project_multiplier(-3.0, 1e-6) == 1e-6);
        CHECK(project_multiplier(2.0, 1e-6) == 2.0);
    }
    SUBCASE("unit ball radial scaling") {
        const auto t = project_unit_ball({3.0, 4.0});
        CHECK(std::hypot(t[0], t[1]) == doctest::Approx(1.0));
        CHECK(t[0] / t[1] == doctest::Approx(0.75));
        const auto inside = project_unit_ball({0.3, -0.2});
        CHECK(inside[0] == 0.3);
        CHECK(inside[1] == -0.2);
    }
    SUBCASE("psd eigenvalue clipping") {
        const auto S = project_psd({{1.0, 0.0}, {0.0, -2.0}});
        CHECK(S[0][0] == doctest::Approx(1.0));
        CHECK(S[1][1] == doctest::Approx(0.0));
        CHECK(S[0][1] == doctest::Approx(0.0));
        // idempotence on an already-psd matrix
        const auto S2 = project_psd({{2.0, 0.5}, {0.5, 1.0}});
        CHECK(S2[0][0] == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(S2[0][1] == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("psd projection optimality in Frobenius distance") {
        CounterRng rng(41, 0);
        for (int rep = 0; rep < 20; ++rep) {
            std::vector<std::vector<double>> S(3, std::vector<double>(3, 0.0));
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j <= i; ++j)
                    S[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                        S[static_cast<size_t>(j)][static_cast<size_t>(i)] =
                            2.0 * rng.next_uniform() - 1.0;
            const auto P = project_psd(S);
            auto dist = [&](const std::vector<std::vector<double>>& A,
                            const std::vector<std::vector<double>>& B) {
                double d = 0.0;
                for (int i = 0; i < 3; ++i)
                    for (int j = 0; j < 3; ++j)
                        d += (A[static_cast<size_t>(i)][static_cast<size_t>(j)] -
                              B[static_cast<size_t>(i)][static_cast<size_t>(j)]) *
                             (A[static_cast<size_t>(i)][static_cast<size_t>(j)] -
                              B[static_cast<size_t>(i)][static_cast<size_t>(j)]);
                return d;
            };
            const double dP = dist(S, P);
            for (int cand = 0; cand < 5; ++cand) {
                // random PSD candidate M M^T
                std::vector<std::vector<double>> M(3, std::vector<double>(3, 0.0)),
                    C(3, std::vector<double>(3, 0.0));
                for (auto& row : M)
                    for (auto& v : row) v = rng.next_uniform() - 0.3;
                for (int i = 0; i < 3; ++i)
                    for (int j = 0; j < 3; ++j)
                        for (int k = 0; k < 3; ++k)
                            C[static_cast<size_t>(i)][static_cast<size_t>(j)] +=
                                M[static_cast<size_t>(i)][static_cast<size_t>(k)] *
                                M[static_cast<size_t>(j)][static_cast<size_t>(k)];
                CHECK(dP <= dist(S, C) + 1e-10);
            }
            // idempotence and non-expansiveness toward the psd cone
            const auto PP = project_psd(P);
            CHECK(dist(P, PP) < 1e-18);
        }
    }
}

TEST_CASE("null-space direction vanishes at stationary feasible points") {
    // objective gradient parallel to the constraint gradient
    OptimizationProblem p = quadratic_toy({0.5, 0.5, 0.5}, 2.1);
    // h with sum = 2.1 and h - a parallel to ones: h = a + c
    DescentState s;
    s.h = {0.7, 0.7, 0.7};
    OptimizerConfig cfg;
    cfg.step_h = 0.3;
    cfg.normalized_design_step = false;
    cfg.restore = 1.0;
    const DescentState next = null_space_step(s, p, cfg);
    for (size_t i = 0; i < s.h.size(); ++i)
        CHECK(next.h[i] == doctest::Approx(s.h[i]).epsilon(1e-12));
}

TEST_CASE("constant objective: restoration drives the volume residual geometrically") {
    OptimizationProblem p;
    p.objective = [](const std::vector<double>& h, const AugmentedPoint&, std::uint64_t) {
        AugmentedEval ev;
        ev.grad_h.assign(h.size(), 0.0);
        return ev;
    };
    EqualityConstraint eq;
    const double target = 6.0;
    eq.value = [target](const std::vector<double>& h) {
        double s = 0.0;
        for (double x : h) s += x;
        return s - target;
    };
    eq.gradient = [](const std::vector<double>& h) {
        return std::vector<double>(h.size(), 1.0);
    };
    p.equalities.push_back(eq);

    DescentState s;
    s.h.assign(16, 0.1);  // 4x4 instance, far from the target sum
    OptimizerConfig cfg;
    cfg.step_h = 0.0;
    cfg.restore = 0.5;
    double prev = std::abs(p.equalities[0].value(s.h));
    for (int it = 0; it < 16; ++it) {
        s = null_space_step(s, p, cfg);
        const double res = std::abs(p.equalities[0].value(s.h));
        CHECK(res <= 0.5 * prev + 1e-12);  // halves every step
        prev = res;
    }
    CHECK(prev < 1e-3);
}

TEST_CASE("quadratic toy converges to the closed-form projected optimum") {
    const std::vector<double> a = {0.9, 0.1, 0.6, 0.4};
    const double b = 1.6;
    OptimizationProblem p = quadratic_toy(a, b);
    const double shift = (b - (0.9 + 0.1 + 0.6 + 0.4)) / 4.0;

    DescentState s;
    s.h.assign(4, 0.25);
    OptimizerConfig cfg;
    cfg.iterations = 400;
    cfg.step_h = 0.4;
    cfg.normalized_design_step = false;
    cfg.decay_t0 = 1e12;  // constant step: the toy is noise-free
    cfg.restore = 1.0;
    const RunResult r = run(p, s, cfg);
    for (size_t i = 0; i < a.size(); ++i)
        CHECK(r.state.h[i] == doctest::Approx(a[i] + shift).epsilon(1e-6));
    CHECK(norm2(r.state.h) > 0.0);
    CHECK(r.log.size() == 400);
}

TEST_CASE("zero step sizes freeze the iterate") {
    OptimizationProblem p = quadratic_toy({0.3, 0.7}, 1.0);
    p.has_lambda = p.has_alpha = true;
    DescentState s;
    s.h = {0.5, 0.5};
    s.pt.lambda = 2.0;
    s.pt.alpha = 1.0;
    OptimizerConfig cfg;
    cfg.step_h = 0.0;
    cfg.step_lambda = 0.0;
    cfg.step_alpha = 0.0;
    cfg.restore = 0.0;
    const DescentState next = null_space_step(s, p, cfg);
    CHECK(next.h[0] == 0.5);
    CHECK(next.h[1] == 0.5);
    CHECK(next.pt.lambda == 2.0);
    CHECK(next.pt.alpha == 1.0);
}

TEST_CASE("feasibility is restored from any start within 50 steps") {
    CounterRng rng(51, 0);
    for (int rep = 0; rep < 5; ++rep) {
        OptimizationProblem p = quadratic_toy({0.2, 0.8, 0.5, 0.5, 0.1}, 2.0);
        DescentState s;
        s.h.assign(5, 0.0);
        for (auto& v : s.h) v = rng.next_uniform();
        OptimizerConfig cfg;
        cfg.iterations = 50;
        cfg.step_h = 0.02;
        cfg.restore = 0.5;
        const double r0 = std::abs(p.equalities[0].value(s.h));
        const RunResult r = run(p, s, cfg);
        const double r1 = std::abs(p.equalities[0].value(r.state.h));
        CHECK(r1 <= 0.1 * r0 + 1e-9);
    }
}

TEST_CASE("inequality constraints activate inside the band and restore feasibility") {
    // min sum h  s.t.  q(h) = 3 - sum h <= 0  (equivalently sum h >= 3)
    OptimizationProblem p;
    p.objective = [](const std::vector<double>& h, const AugmentedPoint&, std::uint64_t) {
        AugmentedEval ev;
        ev.value = 0.0;
        for (double x : h) ev.value += x;
        ev.grad_h.assign(h.size(), 1.0);
        return ev;
    };
    InequalityConstraint con;
    con.bound = 0.0;
    con.eval = [](const std::vector<double>& h, const AugmentedPoint&, std::uint64_t) {
        AugmentedEval ev;
        ev.value = 3.0;
        for (double x : h) ev.value -= x;
        ev.grad_h.assign(h.size(), -1.0);
        return ev;
    };
    p.inequalities.push_back(con);

    DescentState s;
    s.h.assign(8, 0.2);  // sum 1.6, constraint violated (value 1.4 > 0)
    OptimizerConfig cfg;
    cfg.iterations = 60;
    cfg.step_h = 0.01;
    cfg.restore = 0.5;
    const RunResult r = run(p, s, cfg);
    double sum = 0.0;
    for (double x : r.state.h) sum += x;
    CHECK(sum >= 3.0 - 0.02);
    CHECK(sum <= 3.2);  // the objective keeps pressing down onto the boundary
}

TEST_CASE("log rows carry the iterate quantities") {
    OptimizationProblem p = quadratic_toy({0.4, 0.6}, 1.0);
    p.volume_of = [](const std::vector<double>& h) { return h[0] + h[1]; };
    DescentState s;
    s.h = {0.5, 0.5};
    OptimizerConfig cfg;
    cfg.iterations = 3;
    int rows_seen = 0;
    cfg.on_row = [&rows_seen](const LogRow&) { ++rows_seen; };
    const RunResult r = run(p, s, cfg);
    CHECK(rows_seen == 3);
    CHECK(r.log[0].volume == doctest::Approx(1.0));
    CHECK(r.log[0].iter == 0);
    CHECK(r.log[2].iter == 2);
}
