#include "drto/oracle.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace drto::oracle {

namespace {

std::vector<double> trapezoid(const std::vector<double>& grid) {
    if (grid.size() < 2) throw std::invalid_argument("oracle: quadrature grid too small");
    std::vector<double> w(grid.size(), 0.0);
    for (size_t q = 0; q + 1 < grid.size(); ++q) {
        const double h = grid[q + 1] - grid[q];
        w[q] += 0.5 * h;
        w[q + 1] += 0.5 * h;
    }
    return w;
}

// normalized density of nu_xi on the grid
std::vector<double> nu_density(const std::vector<double>& grid, const std::vector<double>& w,
                               double xi, double sigma2) {
    std::vector<double> d(grid.size());
    double z = 0.0;
    for (size_t q = 0; q < grid.size(); ++q) {
        d[q] = std::exp(-(grid[q] - xi) * (grid[q] - xi) / (2.0 * sigma2));
        z += d[q] * w[q];
    }
    for (auto& v : d) v /= z;
    return d;
}

struct TiltEval {
    double transport = 0.0;  // int (c + eps log alpha) dpi, summed over atoms
    double objective = 0.0;  // int f dQ*
    std::vector<double> q_density;
};

// Closed-form tilted coupling at tilt parameter lambda; the coupling is
// optimal for its own second marginal, so its cost is W_eps(P, Q*).
TiltEval evaluate_tilt(const std::vector<double>& f, const std::vector<double>& grid,
                       const std::vector<double>& w, const WassersteinConfig& cfg,
                       const std::vector<std::vector<double>>& atoms,
                       const std::vector<double>& probs, double lambda) {
    TiltEval out;
    out.q_density.assign(grid.size(), 0.0);
    const double le = lambda * cfg.eps;
    for (size_t i = 0; i < atoms.size(); ++i) {
        const double xi = atoms[i][0];
        const auto nu = nu_density(grid, w, xi, cfg.kernel.sigma2);
        std::vector<double> a(grid.size());
        for (size_t q = 0; q < grid.size(); ++q)
            a[q] = (f[q] - lambda * (grid[q] - xi) * (grid[q] - xi)) / le;
        double m = *std::max_element(a.begin(), a.end());
        double z = 0.0;
        for (size_t q = 0; q < grid.size(); ++q) z += std::exp(a[q] - m) * nu[q] * w[q];
        const double logz = m + std::log(z);
        for (size_t q = 0; q < grid.size(); ++q) {
            const double log_alpha = a[q] - logz;
            const double pi_q = std::exp(log_alpha) * nu[q];  // conditional coupling density
            const double c = (grid[q] - xi) * (grid[q] - xi);
            out.transport += probs[i] * (c + cfg.eps * log_alpha) * pi_q * w[q];
            out.objective += probs[i] * f[q] * pi_q * w[q];
            out.q_density[q] += probs[i] * pi_q;
        }
    }
    return out;
}

}  // namespace

PrimalResult primal_sup_wasserstein_1d(const std::vector<double>& f_grid,
                                       const std::vector<double>& zeta_grid,
                                       const WassersteinConfig& cfg, const NominalLaw& law) {
    if (zeta_grid.size() < 1000)
        throw std::invalid_argument("oracle: wasserstein primal needs >= 1000 grid nodes");
    if (f_grid.size() != zeta_grid.size())
        throw std::invalid_argument("oracle: f and grid size mismatch");
    const auto& atoms = law.empirical_law().atoms;
    const auto probs = atom_weights(law);
    const auto w = trapezoid(zeta_grid);
    const double feas_tol = 1e-3 * (1.0 + std::abs(cfg.m));

    // coarse log sweep of the tilt parameter
    const int n_sweep = 200;
    double best_value = -std::numeric_limits<double>::infinity();
    double best_lambda = 0.0, best_cost = 0.0;
    std::vector<double> best_q;
    int first_feasible = -1;
    std::vector<double> lambdas(n_sweep);
    for (int s = 0; s < n_sweep; ++s)
        lambdas[static_cast<size_t>(s)] =
            std::pow(10.0, -6.0 + 10.0 * static_cast<double>(s) / (n_sweep - 1));
    for (int s = 0; s < n_sweep; ++s) {
        const TiltEval ev = evaluate_tilt(f_grid, zeta_grid, w, cfg, atoms, probs,
                                          lambdas[static_cast<size_t>(s)]);
        if (ev.transport <= cfg.m + feas_tol) {
            if (first_feasible < 0) first_feasible = s;
            if (ev.objective > best_value) {
                best_value = ev.objective;
                best_lambda = lambdas[static_cast<size_t>(s)];
                best_cost = ev.transport;
                best_q = ev.q_density;
            }
        }
    }
    if (first_feasible < 0)
        throw std::runtime_error(
            "oracle: no feasible tilt; the radius m is below the feasibility threshold of "
            "the entropic ball");

    // The transport cost decreases in lambda: refine the active boundary
    // W_eps = m by bisection when the feasible region has an infeasible
    // neighbor below it.
    if (first_feasible > 0) {
        double lo = lambdas[static_cast<size_t>(first_feasible - 1)];
        double hi = lambdas[static_cast<size_t>(first_feasible)];
        for (int it = 0; it < 200; ++it) {
            const double mid = std::sqrt(lo * hi);
            const TiltEval ev = evaluate_tilt(f_grid, zeta_grid, w, cfg, atoms, probs, mid);
            if (ev.transport <= cfg.m) hi = mid;
            else lo = mid;
        }
        const TiltEval ev = evaluate_tilt(f_grid, zeta_grid, w, cfg, atoms, probs, hi);
        if (ev.objective > best_value) {
            best_value = ev.objective;
            best_lambda = hi;
            best_cost = ev.transport;
            best_q = ev.q_density;
        }
    }
    return {best_value, best_lambda, best_cost, best_q};
}

namespace {

struct MomentTiltEval {
    double value = 0.0;  // int f dQ - eps H(Q)
    double mean = 0.0;
    double second_central = 0.0;
    std::vector<double> q_density;
};

MomentTiltEval evaluate_moment_tilt(const std::vector<double>& f, const std::vector<double>& grid,
                                    const std::vector<double>& w, const MomentConfig& cfg,
                                    double a, double b) {
    const double mu0 = cfg.mu0.front();
    const double s0sq = cfg.sigma0.front().front();
    // Q0 density restricted to the grid
    std::vector<double> q0(grid.size());
    double z0 = 0.0;
    for (size_t q = 0; q < grid.size(); ++q) {
        q0[q] = std::exp(-(grid[q] - mu0) * (grid[q] - mu0) / (2.0 * s0sq));
        z0 += q0[q] * w[q];
    }
    for (auto& v : q0) v /= z0;

    std::vector<double> expo(grid.size());
    for (size_t q = 0; q < grid.size(); ++q)
        expo[q] = (f[q] + a * grid[q] + b * (grid[q] - mu0) * (grid[q] - mu0)) / cfg.eps;
    const double m = *std::max_element(expo.begin(), expo.end());
    double z = 0.0;
    for (size_t q = 0; q < grid.size(); ++q) z += std::exp(expo[q] - m) * q0[q] * w[q];
    const double logz = m + std::log(z);

    MomentTiltEval out;
    out.q_density.assign(grid.size(), 0.0);
    for (size_t q = 0; q < grid.size(); ++q) {
        const double log_alpha = expo[q] - logz;
        const double dq = std::exp(log_alpha) * q0[q];
        out.q_density[q] = dq;
        out.value += (f[q] - cfg.eps * log_alpha) * dq * w[q];
        out.mean += grid[q] * dq * w[q];
        out.second_central += (grid[q] - mu0) * (grid[q] - mu0) * dq * w[q];
    }
    return out;
}

}  // namespace

MomentPrimalResult primal_sup_moment_1d(const std::vector<double>& f_grid,
                                        const std::vector<double>& xi_grid,
                                        const MomentConfig& cfg) {
    if (cfg.mu0.size() != 1) throw std::invalid_argument("oracle: moment primal is 1d only");
    if (xi_grid.size() < 1000)
        throw std::invalid_argument("oracle: moment primal needs >= 1000 grid nodes");
    const auto w = trapezoid(xi_grid);
    const double s0sq = cfg.sigma0.front().front();
    const double tol = 1e-3;

    auto feasible = [&](const MomentTiltEval& ev) {
        return std::abs(ev.mean - cfg.mu0.front()) <= cfg.m1 + tol &&
               ev.second_central <= cfg.m2 * s0sq + tol;
    };

    // progressive 2d grid over the tilt exponents (a, b), b <= 0 shrinks the
    // tail so the truncated integrals stay meaningful; b slightly above 0 is
    // allowed only through f's own curvature
    double a_lo = -8.0, a_hi = 8.0, b_lo = -8.0, b_hi = 0.0;
    double best = -std::numeric_limits<double>::infinity();
    MomentTiltEval best_ev;
    bool found = false;
    const int npts = 33;
    for (int pass = 0; pass < 8; ++pass) {
        double next_a = 0.0, next_b = 0.0;
        for (int ia = 0; ia < npts; ++ia)
            for (int ib = 0; ib < npts; ++ib) {
                const double a = a_lo + (a_hi - a_lo) * ia / (npts - 1);
                const double b = b_lo + (b_hi - b_lo) * ib / (npts - 1);
                const MomentTiltEval ev = evaluate_moment_tilt(f_grid, xi_grid, w, cfg, a, b);
                if (feasible(ev) && ev.value > best) {
                    best = ev.value;
                    best_ev = ev;
                    next_a = a;
                    next_b = b;
                    found = true;
                }
            }
        if (!found) break;
        const double da = 0.35 * (a_hi - a_lo), db = 0.35 * (b_hi - b_lo);
        a_lo = next_a - 0.5 * da;
        a_hi = next_a + 0.5 * da;
        b_lo = next_b - 0.5 * db;
        b_hi = std::min(0.0, next_b + 0.5 * db);
    }
    if (!found) throw std::runtime_error("oracle: no feasible moment tilt found");
    return {best, best_ev.mean, best_ev.second_central, best_ev.q_density};
}

double cvar_tail_average(const std::vector<double>& samples, double beta) {
    if (samples.empty()) throw std::invalid_argument("oracle cvar: empty samples");
    std::vector<double> sorted = samples;
    std::sort(sorted.begin(), sorted.end());
    const size_t n = sorted.size();
    size_t q = n - 1;
    for (size_t i = 0; i < n; ++i)
        if (static_cast<double>(i + 1) / static_cast<double>(n) >= beta - 1e-12) {
            q = i;
            break;
        }
    const double var = sorted[q];
    // conditional tail mean with the quantile atom split so the tail event
    // has probability exactly 1 - beta
    double above = 0.0;
    size_t count_above = 0;
    size_t count_leq = 0;
    for (double v : sorted) {
        if (v > var) {
            above += v;
            ++count_above;
        } else {
            ++count_leq;
        }
    }
    const double cdf_at_var = static_cast<double>(count_leq) / static_cast<double>(n);
    return (above / static_cast<double>(n) + (cdf_at_var - beta) * var) / (1.0 - beta);
}

double cvar_tail_average_density(const std::vector<double>& values,
                                 const std::vector<double>& density, double beta) {
    if (values.size() < 2 || values.size() != density.size())
        throw std::invalid_argument("oracle cvar: bad density inputs");
    // normalize under the trapezoid measure
    double total = 0.0;
    for (size_t q = 0; q + 1 < values.size(); ++q)
        total += 0.5 * (values[q + 1] - values[q]) * (density[q] + density[q + 1]);
    std::vector<double> p(density);
    for (auto& v : p) v /= total;

    // invert the CDF: find t with P(X > t) = 1 - beta, exact per cell for
    // piecewise-linear p (quadratic equation in the cell)
    const double target = 1.0 - beta;
    double tail = 0.0;
    double var = values.front();
    bool located = false;
    // accumulate tail mass from the right
    std::vector<double> cell_mass(values.size() - 1);
    for (size_t q = 0; q + 1 < values.size(); ++q)
        cell_mass[q] = 0.5 * (values[q + 1] - values[q]) * (p[q] + p[q + 1]);
    for (size_t qq = values.size() - 1; qq-- > 0;) {
        if (tail + cell_mass[qq] >= target) {
            // t inside cell qq: solve int_t^{x1} p = target - tail
            const double x0 = values[qq], x1 = values[qq + 1];
            const double p0 = p[qq], p1 = p[qq + 1];
            const double need = target - tail;
            // mass(t) = (x1-t) * (p(t)+p1)/2 with p linear; bisection is
            // robust against the quadratic's conditioning
            double lo = x0, hi = x1;
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double pm = p0 + (p1 - p0) * (mid - x0) / (x1 - x0);
                const double mass = 0.5 * (x1 - mid) * (pm + p1);
                if (mass >= need) lo = mid;
                else hi = mid;
            }
            var = 0.5 * (lo + hi);
            located = true;
            break;
        }
        tail += cell_mass[qq];
    }
    if (!located) var = values.front();

    // tail integral of x p(x): exact per full cell for linear p, exact
    // partial cell at the quantile
    double tail_mean = 0.0;
    for (size_t q = 0; q + 1 < values.size(); ++q) {
        const double x0 = values[q], x1 = values[q + 1];
        if (x1 <= var) continue;
        const double p0 = p[q], p1 = p[q + 1];
        double a = std::max(x0, var);
        const double pa = p0 + (p1 - p0) * (a - x0) / (x1 - x0);
        const double wdt = x1 - a;
        // int_a^{x1} x p dx with p linear: shift u = x - a
        // = int_0^w (u + a)(pa + (p1-pa)u/w) du
        tail_mean += wdt * wdt * (pa / 6.0 + p1 / 3.0) + a * 0.5 * wdt * (pa + p1);
    }
    return tail_mean / (1.0 - beta);
}

std::vector<double> finite_difference_gradient(
    const std::function<double(const std::vector<double>&)>& functional,
    const std::vector<double>& point, double step) {
    std::vector<double> g(point.size(), 0.0);
    std::vector<double> x = point;
    for (size_t i = 0; i < point.size(); ++i) {
        x[i] = point[i] + step;
        const double fp = functional(x);
        x[i] = point[i] - step;
        const double fm = functional(x);
        x[i] = point[i];
        g[i] = (fp - fm) / (2.0 * step);
    }
    return g;
}

std::vector<double> dense_solve(const SparseMatrix& A, const std::vector<double>& b) {
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(A.n, A.n);
    for (int i = 0; i < A.n; ++i)
        for (int k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k)
            M(i, A.cols[static_cast<size_t>(k)]) = A.vals[static_cast<size_t>(k)];
    Eigen::VectorXd rhs(A.n);
    for (int i = 0; i < A.n; ++i) rhs(i) = b[static_cast<size_t>(i)];
    const Eigen::VectorXd x = M.partialPivLu().solve(rhs);
    const double res = (M * x - rhs).norm();
    const double scale = std::max(rhs.norm(), 1.0);
    if (res > 1e-12 * scale)
        throw std::runtime_error("dense_solve: residual " + std::to_string(res / scale) +
                                 " exceeds 1e-12");
    std::vector<double> out(static_cast<size_t>(A.n));
    for (int i = 0; i < A.n; ++i) out[static_cast<size_t>(i)] = x(i);
    return out;
}

void jacobi_eigensolve(std::vector<std::vector<double>> A, std::vector<double>& eigenvalues,
                       std::vector<std::vector<double>>& eigenvectors) {
    const size_t n = A.size();
    for (const auto& row : A)
        if (row.size() != n) throw std::invalid_argument("jacobi: matrix not square");
    std::vector<std::vector<double>> V(n, std::vector<double>(n, 0.0));
    for (size_t i = 0; i < n; ++i) V[i][i] = 1.0;

    auto off_norm = [&]() {
        double s = 0.0;
        for (size_t i = 0; i < n; ++i)
            for (size_t j = i + 1; j < n; ++j) s += A[i][j] * A[i][j];
        return std::sqrt(2.0 * s);
    };
    double scale = 0.0;
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) scale = std::max(scale, std::abs(A[i][j]));
    if (scale == 0.0) scale = 1.0;

    for (int sweep = 0; sweep < 100 && off_norm() > 1e-14 * scale * static_cast<double>(n);
         ++sweep) {
        for (size_t p = 0; p < n; ++p)
            for (size_t q = p + 1; q < n; ++q) {
                if (std::abs(A[p][q]) <= 1e-300) continue;
                const double theta = (A[q][q] - A[p][p]) / (2.0 * A[p][q]);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (size_t k = 0; k < n; ++k) {
                    const double akp = A[k][p], akq = A[k][q];
                    A[k][p] = c * akp - s * akq;
                    A[k][q] = s * akp + c * akq;
                }
                for (size_t k = 0; k < n; ++k) {
                    const double apk = A[p][k], aqk = A[q][k];
                    A[p][k] = c * apk - s * aqk;
                    A[q][k] = s * apk + c * aqk;
                }
                for (size_t k = 0; k < n; ++k) {
                    const double vkp = V[k][p], vkq = V[k][q];
                    V[k][p] = c * vkp - s * vkq;
                    V[k][q] = s * vkp + c * vkq;
                }
            }
    }
    std::vector<size_t> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return A[a][a] > A[b][b]; });
    eigenvalues.assign(n, 0.0);
    eigenvectors.assign(n, std::vector<double>(n, 0.0));
    for (size_t r = 0; r < n; ++r) {
        eigenvalues[r] = A[order[r]][order[r]];
        for (size_t k = 0; k < n; ++k) eigenvectors[r][k] = V[k][order[r]];
    }
}

}  // namespace drto::oracle
