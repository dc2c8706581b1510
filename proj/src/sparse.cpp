#include "drto/sparse.hpp"

#include <algorithm>
#include <cmath>

namespace drto {

void SparseMatrix::multiply(const std::vector<double>& x, std::vector<double>& y) const {
    y.assign(static_cast<size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s += vals[k] * x[cols[k]];
        y[static_cast<size_t>(i)] = s;
    }
}

std::vector<double> SparseMatrix::diagonal() const {
    std::vector<double> d(static_cast<size_t>(n), 0.0);
    for (int i = 0; i < n; ++i)
        for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
            if (cols[k] == i) d[static_cast<size_t>(i)] = vals[k];
    return d;
}

double SparseMatrix::coeff(int i, int j) const {
    for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
        if (cols[k] == j) return vals[k];
    return 0.0;
}

CgResult conjugate_gradient(const SparseMatrix& A, const std::vector<double>& b,
                            std::vector<double>& x, double tol, int max_iter) {
    const size_t n = static_cast<size_t>(A.n);
    x.assign(n, 0.0);

    double bnorm = 0.0;
    for (double v : b) bnorm += v * v;
    bnorm = std::sqrt(bnorm);
    if (bnorm == 0.0) return {0, 0.0, true};

    std::vector<double> diag = A.diagonal();
    for (auto& d : diag) d = (d != 0.0) ? 1.0 / d : 1.0;

    std::vector<double> r = b, z(n), p(n), Ap(n);
    for (size_t i = 0; i < n; ++i) z[i] = diag[i] * r[i];
    p = z;
    double rz = 0.0;
    for (size_t i = 0; i < n; ++i) rz += r[i] * z[i];

    double rnorm = bnorm;
    for (int it = 1; it <= max_iter; ++it) {
        A.multiply(p, Ap);
        double pAp = 0.0;
        for (size_t i = 0; i < n; ++i) pAp += p[i] * Ap[i];
        if (!(pAp > 0.0))
            throw std::runtime_error("cg: matrix not positive definite (p'Ap = " +
                                     std::to_string(pAp) + "); check Dirichlet constraints");
        const double alpha = rz / pAp;
        rnorm = 0.0;
        for (size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * Ap[i];
            rnorm += r[i] * r[i];
        }
        rnorm = std::sqrt(rnorm);
        if (rnorm <= tol * bnorm) return {it, rnorm / bnorm, true};

        double rz_new = 0.0;
        for (size_t i = 0; i < n; ++i) {
            z[i] = diag[i] * r[i];
            rz_new += r[i] * z[i];
        }
        const double beta = rz_new / rz;
        rz = rz_new;
        for (size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    throw std::runtime_error("cg: no convergence after " + std::to_string(max_iter) +
                             " iterations, relative residual " + std::to_string(rnorm / bnorm));
}

}  // namespace drto
