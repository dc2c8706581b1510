#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace drto {

/// Compressed sparse row matrix, full (symmetric) storage.
struct SparseMatrix {
    int n = 0;
    std::vector<int> row_ptr;
    std::vector<int> cols;
    std::vector<double> vals;

    void multiply(const std::vector<double>& x, std::vector<double>& y) const;
    std::vector<double> diagonal() const;

    /// Value lookup (slow path, tests and small systems only).
    double coeff(int i, int j) const;
};

struct CgResult {
    int iterations = 0;
    double relative_residual = 0.0;
    bool converged = false;
};

/// Jacobi-preconditioned conjugate gradients. Terminates when
/// ||b - A x|| <= tol * ||b||; throws std::runtime_error with the iteration
/// count and final residual if max_iter is exhausted first.
CgResult conjugate_gradient(const SparseMatrix& A, const std::vector<double>& b,
                            std::vector<double>& x, double tol, int max_iter);

}  // namespace drto
