#include "drto/kl.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace drto {

double standard_normal_cdf(double t) { return 0.5 * std::erfc(-t / std::sqrt(2.0)); }

double ModulusTransform::operator()(double t) const {
    return a + (b - a) * standard_normal_cdf(t);
}

KLBasis build_kl_basis(const StructuredGrid& grid, const CovarianceSpec& spec, int k) {
    spec.validate();
    const int nel = grid.num_elements();
    if (k < 1 || k > nel)
        throw std::invalid_argument("kl: mode count must be in [1, element count]");
    const double area = grid.hx() * grid.hy();

    // Nystrom at element centroids: eigenproblem of K W, symmetrized as
    // W^{1/2} K W^{1/2} (here W = area * I, so the scaling is uniform).
    Eigen::MatrixXd B(nel, nel);
    for (int r = 0; r < nel; ++r)
        for (int c = 0; c <= r; ++c) {
            const double v = area * spec(grid.cx(r), grid.cy(r), grid.cx(c), grid.cy(c));
            B(r, c) = v;
            B(c, r) = v;
        }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(B);
    if (solver.info() != Eigen::Success) throw std::runtime_error("kl: eigensolve failed");
    const auto& evals = solver.eigenvalues();   // ascending
    const auto& evecs = solver.eigenvectors();  // orthonormal columns

    const double floor = 1e-12 * std::max(evals.cwiseAbs().maxCoeff(), 1.0);
    KLBasis basis;
    basis.cell_area = area;
    for (int m = 0; m < k; ++m) {
        const int idx = nel - 1 - m;
        const double lam = evals(idx);
        if (lam <= floor) break;  // numerically positive spectrum exhausted
        basis.eigenvalues.push_back(lam);
        // discrete-L2 normalization: sum_e area * E_i(e)^2 = 1
        std::vector<double> mode(static_cast<size_t>(nel));
        const double scale = 1.0 / std::sqrt(area);
        for (int e = 0; e < nel; ++e) mode[static_cast<size_t>(e)] = scale * evecs(e, idx);
        basis.modes.push_back(std::move(mode));
    }
    return basis;
}

std::vector<double> realize_modulus(const KLBasis& basis, const ModulusTransform& transform,
                                    const std::vector<double>& xi) {
    if (static_cast<int>(xi.size()) != basis.num_modes())
        throw std::invalid_argument("kl: xi length must equal the mode count");
    if (basis.modes.empty()) throw std::invalid_argument("kl: empty basis");
    const size_t nel = basis.modes.front().size();
    std::vector<double> field(nel, 1.0);  // mean field E0 = 1
    for (int m = 0; m < basis.num_modes(); ++m) {
        const double c = std::sqrt(basis.eigenvalues[static_cast<size_t>(m)]) *
                         xi[static_cast<size_t>(m)];
        const auto& mode = basis.modes[static_cast<size_t>(m)];
        for (size_t e = 0; e < nel; ++e) field[e] += c * mode[e];
    }
    for (auto& v : field) v = transform(v);
    return field;
}

}  // namespace drto
