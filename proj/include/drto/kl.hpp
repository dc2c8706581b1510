#pragma once

#include <cmath>
#include <vector>

#include "drto/grid.hpp"

namespace drto {

/// Exponential covariance kernel amplitude * exp(-|x-y| / l_cor).
struct CovarianceSpec {
    double amplitude = 100.0;
    double correlation_length = 2e-2;

    void validate() const {
        if (!(amplitude > 0.0) || !(correlation_length > 0.0))
            throw std::invalid_argument("covariance: amplitude and l_cor must be > 0");
    }

    double operator()(double x0, double y0, double x1, double y1) const {
        const double dx = x0 - x1, dy = y0 - y1;
        return amplitude * std::exp(-std::sqrt(dx * dx + dy * dy) / correlation_length);
    }
};

/// Truncated Karhunen-Loeve basis: eigenvalues (descending) and per-element
/// eigenfunction values, orthonormal in the area-weighted inner product.
struct KLBasis {
    std::vector<double> eigenvalues;
    std::vector<std::vector<double>> modes;  // modes[i][e]
    double cell_area = 0.0;

    int num_modes() const { return static_cast<int>(eigenvalues.size()); }
};

/// Pointwise transform G = F^{-1} o Phi mapping the Gaussian field to a
/// uniform law on [a, b]; outputs are always inside [a, b].
struct ModulusTransform {
    double a = 0.1;
    double b = 1.9;

    double operator()(double t) const;
};

/// Nystrom discretization at element centroids with area weights, dense
/// symmetric eigensolve, top-k eigenpairs. Eigenvalues below a positivity
/// threshold are truncated (with fewer modes returned).
KLBasis build_kl_basis(const StructuredGrid& grid, const CovarianceSpec& spec, int k);

/// E(x, xi) = G(1 + sum_i sqrt(lambda_i) E_i(x) xi_i), per element.
std::vector<double> realize_modulus(const KLBasis& basis, const ModulusTransform& transform,
                                    const std::vector<double>& xi);

/// Standard normal CDF via erfc (absolute error well below 1e-12).
double standard_normal_cdf(double t);

}  // namespace drto
