#pragma once

#include <cmath>
#include <stdexcept>

namespace drto {

/// Isotropic plane-stress material with SIMP interpolation
/// factor(h) = eta + (1-eta) h^p applied to the element stiffness.
struct MaterialModel {
    double E = 1.0;     // Young's modulus
    double nu = 0.3;    // Poisson ratio
    double eta = 1e-3;  // void stiffness fraction
    double p = 3.0;     // SIMP penalization exponent

    void validate() const {
        if (!(E > 0.0)) throw std::invalid_argument("material: E must be > 0");
        if (!(nu > -1.0 && nu < 0.5)) throw std::invalid_argument("material: nu outside (-1,0.5)");
        if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("material: eta outside (0,1)");
        if (!(p >= 1.0)) throw std::invalid_argument("material: p must be >= 1");
    }

    // Plane-stress Lame parameters.
    double mu() const { return E / (2.0 * (1.0 + nu)); }
    double lambda2d() const { return E * nu / (1.0 - nu * nu); }

    double simp_factor(double h) const {
        const double hp = (p == 3.0) ? h * h * h : std::pow(h, p);
        return eta + (1.0 - eta) * hp;
    }
    double simp_factor_derivative(double h) const {
        if (p == 3.0) return 3.0 * (1.0 - eta) * h * h;
        return p * (1.0 - eta) * std::pow(h, p - 1.0);
    }
};

}  // namespace drto
