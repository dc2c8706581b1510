#pragma once

#include <vector>

#include "drto/grid.hpp"

namespace drto {

/// Linear cone (hat) density filter with fixed radius, restricted to active
/// elements: no coupling across a domain-mask boundary. Weights are
/// w(e,e') = max(0, r - dist(centroids)), normalized per target element.
class ConeFilter {
  public:
    ConeFilter(const StructuredGrid& grid, double radius, const DomainMask& mask = {});

    /// Filtered densities: h_f(e) = sum_e' W(e,e') h(e').
    std::vector<double> apply(const std::vector<double>& h) const;

    /// Chain rule: given dJ/dh_f, returns dJ/dh = W^T (dJ/dh_f).
    std::vector<double> chain(const std::vector<double>& grad_filtered) const;

    double radius() const { return radius_; }

  private:
    double radius_ = 0.0;
    int nel_ = 0;
    std::vector<int> offsets_;      // per-element neighbor range
    std::vector<int> neighbors_;
    std::vector<double> weights_;   // normalized per element
};

}  // namespace drto
