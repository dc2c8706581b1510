#include "drto/filter.hpp"

#include <cmath>
#include <stdexcept>

namespace drto {

ConeFilter::ConeFilter(const StructuredGrid& grid, double radius, const DomainMask& mask)
    : radius_(radius), nel_(grid.num_elements()) {
    if (!(radius > 0.0)) throw std::invalid_argument("filter radius must be > 0");
    const double hx = grid.hx(), hy = grid.hy();
    const int span_x = static_cast<int>(std::ceil(radius / hx));
    const int span_y = static_cast<int>(std::ceil(radius / hy));

    offsets_.assign(static_cast<size_t>(nel_) + 1, 0);
    // two passes: count, then fill
    for (int pass = 0; pass < 2; ++pass) {
        if (pass == 1) {
            for (int e = 0; e < nel_; ++e) offsets_[static_cast<size_t>(e) + 1] += offsets_[e];
            neighbors_.assign(static_cast<size_t>(offsets_[nel_]), 0);
            weights_.assign(static_cast<size_t>(offsets_[nel_]), 0.0);
        }
        std::vector<int> cursor(offsets_.begin(), offsets_.end() - 1);
        for (int e = 0; e < nel_; ++e) {
            if (!mask.is_active(e)) {
                // passive elements keep their own (pinned) value
                if (pass == 0) offsets_[static_cast<size_t>(e) + 1] = 1;
                else {
                    neighbors_[static_cast<size_t>(cursor[e])] = e;
                    weights_[static_cast<size_t>(cursor[e])] = 1.0;
                }
                continue;
            }
            const int ei = grid.elem_i(e), ej = grid.elem_j(e);
            int count = 0;
            double wsum = 0.0;
            for (int dj = -span_y; dj <= span_y; ++dj)
                for (int di = -span_x; di <= span_x; ++di) {
                    const int ii = ei + di, jj = ej + dj;
                    if (ii < 0 || ii >= grid.nx || jj < 0 || jj >= grid.ny) continue;
                    const int o = grid.element(ii, jj);
                    if (!mask.is_active(o)) continue;
                    const double d = std::hypot(di * hx, dj * hy);
                    const double w = radius - d;
                    if (w <= 0.0) continue;
                    if (pass == 0) {
                        ++count;
                    } else {
                        neighbors_[static_cast<size_t>(cursor[e])] = o;
                        weights_[static_cast<size_t>(cursor[e])] = w;
                        ++cursor[e];
                        wsum += w;
                    }
                }
            if (pass == 0) {
                offsets_[static_cast<size_t>(e) + 1] = count;
            } else {
                for (int k = offsets_[e]; k < cursor[e]; ++k)
                    weights_[static_cast<size_t>(k)] /= wsum;
            }
        }
    }
}

std::vector<double> ConeFilter::apply(const std::vector<double>& h) const {
    if (static_cast<int>(h.size()) != nel_)
        throw std::invalid_argument("filter: density size mismatch");
    std::vector<double> out(static_cast<size_t>(nel_), 0.0);
    for (int e = 0; e < nel_; ++e) {
        double s = 0.0;
        for (int k = offsets_[e]; k < offsets_[static_cast<size_t>(e) + 1]; ++k)
            s += weights_[static_cast<size_t>(k)] * h[static_cast<size_t>(neighbors_[k])];
        out[static_cast<size_t>(e)] = s;
    }
    return out;
}

std::vector<double> ConeFilter::chain(const std::vector<double>& grad_filtered) const {
    if (static_cast<int>(grad_filtered.size()) != nel_)
        throw std::invalid_argument("filter: gradient size mismatch");
    std::vector<double> out(static_cast<size_t>(nel_), 0.0);
    for (int e = 0; e < nel_; ++e)
        for (int k = offsets_[e]; k < offsets_[static_cast<size_t>(e) + 1]; ++k)
            out[static_cast<size_t>(neighbors_[k])] +=
                weights_[static_cast<size_t>(k)] * grad_filtered[static_cast<size_t>(e)];
    return out;
}

}  // namespace drto
