#include "drto/uncertainty.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace drto {

ParameterSpace ParameterSpace::ball(int dim, double radius, std::vector<double> center) {
    ParameterSpace s;
    s.dim = dim;
    s.shape = Shape::Ball;
    s.radius = radius;
    s.center = std::move(center);
    s.validate();
    return s;
}

ParameterSpace ParameterSpace::box(int dim, double radius, std::vector<double> center) {
    ParameterSpace s = ball(dim, radius, std::move(center));
    s.shape = Shape::Box;
    return s;
}

void ParameterSpace::validate() const {
    if (dim < 1) throw std::invalid_argument("parameter space: dim must be >= 1");
    if (!(radius > 0.0)) throw std::invalid_argument("parameter space: radius must be > 0");
    if (!center.empty() && static_cast<int>(center.size()) != dim)
        throw std::invalid_argument("parameter space: center dimension mismatch");
}

bool ParameterSpace::contains(const std::vector<double>& x) const {
    if (static_cast<int>(x.size()) != dim) return false;
    if (shape == Shape::Ball) {
        double d2 = 0.0;
        for (int i = 0; i < dim; ++i) {
            const double c = center.empty() ? 0.0 : center[static_cast<size_t>(i)];
            d2 += (x[static_cast<size_t>(i)] - c) * (x[static_cast<size_t>(i)] - c);
        }
        return d2 <= radius * radius;
    }
    for (int i = 0; i < dim; ++i) {
        const double c = center.empty() ? 0.0 : center[static_cast<size_t>(i)];
        if (std::abs(x[static_cast<size_t>(i)] - c) > radius) return false;
    }
    return true;
}

NominalLaw NominalLaw::dirac(std::vector<double> atom) {
    return empirical({std::move(atom)});
}

NominalLaw NominalLaw::empirical(std::vector<std::vector<double>> atoms,
                                 std::vector<double> weights) {
    NominalLaw l;
    l.law = EmpiricalLaw{std::move(atoms), std::move(weights)};
    return l;
}

NominalLaw NominalLaw::gaussian(std::vector<double> mean, std::vector<std::vector<double>> cov) {
    NominalLaw l;
    l.law = TruncatedGaussianLaw{std::move(mean), std::move(cov)};
    return l;
}

NominalLaw NominalLaw::isotropic_gaussian(std::vector<double> mean, double sigma2) {
    const size_t k = mean.size();
    std::vector<std::vector<double>> cov(k, std::vector<double>(k, 0.0));
    for (size_t i = 0; i < k; ++i) cov[i][i] = sigma2;
    return gaussian(std::move(mean), std::move(cov));
}

int NominalLaw::dim() const {
    if (is_empirical()) {
        const auto& e = empirical_law();
        return e.atoms.empty() ? 0 : static_cast<int>(e.atoms.front().size());
    }
    return static_cast<int>(gaussian_law().mean.size());
}

void NominalLaw::validate(const ParameterSpace& space) const {
    if (is_empirical()) {
        const auto& e = empirical_law();
        if (e.atoms.empty()) throw std::invalid_argument("nominal law: no atoms");
        for (const auto& a : e.atoms)
            if (!space.contains(a))
                throw std::invalid_argument("nominal law: atom outside parameter space");
        if (!e.weights.empty()) {
            if (e.weights.size() != e.atoms.size())
                throw std::invalid_argument("nominal law: weight count mismatch");
            double s = 0.0;
            for (double w : e.weights) {
                if (!(w >= 0.0)) throw std::invalid_argument("nominal law: negative weight");
                s += w;
            }
            if (std::abs(s - 1.0) > 1e-12)
                throw std::invalid_argument("nominal law: weights sum to " + std::to_string(s));
        }
    } else {
        const auto& g = gaussian_law();
        const size_t k = g.mean.size();
        if (k == 0 || g.covariance.size() != k)
            throw std::invalid_argument("nominal law: bad Gaussian dimensions");
        for (const auto& row : g.covariance)
            if (row.size() != k) throw std::invalid_argument("nominal law: covariance not square");
        for (size_t i = 0; i < k; ++i)
            for (size_t j = 0; j < i; ++j)
                if (std::abs(g.covariance[i][j] - g.covariance[j][i]) > 1e-12)
                    throw std::invalid_argument("nominal law: covariance not symmetric");
    }
}

namespace {

// Lower Cholesky factor; throws if the matrix is not positive definite.
std::vector<std::vector<double>> cholesky(const std::vector<std::vector<double>>& A) {
    const size_t k = A.size();
    std::vector<std::vector<double>> L(k, std::vector<double>(k, 0.0));
    for (size_t i = 0; i < k; ++i) {
        for (size_t j = 0; j <= i; ++j) {
            double s = A[i][j];
            for (size_t m = 0; m < j; ++m) s -= L[i][m] * L[j][m];
            if (i == j) {
                if (!(s > 0.0))
                    throw std::invalid_argument("covariance matrix not positive definite");
                L[i][j] = std::sqrt(s);
            } else {
                L[i][j] = s / L[j][j];
            }
        }
    }
    return L;
}

constexpr int kMaxRejectionAttempts = 10000;

template <typename DrawFn>
std::vector<std::vector<double>> rejection_sample(const ParameterSpace& space, int k, int n,
                                                  SeedRecord seed, std::uint64_t atom_index,
                                                  DrawFn&& draw) {
    std::vector<std::vector<double>> out;
    out.reserve(static_cast<size_t>(std::max(n, 0)));
    for (int j = 0; j < n; ++j) {
        CounterRng rng(CounterRng::key(seed.master, seed.iteration, atom_index,
                                       static_cast<std::uint64_t>(j)));
        std::vector<double> x(static_cast<size_t>(k));
        bool accepted = false;
        for (int attempt = 0; attempt < kMaxRejectionAttempts; ++attempt) {
            draw(rng, x);
            if (space.contains(x)) {
                accepted = true;
                break;
            }
        }
        if (!accepted)
            throw std::runtime_error(
                "rejection sampling: acceptance rate below 1e-3 (no hit in " +
                std::to_string(kMaxRejectionAttempts) +
                " attempts); parameter space too small relative to the sampling variance");
        out.push_back(std::move(x));
    }
    return out;
}

}  // namespace

std::vector<std::vector<double>> sample_nu(const ReferenceKernel& kernel,
                                           const std::vector<double>& xi, int n, SeedRecord seed,
                                           std::uint64_t atom_index) {
    kernel.space.validate();
    if (!(kernel.sigma2 > 0.0)) throw std::invalid_argument("sample_nu: sigma2 must be > 0");
    if (!kernel.space.contains(xi))
        throw std::invalid_argument("sample_nu: center xi outside parameter space");
    const double sigma = std::sqrt(kernel.sigma2);
    const int k = kernel.space.dim;
    return rejection_sample(kernel.space, k, n, seed, atom_index,
                            [&](CounterRng& rng, std::vector<double>& x) {
                                for (int d = 0; d < k; ++d)
                                    x[static_cast<size_t>(d)] =
                                        xi[static_cast<size_t>(d)] + sigma * rng.next_normal();
                            });
}

std::vector<std::vector<double>> sample_q0(const TruncatedGaussianLaw& law,
                                           const ParameterSpace& space, int n, SeedRecord seed,
                                           std::uint64_t atom_index) {
    space.validate();
    const int k = static_cast<int>(law.mean.size());
    const auto L = cholesky(law.covariance);
    std::vector<double> z(static_cast<size_t>(k));
    return rejection_sample(space, k, n, seed, atom_index,
                            [&](CounterRng& rng, std::vector<double>& x) {
                                for (int d = 0; d < k; ++d)
                                    z[static_cast<size_t>(d)] = rng.next_normal();
                                for (int i = 0; i < k; ++i) {
                                    double s = law.mean[static_cast<size_t>(i)];
                                    for (int j = 0; j <= i; ++j)
                                        s += L[static_cast<size_t>(i)][static_cast<size_t>(j)] *
                                             z[static_cast<size_t>(j)];
                                    x[static_cast<size_t>(i)] = s;
                                }
                            });
}

SampleBatch draw_inner_batch(const NominalLaw& law, const ReferenceKernel& kernel, int n,
                             SeedRecord seed) {
    if (!law.is_empirical())
        throw std::invalid_argument("draw_inner_batch: nominal law must be empirical");
    const auto& emp = law.empirical_law();
    SampleBatch batch;
    batch.seed = seed;
    batch.points.reserve(emp.atoms.size());
    for (size_t i = 0; i < emp.atoms.size(); ++i)
        batch.points.push_back(
            sample_nu(kernel, emp.atoms[i], n, seed, static_cast<std::uint64_t>(i)));
    return batch;
}

double log_mean_exp(const std::vector<double>& values) {
    if (values.empty()) throw std::invalid_argument("log_mean_exp: empty input");
    const double m = *std::max_element(values.begin(), values.end());
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double v : values) s += std::exp(v - m);
    return m + std::log(s / static_cast<double>(values.size()));
}

double log_weighted_sum_exp(const std::vector<double>& values,
                            const std::vector<double>& weights) {
    if (values.empty() || values.size() != weights.size())
        throw std::invalid_argument("log_weighted_sum_exp: bad input sizes");
    const double m = *std::max_element(values.begin(), values.end());
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (size_t i = 0; i < values.size(); ++i) s += weights[i] * std::exp(values[i] - m);
    return m + std::log(s);
}

}  // namespace drto
