#pragma once

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "drto/rng.hpp"

namespace drto {

/// Compact parameter set: a closed ball or box of radius R around a center.
struct ParameterSpace {
    enum class Shape { Ball, Box };

    int dim = 1;
    Shape shape = Shape::Ball;
    std::vector<double> center;  // empty means origin
    double radius = 0.0;

    static ParameterSpace ball(int dim, double radius, std::vector<double> center = {});
    static ParameterSpace box(int dim, double radius, std::vector<double> center = {});

    bool contains(const std::vector<double>& x) const;
    void validate() const;
};

/// Nominal law P over the parameter space: either a finite mixture of Dirac
/// masses or a truncated Gaussian.
struct EmpiricalLaw {
    std::vector<std::vector<double>> atoms;
    std::vector<double> weights;  // empty => equal 1/N
};

struct TruncatedGaussianLaw {
    std::vector<double> mean;
    std::vector<std::vector<double>> covariance;  // k x k SPD
};

struct NominalLaw {
    std::variant<EmpiricalLaw, TruncatedGaussianLaw> law;

    static NominalLaw dirac(std::vector<double> atom);
    static NominalLaw empirical(std::vector<std::vector<double>> atoms,
                                std::vector<double> weights = {});
    static NominalLaw gaussian(std::vector<double> mean, std::vector<std::vector<double>> cov);
    static NominalLaw isotropic_gaussian(std::vector<double> mean, double sigma2);

    bool is_empirical() const { return std::holds_alternative<EmpiricalLaw>(law); }
    const EmpiricalLaw& empirical_law() const { return std::get<EmpiricalLaw>(law); }
    const TruncatedGaussianLaw& gaussian_law() const {
        return std::get<TruncatedGaussianLaw>(law);
    }

    int dim() const;
    void validate(const ParameterSpace& space) const;
};

/// Reference kernel nu_xi: isotropic Gaussian of variance sigma2 around xi,
/// restricted to the parameter space.
struct ReferenceKernel {
    double sigma2 = 1.0;
    ParameterSpace space;
};

/// Seed record: a batch is a pure function of these values.
struct SeedRecord {
    std::uint64_t master = 0;
    std::uint64_t iteration = 0;
};

/// Monte-Carlo samples, grouped per nominal atom.
struct SampleBatch {
    // points[i][j] is the j-th sample attached to atom i (k doubles each).
    std::vector<std::vector<std::vector<double>>> points;
    SeedRecord seed;

    int num_atoms() const { return static_cast<int>(points.size()); }
    int samples_per_atom() const {
        return points.empty() ? 0 : static_cast<int>(points.front().size());
    }
};

/// n i.i.d. draws from nu_xi by rejection; deterministic in (seed, atom_index).
/// Throws if the rejection acceptance rate falls below 1e-3.
std::vector<std::vector<double>> sample_nu(const ReferenceKernel& kernel,
                                           const std::vector<double>& xi, int n, SeedRecord seed,
                                           std::uint64_t atom_index = 0);

/// n draws from the truncated Gaussian law (Cholesky transform + rejection).
std::vector<std::vector<double>> sample_q0(const TruncatedGaussianLaw& law,
                                           const ParameterSpace& space, int n, SeedRecord seed,
                                           std::uint64_t atom_index = 0);

/// One inner batch per atom of the nominal law (empirical laws only).
SampleBatch draw_inner_batch(const NominalLaw& law, const ReferenceKernel& kernel, int n,
                             SeedRecord seed);

/// log((1/n) sum exp(v_i)), overflow-safe. Throws on an empty input.
double log_mean_exp(const std::vector<double>& values);

/// Weighted variant: log(sum_i w_i exp(v_i)) with sum w_i = 1.
double log_weighted_sum_exp(const std::vector<double>& values, const std::vector<double>& weights);

}  // namespace drto
