#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace drto {

enum class Formulation { Deterministic, Mean, Wasserstein, Moment, Cvar, CvarDro };

std::string to_string(Formulation f);
Formulation formulation_from_string(const std::string& s, int line);

/// Fully resolved run configuration. Serialization emits every key in a
/// canonical order, so serialize(parse(text)) is idempotent byte for byte.
struct RunConfig {
    // [problem]
    std::string preset = "cantilever";
    Formulation formulation = Formulation::Deterministic;
    int nx = 60;
    int ny = 0;  // 0 = preset aspect ratio
    double volume_target = -1.0;  // <0 = preset default
    bool volume_constraint = true;
    double young_modulus = 1.0;
    double poisson_ratio = 0.3;
    double eta = 1e-3;
    double simp_p = 3.0;
    double filter_radius_factor = 1.5;  // in units of max element width; 0 = off
    double patch_fraction = 0.1;

    // [uncertainty]
    double xi_radius = 0.0;  // 0 = auto 10 (sigma + max |xi0|)
    double sigma2 = 1e-1;    // reference-kernel variance
    double law_sigma2 = 1e-2;  // Gaussian nominal-law variance (cvar, lbeam mean)
    int n_inner = 10;
    int n_samples = 10;

    // [ambiguity]
    double m = -1.0;   // Wasserstein radius; required for wasserstein/cvar_dro
    double eps = 1e-2;
    double lambda_min = 1e-6;
    double m1 = -1.0;  // moment bounds; required for moment
    double m2 = -1.0;
    double beta = -1.0;         // required for cvar / cvar_dro
    double c_threshold = -1.0;  // required for cvar / cvar_dro
    double gamma = 20.0;

    // [kl]
    int kl_modes = 10;
    double kl_amplitude = 100.0;
    double kl_correlation_length = 2e-2;

    // [optimizer]
    int iterations = 150;
    double step_h = 0.05;
    double step_lambda = 0.05;
    double step_tau = 0.05;
    double step_s = 0.05;
    double step_alpha = 0.5;
    double decay_t0 = 50.0;
    double restore = 0.5;
    double active_tol = 1e-3;
    double penalty_volume = 1e-2;      // gripper objective penalties
    double penalty_compliance = 1e-2;

    // [output]
    std::string output_dir = "out";
    std::uint64_t seed = 42;
    bool write_vtk = true;
};

/// Parses the line-oriented `key = value` format with [section] headers.
/// The first problem is reported with its line number; unknown keys,
/// missing required keys and type mismatches are all errors.
RunConfig parse_config(const std::string& text);

RunConfig parse_config_file(const std::string& path);

/// Canonical full-form serialization (all keys, fixed order).
std::string serialize_config(const RunConfig& cfg);

}  // namespace drto
