#pragma once

#include <string>
#include <vector>

#include "drto/bc.hpp"
#include "drto/grid.hpp"
#include "drto/uncertainty.hpp"

namespace drto {

/// A fully specified test-case geometry: grid, mask, boundary conditions,
/// nominal law and defaults. Non-rectangular domains (L, T) are realized as
/// masked structured grids.
struct ProblemPreset {
    std::string name;
    StructuredGrid grid;
    DomainMask mask;
    BoundaryConditions bc;
    NominalLaw nominal = NominalLaw::dirac({0.0, 0.0});
    std::vector<double> xi_nominal;     // deterministic load (or KL center)
    double volume_target = 0.0;         // absolute volume
    bool volume_constraint_default = true;
    int parameter_dim = 2;

    // target-displacement (gripper) extras
    bool target_displacement = false;
    bool material_uncertainty = false;  // parameters drive the KL modulus field
    std::vector<double> fixed_loads;    // loads when xi drives the material
    std::vector<double> u_target;       // nodal field
    std::vector<double> chi;            // per-element weight
};

/// Named presets: cantilever, mast, lbeam, bridge, gripper.
/// nx is the bounding-grid resolution along x; ny = 0 picks the preset
/// aspect ratio. patch_fraction sizes the loaded regions (fractions of the
/// side length). kl_modes sizes the parameter vector of the gripper preset.
ProblemPreset make_preset(const std::string& name, int nx, int ny, double patch_fraction,
                          int kl_modes = 10);

std::vector<std::string> preset_names();

}  // namespace drto
