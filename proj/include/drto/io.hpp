#pragma once

#include <map>
#include <string>
#include <vector>

#include "drto/grid.hpp"
#include "drto/optimizer.hpp"

namespace drto {

/// Binary P5 PGM, maxval 255, pixel = round(255 (1 - h)): material renders
/// dark. Rows run top to bottom.
void write_density_pgm(const DensityField& h, const StructuredGrid& grid,
                       const std::string& path);

/// Legacy ASCII VTK structured points with named per-element scalar arrays,
/// full decimal precision.
void write_field_vtk(const std::vector<std::pair<std::string, std::vector<double>>>& fields,
                     const StructuredGrid& grid, const std::string& path);

/// Reads per-element arrays back from a VTK file written by write_field_vtk.
struct VtkFields {
    int nx = 0;
    int ny = 0;
    double hx = 0.0;
    double hy = 0.0;
    std::map<std::string, std::vector<double>> data;
};
VtkFields read_field_vtk(const std::string& path);

/// Reads a density from either a .vtk (array "density") or a .pgm file.
std::vector<double> read_density(const std::string& path);

void write_log_csv(const ConvergenceLog& log, const std::string& path);
ConvergenceLog read_log_csv(const std::string& path);

}  // namespace drto
