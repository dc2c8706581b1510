#include "drto/io.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace drto {

namespace {

// Atomic write: temp file in the same directory, then rename.
class AtomicFile {
  public:
    explicit AtomicFile(const std::string& path) : path_(path), tmp_(path + ".tmp") {
        stream_.open(tmp_, std::ios::binary);
        if (!stream_) throw std::runtime_error("cannot open '" + tmp_ + "' for writing");
    }
    std::ofstream& stream() { return stream_; }
    void commit() {
        stream_.close();
        if (!stream_) throw std::runtime_error("write to '" + tmp_ + "' failed");
        std::filesystem::rename(tmp_, path_);
    }

  private:
    std::string path_, tmp_;
    std::ofstream stream_;
};

std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void write_density_pgm(const DensityField& h, const StructuredGrid& grid,
                       const std::string& path) {
    h.validate(grid);
    AtomicFile file(path);
    file.stream() << "P5\n" << grid.nx << " " << grid.ny << "\n255\n";
    std::vector<unsigned char> row(static_cast<size_t>(grid.nx));
    for (int j = grid.ny - 1; j >= 0; --j) {
        for (int i = 0; i < grid.nx; ++i)
            row[static_cast<size_t>(i)] = static_cast<unsigned char>(
                std::lround(255.0 * (1.0 - h[grid.element(i, j)])));
        file.stream().write(reinterpret_cast<const char*>(row.data()),
                            static_cast<std::streamsize>(row.size()));
    }
    file.commit();
}

void write_field_vtk(const std::vector<std::pair<std::string, std::vector<double>>>& fields,
                     const StructuredGrid& grid, const std::string& path) {
    AtomicFile file(path);
    auto& out = file.stream();
    out << "# vtk DataFile Version 3.0\n";
    out << "drto element fields\n";
    out << "ASCII\n";
    out << "DATASET STRUCTURED_POINTS\n";
    out << "DIMENSIONS " << grid.nx + 1 << " " << grid.ny + 1 << " 1\n";
    out << "ORIGIN 0 0 0\n";
    out << "SPACING " << format_full(grid.hx()) << " " << format_full(grid.hy()) << " 1\n";
    out << "CELL_DATA " << grid.num_elements() << "\n";
    for (const auto& [name, values] : fields) {
        if (static_cast<int>(values.size()) != grid.num_elements())
            throw std::invalid_argument("vtk: field '" + name + "' has wrong size");
        out << "SCALARS " << name << " double 1\n";
        out << "LOOKUP_TABLE default\n";
        for (double v : values) out << format_full(v) << "\n";
    }
    file.commit();
}

VtkFields read_field_vtk(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    VtkFields out;
    std::string line;
    int ncells = 0;
    while (std::getline(in, line)) {
        std::istringstream ss(line);
        std::string tag;
        ss >> tag;
        if (tag == "DIMENSIONS") {
            int dx = 0, dy = 0, dz = 0;
            ss >> dx >> dy >> dz;
            out.nx = dx - 1;
            out.ny = dy - 1;
        } else if (tag == "SPACING") {
            ss >> out.hx >> out.hy;
        } else if (tag == "CELL_DATA") {
            ss >> ncells;
        } else if (tag == "SCALARS") {
            std::string name;
            ss >> name;
            std::getline(in, line);  // LOOKUP_TABLE
            std::vector<double> values(static_cast<size_t>(ncells), 0.0);
            for (int i = 0; i < ncells; ++i)
                if (!(in >> values[static_cast<size_t>(i)]))
                    throw std::runtime_error("vtk: truncated data in '" + path + "'");
            in.ignore();
            out.data[name] = std::move(values);
        }
    }
    if (out.nx <= 0 || out.ny <= 0 || out.data.empty())
        throw std::runtime_error("vtk: no readable cell fields in '" + path + "'");
    return out;
}

std::vector<double> read_density(const std::string& path) {
    if (path.size() > 4 && path.substr(path.size() - 4) == ".pgm") {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw std::runtime_error("cannot open '" + path + "'");
        std::string magic;
        int nx = 0, ny = 0, maxval = 0;
        in >> magic >> nx >> ny >> maxval;
        if (magic != "P5" || maxval != 255)
            throw std::runtime_error("'" + path + "' is not a P5 maxval-255 PGM");
        in.ignore();  // single whitespace after header
        std::vector<unsigned char> pix(static_cast<size_t>(nx) * static_cast<size_t>(ny));
        in.read(reinterpret_cast<char*>(pix.data()), static_cast<std::streamsize>(pix.size()));
        if (!in) throw std::runtime_error("'" + path + "': truncated pixel data");
        std::vector<double> h(pix.size(), 0.0);
        // undo the top-to-bottom row order
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i)
                h[static_cast<size_t>(j) * nx + i] =
                    1.0 - pix[static_cast<size_t>(ny - 1 - j) * nx + i] / 255.0;
        return h;
    }
    const VtkFields fields = read_field_vtk(path);
    auto it = fields.data.find("density");
    if (it == fields.data.end())
        throw std::runtime_error("'" + path + "' carries no 'density' array");
    return it->second;
}

void write_log_csv(const ConvergenceLog& log, const std::string& path) {
    AtomicFile file(path);
    auto& out = file.stream();
    out << "iter,objective,volume,lambda,alpha,step_norm,constraint,tau_norm,s_trace\n";
    for (const auto& r : log) {
        out << r.iter << "," << format_full(r.objective) << "," << format_full(r.volume) << ","
            << format_full(r.lambda) << "," << format_full(r.alpha) << ","
            << format_full(r.step_norm) << "," << format_full(r.constraint) << ","
            << format_full(r.tau_norm) << "," << format_full(r.s_trace) << "\n";
    }
    file.commit();
}

ConvergenceLog read_log_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("csv: empty file '" + path + "'");
    ConvergenceLog log;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        LogRow r;
        if (std::sscanf(line.c_str(),
                        "%" SCNu64 ",%lg,%lg,%lg,%lg,%lg,%lg,%lg,%lg", &r.iter, &r.objective,
                        &r.volume, &r.lambda, &r.alpha, &r.step_norm, &r.constraint, &r.tau_norm,
                        &r.s_trace) != 9)
            throw std::runtime_error("csv: malformed row '" + line + "'");
        log.push_back(r);
    }
    return log;
}

}  // namespace drto
