#ifndef QRPF_IO_HPP
#define QRPF_IO_HPP

#include <string>
#include <vector>

#include "qrpf/fem.hpp"
#include "qrpf/mesh.hpp"

namespace qrpf {

/// ASCII mesh format:
///   nodes N        followed by N lines "x y"
///   triangles M    followed by M lines "i j k" (0-based)
///   boundary B     followed by B lines "i j tag"
Mesh read_mesh(const std::string& path);
void write_mesh(const Mesh& mesh, const std::string& path);

/// Nodal fields attached to a mesh for visualization output.
struct FieldBundle {
    const Mesh* mesh = nullptr;
    Eigen::VectorXd displacement;    ///< 2 per node (y - x)
    Eigen::VectorXd damage;          ///< 2 per node
    Eigen::VectorXd energy_density;  ///< 1 per node
};

/// Legacy ASCII VTK 2.0 unstructured grid with point data arrays
/// displacement, damage magnitude, damage vector, and energy density.
/// Byte-deterministic for identical inputs.
void write_vtk(const FieldBundle& fields, const std::string& path);

/// RFC 4180 CSV writer (CRLF line endings, quoting only where required).
class CsvWriter {
  public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header);
    ~CsvWriter();
    void row(const std::vector<std::string>& cells);
    static std::string num(double v);

  private:
    void write_line(const std::vector<std::string>& cells);
    void* file_;
};

/// Versioned binary checkpoint of the full simulation state.
void save_checkpoint(const SimulationState& state, const std::string& path);
SimulationState load_checkpoint(const std::string& path);

}  // namespace qrpf

#endif
