#ifndef QRPF_MESH_HPP
#define QRPF_MESH_HPP

#include <array>
#include <map>
#include <string>
#include <vector>

#include "qrpf/kinematics.hpp"

namespace qrpf {

/// Triangulated 2D domain. Triangles are positively oriented; boundary edges
/// carry a tag used to attach boundary conditions.
struct Mesh {
    std::vector<Vec2> nodes;
    std::vector<std::array<int, 3>> triangles;
    std::map<std::pair<int, int>, std::string> boundary_tags;  // key: (min, max) node pair

    int node_count() const { return static_cast<int>(nodes.size()); }
    int triangle_count() const { return static_cast<int>(triangles.size()); }

    double signed_area(int element) const;
    double total_area() const;
    double max_edge_length() const;

    /// Edges adjacent to exactly one triangle, as (min, max) node pairs.
    std::vector<std::pair<int, int>> boundary_edges() const;

    /// Orientation, duplicate nodes (1e-12), index ranges, boundary coverage.
    /// Throws MeshError / EmptyMesh.
    void validate() const;

    bool has_tag(const std::string& tag) const;
};

/// Uniform triangulation of [0,1]^2 with nx * ny cells split into two
/// triangles each. Boundary tags: left, right, bottom, top.
Mesh make_square_mesh(int nx, int ny);

/// O-grid between a circular cavity of given radius (centered at (0.5, 0.5))
/// and the unit-square boundary; n_rho radial layers, n_phi angular sectors.
/// Boundary tags: cavity, outer.
Mesh make_square_with_hole(int n_rho, int n_phi, double radius);

}  // namespace qrpf

#endif
