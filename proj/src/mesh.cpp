#include "qrpf/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qrpf {

namespace {
std::pair<int, int> ordered(int a, int b) { return {std::min(a, b), std::max(a, b)}; }
}  // namespace

double Mesh::signed_area(int element) const {
    const auto& t = triangles[element];
    Vec2 u = nodes[t[1]] - nodes[t[0]];
    Vec2 v = nodes[t[2]] - nodes[t[0]];
    return 0.5 * (u.x() * v.y() - u.y() * v.x());
}

double Mesh::total_area() const {
    double a = 0.0;
    for (int e = 0; e < triangle_count(); ++e) a += signed_area(e);
    return a;
}

double Mesh::max_edge_length() const {
    double h = 0.0;
    for (const auto& t : triangles)
        for (int k = 0; k < 3; ++k)
            h = std::max(h, (nodes[t[k]] - nodes[t[(k + 1) % 3]]).norm());
    return h;
}

std::vector<std::pair<int, int>> Mesh::boundary_edges() const {
    std::map<std::pair<int, int>, int> count;
    for (const auto& t : triangles)
        for (int k = 0; k < 3; ++k) ++count[ordered(t[k], t[(k + 1) % 3])];
    std::vector<std::pair<int, int>> edges;
    for (const auto& [edge, c] : count)
        if (c == 1) edges.push_back(edge);
    return edges;
}

void Mesh::validate() const {
    if (nodes.empty() || triangles.empty()) throw EmptyMesh("mesh has no nodes or no triangles");
    for (std::size_t e = 0; e < triangles.size(); ++e) {
        for (int idx : triangles[e])
            if (idx < 0 || idx >= node_count())
                throw MeshError("triangle " + std::to_string(e) + " references node " +
                                std::to_string(idx));
        if (signed_area(static_cast<int>(e)) <= 0.0)
            throw MeshError("triangle " + std::to_string(e) + " is not positively oriented");
    }

    // duplicate detection via lexicographic sweep
    std::vector<int> order(nodes.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (nodes[a].x() != nodes[b].x()) return nodes[a].x() < nodes[b].x();
        return nodes[a].y() < nodes[b].y();
    });
    for (std::size_t k = 0; k + 1 < order.size(); ++k) {
        for (std::size_t j = k + 1; j < order.size(); ++j) {
            if (nodes[order[j]].x() - nodes[order[k]].x() > 1e-12) break;
            if ((nodes[order[j]] - nodes[order[k]]).norm() <= 1e-12)
                throw MeshError("duplicate nodes " + std::to_string(order[k]) + " and " +
                                std::to_string(order[j]));
        }
    }

    for (const auto& edge : boundary_edges())
        if (boundary_tags.find(edge) == boundary_tags.end())
            throw MeshError("boundary edge (" + std::to_string(edge.first) + ", " +
                            std::to_string(edge.second) + ") carries no tag");
    for (const auto& [edge, tag] : boundary_tags) {
        (void)tag;
        if (edge.first < 0 || edge.second >= node_count())
            throw MeshError("boundary tag references nodes outside the mesh");
    }
}

bool Mesh::has_tag(const std::string& tag) const {
    for (const auto& [edge, t] : boundary_tags) {
        (void)edge;
        if (t == tag) return true;
    }
    return false;
}

Mesh make_square_mesh(int nx, int ny) {
    if (nx < 1 || ny < 1) throw MeshError("square mesh needs at least one cell per direction");
    Mesh mesh;
    auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i)
            mesh.nodes.push_back(Vec2(static_cast<double>(i) / nx, static_cast<double>(j) / ny));
    // alternating cell diagonals to avoid a preferred crack direction
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            int v00 = id(i, j), v10 = id(i + 1, j), v01 = id(i, j + 1), v11 = id(i + 1, j + 1);
            if ((i + j) % 2 == 0) {
                mesh.triangles.push_back({v00, v10, v11});
                mesh.triangles.push_back({v00, v11, v01});
            } else {
                mesh.triangles.push_back({v00, v10, v01});
                mesh.triangles.push_back({v10, v11, v01});
            }
        }
    for (int i = 0; i < nx; ++i) {
        mesh.boundary_tags[ordered(id(i, 0), id(i + 1, 0))] = "bottom";
        mesh.boundary_tags[ordered(id(i, ny), id(i + 1, ny))] = "top";
    }
    for (int j = 0; j < ny; ++j) {
        mesh.boundary_tags[ordered(id(0, j), id(0, j + 1))] = "left";
        mesh.boundary_tags[ordered(id(nx, j), id(nx, j + 1))] = "right";
    }
    mesh.validate();
    return mesh;
}

Mesh make_square_with_hole(int n_rho, int n_phi, double radius) {
    if (n_rho < 1 || n_phi < 8) throw MeshError("hole mesh needs n_rho >= 1 and n_phi >= 8");
    if (!(radius > 0.0) || radius >= 0.5)
        throw MeshError("cavity radius must lie in (0, 0.5) for a unit square");
    Mesh mesh;
    const Vec2 center(0.5, 0.5);
    auto id = [n_phi](int i, int k) { return i * n_phi + k; };
    for (int i = 0; i <= n_rho; ++i) {
        double rho = static_cast<double>(i) / n_rho;
        for (int k = 0; k < n_phi; ++k) {
            double phi = 2.0 * M_PI * k / n_phi;
            Vec2 dir(std::cos(phi), std::sin(phi));
            // ray leaves the cavity at radius `radius` and hits the square at t_max
            double t_max = 0.5 / std::max(std::abs(dir.x()), std::abs(dir.y()));
            double r = radius + rho * (t_max - radius);
            mesh.nodes.push_back(center + r * dir);
        }
    }
    for (int i = 0; i < n_rho; ++i)
        for (int k = 0; k < n_phi; ++k) {
            int kn = (k + 1) % n_phi;
            int a = id(i, k), b = id(i + 1, k), c = id(i + 1, kn), d = id(i, kn);
            mesh.triangles.push_back({a, b, c});
            mesh.triangles.push_back({a, c, d});
        }
    for (int k = 0; k < n_phi; ++k) {
        int kn = (k + 1) % n_phi;
        mesh.boundary_tags[ordered(id(0, k), id(0, kn))] = "cavity";
        mesh.boundary_tags[ordered(id(n_rho, k), id(n_rho, kn))] = "outer";
    }
    mesh.validate();
    return mesh;
}

}  // namespace qrpf
