#pragma once

#include <Eigen/Dense>

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

namespace micromorph {

/// Local edge ordering of a tetrahedron: (0,1) (0,2) (0,3) (1,2) (1,3) (2,3).
inline constexpr std::array<std::array<int, 2>, 6> kTetEdges{{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

/// Structured tetrahedral mesh of an axis-aligned box. Each cube of the
/// nx*ny*nz grid is split into the six Kuhn tetrahedra sharing its main
/// diagonal. Edges are oriented from the lower to the higher vertex index.
struct BoxMesh {
    Eigen::Vector3d origin = Eigen::Vector3d::Zero();
    Eigen::Vector3d dims = Eigen::Vector3d::Ones();
    std::array<int, 3> resolution{1, 1, 1};

    std::vector<Eigen::Vector3d> vertices;
    std::vector<std::array<int, 2>> edges;
    std::vector<std::array<int, 3>> faces;  // sorted vertex triples
    std::vector<std::array<int, 4>> cells;
    std::vector<double> cell_volumes;        // signed
    std::vector<std::array<int, 6>> cell_edges;

    std::vector<bool> boundary_vertex;
    std::vector<bool> boundary_edge;
    std::vector<bool> boundary_face;

    std::size_t n_vertices() const { return vertices.size(); }
    std::size_t n_edges() const { return edges.size(); }
    std::size_t n_faces() const { return faces.size(); }
    std::size_t n_cells() const { return cells.size(); }

    /// +1 when local edge `e` of `cell` runs along the global orientation.
    int edge_sign(std::size_t cell, int e) const
    {
        const auto& c = cells[cell];
        return c[kTetEdges[e][0]] < c[kTetEdges[e][1]] ? 1 : -1;
    }

    double box_volume() const { return dims.prod(); }
};

BoxMesh build_box_mesh(const Eigen::Vector3d& dims, const std::array<int, 3>& resolution,
                       const Eigen::Vector3d& origin = Eigen::Vector3d::Zero());

double signed_volume(const Eigen::Vector3d& a, const Eigen::Vector3d& b, const Eigen::Vector3d& c,
                     const Eigen::Vector3d& d);

struct MeshDiagnostics {
    double volume_sum = 0.0;
    double min_cell_volume = 0.0;
    long euler_characteristic = 0;
    bool orientation_consistent = true;
    std::vector<std::string> violations;

    bool valid() const { return violations.empty(); }
};

MeshDiagnostics validate_mesh(const BoxMesh& m);

/// Plain-text dump: a header line, then `v <i> <x> <y> <z>` per vertex and
/// `c <i> <v0> <v1> <v2> <v3> <volume>` per cell.
void write_mesh_text(const BoxMesh& m, std::ostream& os);

}  // namespace micromorph
