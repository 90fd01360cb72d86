#include "micromorph/mesh.hpp"

#include "micromorph/errors.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

namespace micromorph {

double signed_volume(const Eigen::Vector3d& a, const Eigen::Vector3d& b, const Eigen::Vector3d& c,
                     const Eigen::Vector3d& d)
{
    return (b - a).dot((c - a).cross(d - a)) / 6.0;
}

BoxMesh build_box_mesh(const Eigen::Vector3d& dims, const std::array<int, 3>& resolution,
                       const Eigen::Vector3d& origin)
{
    for (int a = 0; a < 3; ++a) {
        if (!(dims(a) > 0.0) || !std::isfinite(dims(a)))
            throw ParameterError("box dimensions must be positive");
        if (resolution[a] < 1)
            throw ParameterError("mesh resolution must be >= 1 in every direction");
    }

    BoxMesh m;
    m.origin = origin;
    m.dims = dims;
    m.resolution = resolution;
    const auto [nx, ny, nz] = resolution;

    auto vid = [&](int i, int j, int k) { return i + (nx + 1) * (j + (ny + 1) * k); };

    m.vertices.reserve(static_cast<std::size_t>((nx + 1) * (ny + 1) * (nz + 1)));
    m.boundary_vertex.reserve(m.vertices.capacity());
    for (int k = 0; k <= nz; ++k)
        for (int j = 0; j <= ny; ++j)
            for (int i = 0; i <= nx; ++i) {
                m.vertices.emplace_back(origin(0) + dims(0) * i / nx, origin(1) + dims(1) * j / ny,
                                        origin(2) + dims(2) * k / nz);
                m.boundary_vertex.push_back(i == 0 || i == nx || j == 0 || j == ny || k == 0 || k == nz);
            }

    // Kuhn split: one tetrahedron per axis permutation, all sharing the
    // diagonal from the cube's low corner to its high corner.
    static constexpr std::array<std::array<int, 3>, 6> perms{
        {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
    m.cells.reserve(static_cast<std::size_t>(6 * nx * ny * nz));
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i)
                for (const auto& p : perms) {
                    std::array<int, 3> c{i, j, k};
                    std::array<int, 4> tet{};
                    tet[0] = vid(c[0], c[1], c[2]);
                    for (int s = 0; s < 3; ++s) {
                        ++c[p[s]];
                        tet[s + 1] = vid(c[0], c[1], c[2]);
                    }
                    double vol = signed_volume(m.vertices[tet[0]], m.vertices[tet[1]], m.vertices[tet[2]],
                                               m.vertices[tet[3]]);
                    if (vol < 0.0) {
                        std::swap(tet[2], tet[3]);
                        vol = -vol;
                    }
                    m.cells.push_back(tet);
                    m.cell_volumes.push_back(vol);
                }

    std::map<std::array<int, 2>, int> edge_index;
    std::map<std::array<int, 3>, int> face_count;
    for (const auto& tet : m.cells) {
        for (const auto& le : kTetEdges) {
            std::array<int, 2> e{tet[le[0]], tet[le[1]]};
            if (e[0] > e[1])
                std::swap(e[0], e[1]);
            edge_index.emplace(e, 0);
        }
        for (int skip = 0; skip < 4; ++skip) {
            std::array<int, 3> f{};
            int n = 0;
            for (int v = 0; v < 4; ++v)
                if (v != skip)
                    f[n++] = tet[v];
            std::sort(f.begin(), f.end());
            ++face_count[f];
        }
    }
    m.edges.reserve(edge_index.size());
    for (auto& [e, idx] : edge_index) {
        idx = static_cast<int>(m.edges.size());
        m.edges.push_back(e);
    }
    m.boundary_edge.assign(m.edges.size(), false);
    for (const auto& [f, count] : face_count) {
        m.faces.push_back(f);
        const bool on_boundary = count == 1;
        m.boundary_face.push_back(on_boundary);
        if (on_boundary) {
            m.boundary_edge[edge_index.at({f[0], f[1]})] = true;
            m.boundary_edge[edge_index.at({f[0], f[2]})] = true;
            m.boundary_edge[edge_index.at({f[1], f[2]})] = true;
        }
    }
    m.cell_edges.reserve(m.cells.size());
    for (const auto& tet : m.cells) {
        std::array<int, 6> ce{};
        for (int e = 0; e < 6; ++e) {
            std::array<int, 2> key{tet[kTetEdges[e][0]], tet[kTetEdges[e][1]]};
            if (key[0] > key[1])
                std::swap(key[0], key[1]);
            ce[e] = edge_index.at(key);
        }
        m.cell_edges.push_back(ce);
    }
    return m;
}

MeshDiagnostics validate_mesh(const BoxMesh& m)
{
    MeshDiagnostics d;
    auto fail = [&d](const std::string& s) { d.violations.push_back(s); };

    d.min_cell_volume = m.cells.empty() ? 0.0 : std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < m.cells.size(); ++c) {
        const auto& t = m.cells[c];
        const double vol = signed_volume(m.vertices[t[0]], m.vertices[t[1]], m.vertices[t[2]], m.vertices[t[3]]);
        d.volume_sum += vol;
        d.min_cell_volume = std::min(d.min_cell_volume, vol);
        if (!(vol > 0.0)) {
            d.orientation_consistent = false;
            std::ostringstream os;
            os << "orientation: cell " << c << " has non-positive signed volume " << vol;
            fail(os.str());
        }
        if (c < m.cell_volumes.size() && std::abs(m.cell_volumes[c] - vol) > 1e-12 * std::abs(vol)) {
            std::ostringstream os;
            os << "cell " << c << " stored volume disagrees with geometry";
            fail(os.str());
        }
        if (c < m.cell_edges.size()) {
            for (int e = 0; e < 6; ++e) {
                const auto& ge = m.edges[m.cell_edges[c][e]];
                const int a = t[kTetEdges[e][0]];
                const int b = t[kTetEdges[e][1]];
                if (!((ge[0] == a && ge[1] == b) || (ge[0] == b && ge[1] == a))) {
                    d.orientation_consistent = false;
                    std::ostringstream os;
                    os << "orientation: cell " << c << " local edge " << e << " does not match its global edge";
                    fail(os.str());
                }
            }
        }
    }
    for (std::size_t e = 0; e < m.edges.size(); ++e)
        if (m.edges[e][0] >= m.edges[e][1]) {
            d.orientation_consistent = false;
            fail("orientation: edge " + std::to_string(e) + " is not oriented low -> high");
        }

    if (std::abs(d.volume_sum - m.box_volume()) > 1e-12 * m.box_volume()) {
        std::ostringstream os;
        os << std::setprecision(17) << "volume: cells sum to " << d.volume_sum << ", box volume is " << m.box_volume();
        fail(os.str());
    }

    d.euler_characteristic = static_cast<long>(m.n_vertices()) - static_cast<long>(m.n_edges()) +
                             static_cast<long>(m.n_faces()) - static_cast<long>(m.n_cells());
    if (d.euler_characteristic != 1)
        fail("topology: Euler characteristic is " + std::to_string(d.euler_characteristic) + ", expected 1");

    return d;
}

void write_mesh_text(const BoxMesh& m, std::ostream& os)
{
    os << "# box-mesh vertices " << m.n_vertices() << " cells " << m.n_cells() << '\n';
    os << std::setprecision(17);
    for (std::size_t i = 0; i < m.vertices.size(); ++i)
        os << "v " << i << ' ' << m.vertices[i](0) << ' ' << m.vertices[i](1) << ' ' << m.vertices[i](2) << '\n';
    for (std::size_t c = 0; c < m.cells.size(); ++c) {
        const auto& t = m.cells[c];
        os << "c " << c << ' ' << t[0] << ' ' << t[1] << ' ' << t[2] << ' ' << t[3] << ' ' << m.cell_volumes[c]
           << '\n';
    }
}

}  // namespace micromorph
