#include "micromorph/fespace.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <set>

using namespace micromorph;

namespace {

FESystem unit_system(int n) { return make_fe_system(build_box_mesh(Eigen::Vector3d::Ones(), {n, n, n})); }

std::array<double, 4> corner(int a)
{
    std::array<double, 4> b{0, 0, 0, 0};
    b[static_cast<std::size_t>(a)] = 1.0;
    return b;
}

// 3-point Gauss-Legendre on [0, 1].
constexpr double kGx[3] = {0.1127016653792583, 0.5, 0.8872983346207417};
constexpr double kGw[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};

}  // namespace

TEST(DofMaps, UnitBoxCounts)
{
    EXPECT_EQ(unit_system(1).u_space.n_dofs, 0);
    EXPECT_EQ(unit_system(2).u_space.n_dofs, 3);
    EXPECT_EQ(unit_system(3).u_space.n_dofs, 24);
    EXPECT_EQ(unit_system(1).p_space.n_dofs, 3);
}

TEST(DofMaps, PartitionAndGrowth)
{
    int prev_interior = -1;
    long prev_boundary = -1;
    for (int n = 1; n <= 4; ++n) {
        const auto sys = unit_system(n);
        const auto& p = sys.p_space;
        EXPECT_EQ(p.n_dofs + p.n_constrained_dofs(), 3 * static_cast<int>(sys.mesh.n_edges()));
        EXPECT_EQ(sys.u_space.n_dofs + sys.u_space.n_constrained_dofs(), 3 * static_cast<int>(sys.mesh.n_vertices()));
        EXPECT_EQ(sys.u_space.n_dofs, 3 * (n - 1) * (n - 1) * (n - 1));
        const long boundary = static_cast<long>(p.constrained_entities.size());
        EXPECT_EQ(boundary, 18L * n * n);
        EXPECT_GT(p.n_free_entities, prev_interior);
        EXPECT_GT(boundary, prev_boundary);
        prev_interior = p.n_free_entities;
        prev_boundary = boundary;
        for (int v : sys.u_space.constrained_entities)
            EXPECT_TRUE(sys.mesh.boundary_vertex[static_cast<std::size_t>(v)]);
        for (int e : p.constrained_entities)
            EXPECT_TRUE(sys.mesh.boundary_edge[static_cast<std::size_t>(e)]);
    }
}

TEST(Quadrature, ExactForQuadraticsOnReferenceCell)
{
    const auto& q = tet_quadrature_degree2();
    EXPECT_EQ(q.degree, 2);
    double wsum = 0.0;
    for (double w : q.weights)
        wsum += w;
    EXPECT_NEAR(wsum, 1.0 / 6.0, 1e-16);
    for (int a = 0; a < 4; ++a) {
        double lin = 0.0;
        for (std::size_t k = 0; k < q.weights.size(); ++k)
            lin += q.weights[k] * q.points[k][a];
        EXPECT_NEAR(lin, 1.0 / 24.0, 1e-16);
        for (int b = 0; b < 4; ++b) {
            double quad = 0.0;
            for (std::size_t k = 0; k < q.weights.size(); ++k)
                quad += q.weights[k] * q.points[k][a] * q.points[k][b];
            EXPECT_NEAR(quad, (a == b ? 2.0 : 1.0) / 120.0, 1e-16);
        }
    }
}

TEST(UBasis, PartitionOfUnityAndLinearReproduction)
{
    const auto m = build_box_mesh(Eigen::Vector3d(1.0, 2.0, 0.5), {2, 3, 2}, Eigen::Vector3d(0.3, -1, 2));
    oracle::Gen g(21);
    const Vector3 a = g.vector(3);
    for (std::size_t c = 0; c < m.n_cells(); c += 5) {
        for (int trial = 0; trial < 4; ++trial) {
            std::array<double, 4> bary;
            double s = 0;
            for (auto& b : bary)
                s += b = g.uniform(0, 1);
            for (auto& b : bary)
                b /= s;
            const auto v = eval_u_basis(m, c, bary);
            double sum = 0;
            Vector3 gsum = Vector3::Zero();
            double interp = 0;
            for (int k = 0; k < 4; ++k) {
                sum += v.values[k];
                gsum += v.gradients[k];
                interp += v.values[k] * a.dot(m.vertices[m.cells[c][k]]);
            }
            EXPECT_NEAR(sum, 1.0, 1e-14);
            EXPECT_LE(gsum.norm(), 1e-12);
            EXPECT_NEAR(interp, a.dot(physical_point(m, c, bary)), 1e-13);
        }
    }
}

TEST(PBasis, UnitCirculationAndDuality)
{
    const auto m = build_box_mesh(Eigen::Vector3d(1.0, 0.7, 1.3), {2, 2, 2});
    for (std::size_t c = 0; c < m.n_cells(); ++c) {
        for (int e = 0; e < 6; ++e) {
            // Integrate every basis function along edge e in its global direction.
            int la = kTetEdges[e][0], lb = kTetEdges[e][1];
            if (m.cells[c][la] > m.cells[c][lb])
                std::swap(la, lb);
            const Vector3 tangent = m.vertices[m.cells[c][lb]] - m.vertices[m.cells[c][la]];
            std::array<double, 6> circ{};
            for (int k = 0; k < 3; ++k) {
                std::array<double, 4> bary{0, 0, 0, 0};
                bary[la] = 1.0 - kGx[k];
                bary[lb] = kGx[k];
                const auto v = eval_p_basis(m, c, bary);
                for (int f = 0; f < 6; ++f)
                    circ[f] += kGw[k] * v.values[f].dot(tangent);
            }
            for (int f = 0; f < 6; ++f)
                EXPECT_NEAR(circ[f], f == e ? 1.0 : 0.0, 1e-14);
        }
    }
}

TEST(PBasis, CurlIsTwiceCrossOfBarycentricGradients)
{
    const auto m = build_box_mesh(Eigen::Vector3d::Ones(), {1, 2, 1});
    for (std::size_t c = 0; c < m.n_cells(); ++c) {
        const auto geo = cell_geometry(m, c);
        const auto v = eval_p_basis(m, c, {0.25, 0.25, 0.25, 0.25});
        for (int e = 0; e < 6; ++e) {
            const Vector3 expect = 2.0 * m.edge_sign(c, e) *
                                   geo.grad_lambda[kTetEdges[e][0]].cross(geo.grad_lambda[kTetEdges[e][1]]);
            EXPECT_LE((v.curls[e] - expect).norm(), 1e-12);
        }
    }
}

TEST(PBasis, CurlMatchesFiniteDifferences)
{
    const auto m = build_box_mesh(Eigen::Vector3d::Ones(), {2, 2, 2});
    const std::size_t c = 7;
    const std::array<double, 4> b0{0.3, 0.2, 0.25, 0.25};
    const auto geo = cell_geometry(m, c);
    const auto v = eval_p_basis(m, c, b0);
    const double h = 1e-6;
    for (int e = 0; e < 6; ++e) {
        Eigen::Matrix3d jac;  // jac(i, j) = d W_i / d x_j
        for (int j = 0; j < 3; ++j) {
            std::array<double, 4> bp = b0, bm = b0;
            for (int a = 0; a < 4; ++a) {
                bp[a] += h * geo.grad_lambda[a](j);
                bm[a] -= h * geo.grad_lambda[a](j);
            }
            jac.col(j) = (eval_p_basis(m, c, bp).values[e] - eval_p_basis(m, c, bm).values[e]) / (2 * h);
        }
        const Vector3 curl(jac(2, 1) - jac(1, 2), jac(0, 2) - jac(2, 0), jac(1, 0) - jac(0, 1));
        EXPECT_LE((curl - v.curls[e]).norm(), 1e-7 * (1 + curl.norm()));
    }
}

TEST(PBasis, ConstantFieldReproducedWithZeroCurl)
{
    const auto m = build_box_mesh(Eigen::Vector3d(1.0, 2.0, 1.5), {2, 1, 2});
    oracle::Gen g(22);
    const Matrix3 cst = g.matrix3();
    const Eigen::MatrixXd mom = edge_moments(m, [&](const Vector3&) { return cst; });
    for (std::size_t c = 0; c < m.n_cells(); ++c) {
        for (const auto& bary : tet_quadrature_degree2().points) {
            const auto v = eval_p_basis(m, c, bary);
            Matrix3 p = Matrix3::Zero(), curl = Matrix3::Zero();
            for (int e = 0; e < 6; ++e)
                for (int i = 0; i < 3; ++i) {
                    p.row(i) += mom(m.cell_edges[c][e], i) * v.values[e].transpose();
                    curl.row(i) += mom(m.cell_edges[c][e], i) * v.curls[e].transpose();
                }
            EXPECT_LE((p - cst).norm(), 1e-13);
            EXPECT_LE(curl.norm(), 1e-12);
        }
    }
}

TEST(PSpace, TangentialTraceIsContinuousAcrossInteriorFaces)
{
    const auto sys = unit_system(3);
    const auto& m = sys.mesh;
    oracle::Gen g(23);
    const Eigen::VectorXd coeffs = g.vector(sys.p_space.n_dofs);

    std::map<std::array<int, 3>, std::vector<std::size_t>> owners;
    for (std::size_t c = 0; c < m.n_cells(); ++c)
        for (int skip = 0; skip < 4; ++skip) {
            std::array<int, 3> f{};
            int k = 0;
            for (int a = 0; a < 4; ++a)
                if (a != skip)
                    f[k++] = m.cells[c][a];
            std::sort(f.begin(), f.end());
            owners[f].push_back(c);
        }

    auto bary_in = [&](std::size_t c, const std::array<int, 3>& f, const Vector3& w) {
        std::array<double, 4> b{0, 0, 0, 0};
        for (int a = 0; a < 4; ++a)
            for (int k = 0; k < 3; ++k)
                if (m.cells[c][a] == f[k])
                    b[a] = w(k);
        return b;
    };

    int checked = 0;
    for (const auto& [f, cells] : owners) {
        if (cells.size() != 2)
            continue;
        const Vector3 t1 = m.vertices[f[1]] - m.vertices[f[0]];
        const Vector3 t2 = m.vertices[f[2]] - m.vertices[f[0]];
        for (int s = 0; s < 2; ++s) {
            Vector3 w(g.uniform(0, 1), g.uniform(0, 1), g.uniform(0, 1));
            w /= w.sum();
            const Matrix3 pa = evaluate_p(sys, coeffs, cells[0], bary_in(cells[0], f, w));
            const Matrix3 pb = evaluate_p(sys, coeffs, cells[1], bary_in(cells[1], f, w));
            EXPECT_LE(((pa - pb) * t1).norm(), 1e-12);
            EXPECT_LE(((pa - pb) * t2).norm(), 1e-12);
            ++checked;
        }
    }
    EXPECT_GT(checked, 100);
}

TEST(Spaces, ZeroBoundaryData)
{
    const auto sys = unit_system(3);
    const auto& m = sys.mesh;
    oracle::Gen g(24);
    const Eigen::VectorXd u = g.vector(sys.u_space.n_dofs);
    const Eigen::VectorXd p = g.vector(sys.p_space.n_dofs);
    std::set<std::array<int, 3>> boundary_faces;
    for (std::size_t f = 0; f < m.n_faces(); ++f)
        if (m.boundary_face[f])
            boundary_faces.insert(m.faces[f]);
    int checked = 0;
    for (std::size_t c = 0; c < m.n_cells(); ++c) {
        for (int a = 0; a < 4; ++a)
            if (m.boundary_vertex[m.cells[c][a]])
                EXPECT_LE(evaluate_u(sys, u, c, corner(a)).norm(), 1e-15);
        for (int skip = 0; skip < 4; ++skip) {
            std::array<int, 3> loc{}, f{};
            int k = 0;
            for (int a = 0; a < 4; ++a)
                if (a != skip) {
                    loc[k] = a;
                    f[k++] = m.cells[c][a];
                }
            std::sort(f.begin(), f.end());
            if (!boundary_faces.count(f))
                continue;
            const Vector3 x0 = m.vertices[m.cells[c][loc[0]]];
            const Vector3 t1 = m.vertices[m.cells[c][loc[1]]] - x0;
            const Vector3 t2 = m.vertices[m.cells[c][loc[2]]] - x0;
            ++checked;
            std::array<double, 4> b{0, 0, 0, 0};
            b[loc[0]] = 0.2;
            b[loc[1]] = 0.5;
            b[loc[2]] = 0.3;
            const Matrix3 pv = evaluate_p(sys, p, c, b);
            EXPECT_LE((pv * t1).norm(), 1e-14);
            EXPECT_LE((pv * t2).norm(), 1e-14);
        }
    }
    EXPECT_EQ(checked, 12 * 9);
}

TEST(Spaces, DiscreteGradientsHaveZeroCurl)
{
    const auto sys = unit_system(3);
    const auto& m = sys.mesh;
    oracle::Gen g(25);
    // Three nodal potentials vanishing on the boundary; row i of P is grad phi_i.
    Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m.n_vertices()), 3);
    for (std::size_t v = 0; v < m.n_vertices(); ++v)
        if (!m.boundary_vertex[v])
            phi.row(static_cast<Eigen::Index>(v)) = g.vector(3).transpose();
    Eigen::VectorXd coeffs(sys.p_space.n_dofs);
    for (std::size_t e = 0; e < m.n_edges(); ++e)
        for (int i = 0; i < 3; ++i) {
            const int d = sys.p_space.dof(static_cast<int>(e), i);
            if (d >= 0)
                coeffs(d) = phi(m.edges[e][1], i) - phi(m.edges[e][0], i);
        }
    for (std::size_t c = 0; c < m.n_cells(); ++c) {
        EXPECT_LE(evaluate_curl_p(sys, coeffs, c).norm(), 1e-12);
        const auto geo = cell_geometry(m, c);
        Matrix3 grad = Matrix3::Zero();
        for (int a = 0; a < 4; ++a)
            grad += phi.row(m.cells[c][a]).transpose() * geo.grad_lambda[a].transpose();
        EXPECT_LE((evaluate_p(sys, coeffs, c, {0.1, 0.2, 0.3, 0.4}) - grad).norm(), 1e-12);
    }
}

TEST(Interpolation, SmoothFieldsVanishingOnBoundary)
{
    const auto sys = unit_system(2);
    // Interior vertex (0.5, 0.5, 0.5) carries the only u dofs.
    const Eigen::VectorXd u = interpolate_u(sys, [](const Vector3& x) { return Vector3(x(0), 2 * x(1), -x(2)); });
    ASSERT_EQ(u.size(), 3);
    EXPECT_NEAR(u(0), 0.5, 1e-15);
    EXPECT_NEAR(u(1), 1.0, 1e-15);
    EXPECT_NEAR(u(2), -0.5, 1e-15);

    const Matrix3 c = Matrix3::Identity();
    const Eigen::VectorXd p = interpolate_p(sys, [&](const Vector3&) { return c; });
    const Eigen::MatrixXd mom = edge_moments(sys.mesh, [&](const Vector3&) { return c; });
    for (std::size_t e = 0; e < sys.mesh.n_edges(); ++e)
        for (int i = 0; i < 3; ++i) {
            const int d = sys.p_space.dof(static_cast<int>(e), i);
            if (d >= 0)
                EXPECT_EQ(p(d), mom(static_cast<Eigen::Index>(e), i));
        }
}
