#include "micromorph/fespace.hpp"

#include "micromorph/errors.hpp"

#include <cmath>

namespace micromorph {

namespace {

DofMap build_map(DofKind kind, const std::vector<bool>& boundary)
{
    DofMap d;
    d.kind = kind;
    d.entity_to_free.assign(boundary.size(), -1);
    for (std::size_t i = 0; i < boundary.size(); ++i) {
        if (boundary[i])
            d.constrained_entities.push_back(static_cast<int>(i));
        else
            d.entity_to_free[i] = d.n_free_entities++;
    }
    d.n_dofs = 3 * d.n_free_entities;
    return d;
}

}  // namespace

DofMap build_u_space(const BoxMesh& m) { return build_map(DofKind::NodalVector, m.boundary_vertex); }

DofMap build_p_space(const BoxMesh& m) { return build_map(DofKind::EdgeRows, m.boundary_edge); }

FESystem make_fe_system(BoxMesh mesh)
{
    FESystem sys;
    sys.u_space = build_u_space(mesh);
    sys.p_space = build_p_space(mesh);
    sys.mesh = std::move(mesh);
    return sys;
}

const QuadratureRule& tet_quadrature_degree2()
{
    static const QuadratureRule rule = [] {
        QuadratureRule q;
        const double a = 0.5854101966249685;  // (5 + 3 sqrt5) / 20
        const double b = 0.1381966011250105;  // (5 - sqrt5) / 20
        q.points = {{a, b, b, b}, {b, a, b, b}, {b, b, a, b}, {b, b, b, a}};
        q.weights.assign(4, 1.0 / 24.0);
        q.degree = 2;
        return q;
    }();
    return rule;
}

CellGeometry cell_geometry(const BoxMesh& m, std::size_t cell)
{
    const auto& t = m.cells[cell];
    const Vector3& x0 = m.vertices[static_cast<std::size_t>(t[0])];
    Matrix3 jac;
    for (int c = 0; c < 3; ++c)
        jac.col(c) = m.vertices[static_cast<std::size_t>(t[c + 1])] - x0;
    // lambda_{1..3} = rows of J^{-1} applied to (x - x0)
    const Matrix3 inv = jac.inverse();
    CellGeometry g;
    for (int a = 1; a < 4; ++a)
        g.grad_lambda[a] = inv.row(a - 1).transpose();
    g.grad_lambda[0] = -(g.grad_lambda[1] + g.grad_lambda[2] + g.grad_lambda[3]);
    g.volume = std::abs(jac.determinant()) / 6.0;
    return g;
}

Vector3 physical_point(const BoxMesh& m, std::size_t cell, const std::array<double, 4>& bary)
{
    Vector3 x = Vector3::Zero();
    for (int a = 0; a < 4; ++a)
        x += bary[a] * m.vertices[static_cast<std::size_t>(m.cells[cell][a])];
    return x;
}

UBasisValues eval_u_basis(const BoxMesh& m, std::size_t cell, const std::array<double, 4>& bary)
{
    const CellGeometry g = cell_geometry(m, cell);
    UBasisValues v;
    for (int a = 0; a < 4; ++a) {
        v.values[a] = bary[a];
        v.gradients[a] = g.grad_lambda[a];
    }
    return v;
}

PBasisValues eval_p_basis(const BoxMesh& m, std::size_t cell, const std::array<double, 4>& bary)
{
    const CellGeometry g = cell_geometry(m, cell);
    PBasisValues v;
    for (int e = 0; e < 6; ++e) {
        const int a = kTetEdges[e][0];
        const int b = kTetEdges[e][1];
        const double s = m.edge_sign(cell, e);
        v.values[e] = s * (bary[a] * g.grad_lambda[b] - bary[b] * g.grad_lambda[a]);
        v.curls[e] = s * 2.0 * g.grad_lambda[a].cross(g.grad_lambda[b]);
    }
    return v;
}

Eigen::VectorXd interpolate_u(const FESystem& sys, const VectorField& u)
{
    Eigen::VectorXd out = Eigen::VectorXd::Zero(sys.u_space.n_dofs);
    for (std::size_t v = 0; v < sys.mesh.n_vertices(); ++v) {
        if (sys.u_space.entity_to_free[v] < 0)
            continue;
        const Vector3 val = u(sys.mesh.vertices[v]);
        for (int c = 0; c < 3; ++c)
            out(sys.u_space.dof(static_cast<int>(v), c)) = val(c);
    }
    return out;
}

Eigen::MatrixXd edge_moments(const BoxMesh& m, const TensorField& p)
{
    // 3-point Gauss-Legendre on [0, 1]
    static constexpr std::array<double, 3> nodes{0.1127016653792583, 0.5, 0.8872983346207417};
    static constexpr std::array<double, 3> weights{5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
    Eigen::MatrixXd out(static_cast<Eigen::Index>(m.n_edges()), 3);
    for (std::size_t e = 0; e < m.n_edges(); ++e) {
        const Vector3& a = m.vertices[static_cast<std::size_t>(m.edges[e][0])];
        const Vector3& b = m.vertices[static_cast<std::size_t>(m.edges[e][1])];
        const Vector3 tangent = b - a;
        Vector3 acc = Vector3::Zero();
        for (std::size_t q = 0; q < nodes.size(); ++q)
            acc += weights[q] * (p(a + nodes[q] * tangent) * tangent);
        out.row(static_cast<Eigen::Index>(e)) = acc.transpose();
    }
    return out;
}

Eigen::VectorXd interpolate_p(const FESystem& sys, const TensorField& p)
{
    const Eigen::MatrixXd moments = edge_moments(sys.mesh, p);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(sys.p_space.n_dofs);
    for (std::size_t e = 0; e < sys.mesh.n_edges(); ++e) {
        if (sys.p_space.entity_to_free[e] < 0)
            continue;
        for (int r = 0; r < 3; ++r)
            out(sys.p_space.dof(static_cast<int>(e), r)) = moments(static_cast<Eigen::Index>(e), r);
    }
    return out;
}

Vector3 evaluate_u(const FESystem& sys, const Eigen::VectorXd& u_block, std::size_t cell,
                   const std::array<double, 4>& bary)
{
    Vector3 u = Vector3::Zero();
    for (int a = 0; a < 4; ++a)
        for (int c = 0; c < 3; ++c) {
            const int d = sys.u_space.dof(sys.mesh.cells[cell][a], c);
            if (d >= 0)
                u(c) += bary[a] * u_block(d);
        }
    return u;
}

Matrix3 evaluate_grad_u(const FESystem& sys, const Eigen::VectorXd& u_block, std::size_t cell)
{
    const CellGeometry g = cell_geometry(sys.mesh, cell);
    Matrix3 grad = Matrix3::Zero();
    for (int a = 0; a < 4; ++a)
        for (int c = 0; c < 3; ++c) {
            const int d = sys.u_space.dof(sys.mesh.cells[cell][a], c);
            if (d >= 0)
                grad.row(c) += u_block(d) * g.grad_lambda[a].transpose();
        }
    return grad;
}

Matrix3 evaluate_p(const FESystem& sys, const Eigen::VectorXd& p_block, std::size_t cell,
                   const std::array<double, 4>& bary)
{
    const PBasisValues b = eval_p_basis(sys.mesh, cell, bary);
    Matrix3 p = Matrix3::Zero();
    for (int e = 0; e < 6; ++e)
        for (int r = 0; r < 3; ++r) {
            const int d = sys.p_space.dof(sys.mesh.cell_edges[cell][e], r);
            if (d >= 0)
                p.row(r) += p_block(d) * b.values[e].transpose();
        }
    return p;
}

Matrix3 evaluate_curl_p(const FESystem& sys, const Eigen::VectorXd& p_block, std::size_t cell)
{
    const PBasisValues b = eval_p_basis(sys.mesh, cell, {0.25, 0.25, 0.25, 0.25});
    Matrix3 curl = Matrix3::Zero();
    for (int e = 0; e < 6; ++e)
        for (int r = 0; r < 3; ++r) {
            const int d = sys.p_space.dof(sys.mesh.cell_edges[cell][e], r);
            if (d >= 0)
                curl.row(r) += p_block(d) * b.curls[e].transpose();
        }
    return curl;
}

}  // namespace micromorph
