/**
 * @file fespace.hpp
 * @brief Discrete H1_0 x H_0(Curl) spaces on a BoxMesh.
 *
 * u is continuous piecewise linear (three components per interior vertex).
 * Each row P_i of the micro-distortion is a lowest-order Whitney edge field;
 * boundary edges carry zero tangential trace and are eliminated. Global
 * coefficient vectors are laid out as [u-block | P-block]:
 *
 *   u-block: dof = 3 * (interior vertex index) + component
 *   P-block: dof = row * (number of interior edges) + (interior edge index)
 */
#pragma once

#include "micromorph/mesh.hpp"
#include "micromorph/tensors.hpp"

#include <array>
#include <functional>
#include <vector>

namespace micromorph {

enum class DofKind { NodalVector, EdgeRows };

struct DofMap {
    DofKind kind = DofKind::NodalVector;
    int n_dofs = 0;
    int n_free_entities = 0;
    /// Per mesh entity (vertex or edge): free index, or -1 when constrained.
    std::vector<int> entity_to_free;
    std::vector<int> constrained_entities;

    /// Global dof of (entity, component/row) within this block, -1 when constrained.
    int dof(int entity, int component) const
    {
        const int f = entity_to_free[static_cast<std::size_t>(entity)];
        if (f < 0)
            return -1;
        return kind == DofKind::NodalVector ? 3 * f + component : component * n_free_entities + f;
    }
    int n_constrained_dofs() const { return 3 * static_cast<int>(constrained_entities.size()); }
};

DofMap build_u_space(const BoxMesh& m);
DofMap build_p_space(const BoxMesh& m);

struct BlockLayout {
    int u_offset = 0;
    int u_size = 0;
    int p_offset = 0;
    int p_size = 0;

    int dimension() const { return u_size + p_size; }
};

/// Mesh together with both discrete spaces.
struct FESystem {
    BoxMesh mesh;
    DofMap u_space;
    DofMap p_space;

    BlockLayout layout() const { return {0, u_space.n_dofs, u_space.n_dofs, p_space.n_dofs}; }
    int n_dofs() const { return u_space.n_dofs + p_space.n_dofs; }
};

FESystem make_fe_system(BoxMesh mesh);

struct QuadratureRule {
    std::vector<std::array<double, 4>> points;  // barycentric
    std::vector<double> weights;                // sum to 1/6, the reference volume
    int degree = 0;
};

/// 4-point rule, exact for polynomials of degree <= 2.
const QuadratureRule& tet_quadrature_degree2();

/// Gradients of the barycentric coordinates (constant per cell) and volume.
struct CellGeometry {
    std::array<Vector3, 4> grad_lambda;
    double volume = 0.0;
};

CellGeometry cell_geometry(const BoxMesh& m, std::size_t cell);

Vector3 physical_point(const BoxMesh& m, std::size_t cell, const std::array<double, 4>& bary);

struct UBasisValues {
    std::array<double, 4> values;
    std::array<Vector3, 4> gradients;
};

/// Hat functions of the four cell vertices at a barycentric point.
UBasisValues eval_u_basis(const BoxMesh& m, std::size_t cell, const std::array<double, 4>& bary);

struct PBasisValues {
    std::array<Vector3, 6> values;
    std::array<Vector3, 6> curls;
};

/// Whitney functions lambda_a grad lambda_b - lambda_b grad lambda_a of the
/// six local edges, multiplied by the global orientation sign.
PBasisValues eval_p_basis(const BoxMesh& m, std::size_t cell, const std::array<double, 4>& bary);

using VectorField = std::function<Vector3(const Vector3&)>;
using TensorField = std::function<Matrix3(const Vector3&)>;

/// Nodal interpolant of u on the interior vertices (u-block coefficients).
Eigen::VectorXd interpolate_u(const FESystem& sys, const VectorField& u);

/// Tangential line integrals of each row of P along every mesh edge (global
/// orientation). Result is (n_edges x 3), boundary edges included.
Eigen::MatrixXd edge_moments(const BoxMesh& m, const TensorField& p);

/// Edge interpolant of P restricted to interior edges (P-block coefficients).
Eigen::VectorXd interpolate_p(const FESystem& sys, const TensorField& p);

/// Field evaluation from block coefficients; constrained entities contribute zero.
Vector3 evaluate_u(const FESystem& sys, const Eigen::VectorXd& u_block, std::size_t cell,
                   const std::array<double, 4>& bary);
Matrix3 evaluate_grad_u(const FESystem& sys, const Eigen::VectorXd& u_block, std::size_t cell);
Matrix3 evaluate_p(const FESystem& sys, const Eigen::VectorXd& p_block, std::size_t cell,
                   const std::array<double, 4>& bary);
/// Row-wise curl: row i is curl of P_i.
Matrix3 evaluate_curl_p(const FESystem& sys, const Eigen::VectorXd& p_block, std::size_t cell);

}  // namespace micromorph
