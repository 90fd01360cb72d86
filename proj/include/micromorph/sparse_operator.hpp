#pragma once

#include "micromorph/fespace.hpp"

#include <Eigen/Sparse>

namespace micromorph {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Assembled symmetric bilinear form over the unconstrained dofs, stored
/// row-compressed with both triangles present.
class SparseSymOperator {
public:
    SparseSymOperator() = default;
    /// Throws ParameterError if `m` is not square, not structurally symmetric
    /// or if the layout does not match its size.
    SparseSymOperator(SparseMatrix m, BlockLayout layout);

    /// Dense input (tests, toy systems). Layout defaults to one u-block.
    static SparseSymOperator from_dense(const Eigen::MatrixXd& a);
    static SparseSymOperator from_dense(const Eigen::MatrixXd& a, BlockLayout layout);
    static SparseSymOperator identity(int n);

    int dimension() const { return static_cast<int>(m_.rows()); }
    const SparseMatrix& matrix() const { return m_; }
    const BlockLayout& layout() const { return layout_; }

    Eigen::VectorXd apply(const Eigen::VectorXd& x) const { return m_ * x; }
    double quadratic_form(const Eigen::VectorXd& x) const { return x.dot(m_ * x); }
    double bilinear(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const { return y.dot(m_ * x); }
    Eigen::VectorXd diagonal() const { return m_.diagonal(); }
    Eigen::MatrixXd to_dense() const { return Eigen::MatrixXd(m_); }

    /// The P-block restricted operator (rows and columns of the P-block).
    SparseSymOperator p_block() const;
    /// max |a_ij - a_ji| over stored entries (0 for assembled operators).
    double asymmetry() const;

private:
    SparseMatrix m_;
    BlockLayout layout_;
};

}  // namespace micromorph
