#pragma once

#include "micromorph/sparse_operator.hpp"

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

namespace micromorph {

struct CgOptions {
    double tol = 1e-12;       // relative residual ||Ax - b|| <= tol ||b||
    int max_iter = 10000;
    bool jacobi = true;       // diagonal preconditioning
    bool record_iterates = false;
};

struct CgResult {
    Eigen::VectorXd x;
    int iterations = 0;
    double relative_residual = 0.0;
    std::vector<Eigen::VectorXd> iterates;  // x_0, x_1, ... when requested
};

/// Preconditioned conjugate gradients for a symmetric positive definite A.
/// Throws DefinitenessError on non-positive curvature and ConvergenceError
/// (carrying the residual history) when max_iter is exhausted.
CgResult cg_solve(const SparseSymOperator& a, const Eigen::VectorXd& b, const CgOptions& opts = {},
                  const Eigen::VectorXd* x0 = nullptr);

struct EigenOptions {
    double rel_tol = 1e-8;
    int max_krylov = 0;              // 0: dimension of the problem
    std::uint64_t seed = 0x5eed1234abcdULL;
    CgOptions inner{1e-13, 20000, true, false};
};

struct GeneralizedEigenBounds {
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    int krylov_dimension = 0;
};

/// Smallest and largest lambda of A x = lambda B x for symmetric A and
/// positive definite B. Lanczos on B^{-1} A in the B inner product with full
/// reorthogonalization; every step performs one inner CG solve with B.
GeneralizedEigenBounds extreme_generalized_eigenvalues(const SparseSymOperator& a, const SparseSymOperator& b,
                                                       const EigenOptions& opts = {});

/// All eigenvalues of a dense real symmetric matrix, ascending, by cyclic
/// Jacobi rotations.
Eigen::VectorXd jacobi_eigenvalues(const Eigen::MatrixXd& s, double tol = 1e-15, int max_sweeps = 100);

using ComplexMatrix = Eigen::MatrixXcd;

/// Eigenvalues of H z = lambda G z for Hermitian H and Hermitian positive
/// definite G (dimension <= 64), ascending. Works on the real 2n x 2n
/// symmetric embedding [[Re, -Im], [Im, Re]] and removes the doubled copies.
/// Throws ParameterError for non-Hermitian input, DefinitenessError when G is
/// not positive definite.
Eigen::VectorXd hermitian_dense_eig(const ComplexMatrix& h, const ComplexMatrix& g);

/// Real symmetric embedding of a complex matrix.
Eigen::MatrixXd real_embedding(const ComplexMatrix& h);

}  // namespace micromorph
