/**
 * @file tensors.hpp
 * @brief Fourth-order constitutive tensors of the relaxed micromorphic model.
 *
 * Every tensor is stored as the symmetric matrix of its quadratic form in an
 * orthonormal basis of the domain of its symmetry class:
 *
 *   - ElasticSym   (Sym(3) -> Sym(3)), 6x6, basis
 *       e11, e22, e33, (e23+e32)/sqrt2, (e13+e31)/sqrt2, (e12+e21)/sqrt2
 *   - CouplingSkew (so(3) -> so(3)),   3x3, basis
 *       (e32-e23)/sqrt2, (e13-e31)/sqrt2, (e21-e12)/sqrt2
 *   - Curvature    (R3x3 -> R3x3),     9x9, canonical units e11, e12, ..., e33
 *
 * (eij is the unit matrix with a one in row i, column j.) This is also the
 * interchange format for full component lists: the upper triangle of the
 * representation, row by row (21, 6 or 45 numbers).
 *
 * With orthonormal bases the eigenvalues of the representation are exactly
 * the extreme moduli mu^m / mu^M of the definiteness and boundedness bounds.
 */
#pragma once

#include <Eigen/Dense>

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace micromorph {

using Matrix3 = Eigen::Matrix3d;
using Vector3 = Eigen::Vector3d;
using Matrix9 = Eigen::Matrix<double, 9, 9>;
using Vector9 = Eigen::Matrix<double, 9, 1>;

inline Matrix3 sym(const Matrix3& x) { return 0.5 * (x + x.transpose()); }
inline Matrix3 skew(const Matrix3& x) { return 0.5 * (x - x.transpose()); }

/// Frobenius inner product <X, Y> = tr(X Y^T).
inline double frobenius(const Matrix3& x, const Matrix3& y) { return (x.array() * y.array()).sum(); }

/// Row-major flattening used by all 9x9 canonical matrices.
Vector9 flatten(const Matrix3& x);
Matrix3 unflatten(const Vector9& v);

enum class SymmetryClass { ElasticSym, CouplingSkew, Curvature };

std::string_view to_string(SymmetryClass cls);

/// 6, 3 or 9.
int domain_dimension(SymmetryClass cls);
/// 21, 6 or 45.
int independent_components(SymmetryClass cls);

/// Orthonormal basis of the class domain (see file comment for ordering).
std::span<const Matrix3> orthonormal_basis(SymmetryClass cls);

/// Coordinates of the orthogonal projection of X onto the class domain.
Eigen::VectorXd coordinates(SymmetryClass cls, const Matrix3& x);
Matrix3 from_coordinates(SymmetryClass cls, const Eigen::VectorXd& z);

class ConstitutiveTensor4 {
public:
    /// Zero tensor of the given class.
    explicit ConstitutiveTensor4(SymmetryClass cls = SymmetryClass::ElasticSym);

    /// `representation` must be square of the class dimension and symmetric to
    /// round-off; it is symmetrized exactly on construction.
    ConstitutiveTensor4(SymmetryClass cls, const Eigen::MatrixXd& representation);

    static ConstitutiveTensor4 zero(SymmetryClass cls) { return ConstitutiveTensor4(cls); }
    /// Identity map on the class domain (orthogonal projector onto it).
    static ConstitutiveTensor4 identity(SymmetryClass cls);
    /// Upper triangle of the representation, row by row.
    static ConstitutiveTensor4 from_components(SymmetryClass cls, std::span<const double> upper);

    SymmetryClass symmetry_class() const { return cls_; }
    const Eigen::MatrixXd& representation() const { return rep_; }
    std::vector<double> components() const;

    /// (T.X)_ij = C_ijkl X_kl
    Matrix3 apply(const Matrix3& x) const;
    /// <T.X, Y>
    double inner(const Matrix3& x, const Matrix3& y) const;

    /// 9x9 matrix K with flatten(T.X) = K flatten(X).
    Matrix9 canonical_matrix() const;
    /// Cartesian component C_ijkl.
    double component(int i, int j, int k, int l) const;

    ConstitutiveTensor4 scaled(double s) const;
    double norm() const { return rep_.norm(); }

private:
    SymmetryClass cls_;
    Eigen::MatrixXd rep_;
};

Matrix3 apply_tensor(const ConstitutiveTensor4& t, const Matrix3& x);
Eigen::MatrixXd matrix_representation(const ConstitutiveTensor4& t);

/// ElasticSym: (mu, lambda) -> 2 mu sym X + lambda tr(X) 1;
/// CouplingSkew: (mu_c) -> 2 mu_c skew X; Curvature: (alpha) -> alpha X.
ConstitutiveTensor4 make_isotropic(SymmetryClass cls, std::span<const double> moduli);
ConstitutiveTensor4 make_isotropic(SymmetryClass cls, std::initializer_list<double> moduli);

enum class Definiteness { PositiveDefinite, PositiveSemiDefinite, Indefinite };

std::string_view to_string(Definiteness d);

struct DefinitenessReport {
    Definiteness classification = Definiteness::PositiveSemiDefinite;
    double min_modulus = 0.0;
    double max_modulus = 0.0;
};

inline constexpr double kDefaultDefinitenessTol = 1e-10;

/// `tol` is relative to the largest modulus magnitude.
DefinitenessReport classify_definiteness(const ConstitutiveTensor4& t, double tol = kDefaultDefinitenessTol);

enum class ModelVariant { FullInertia, SimplifiedInertia, Quasistatic, ZeroLengthScale };

std::string_view to_string(ModelVariant v);

struct MaterialParams {
    double rho = 1.0;
    double J = 1.0;
    double mu = 1.0;
    double Lc = 1.0;

    ConstitutiveTensor4 C_e{SymmetryClass::ElasticSym};
    ConstitutiveTensor4 C_c{SymmetryClass::CouplingSkew};
    ConstitutiveTensor4 C_micro{SymmetryClass::ElasticSym};
    ConstitutiveTensor4 L_aniso{SymmetryClass::Curvature};
    ConstitutiveTensor4 Ct_e{SymmetryClass::ElasticSym};
    ConstitutiveTensor4 Ct_c{SymmetryClass::CouplingSkew};
    ConstitutiveTensor4 Ct_micro{SymmetryClass::ElasticSym};
    ConstitutiveTensor4 Lt_aniso{SymmetryClass::Curvature};

    ModelVariant variant = ModelVariant::FullInertia;

    /// Scalar and class-consistency checks; returns a list of violations.
    std::vector<std::string> violations() const;
    /// Throws ParameterError listing every violation.
    void validate() const;

    bool has_micro_inertia() const { return variant == ModelVariant::FullInertia || variant == ModelVariant::ZeroLengthScale; }
    bool has_macro_inertia() const { return variant != ModelVariant::Quasistatic; }
    bool has_curvature() const { return variant != ModelVariant::ZeroLengthScale; }
};

struct NamedTensor {
    std::string_view name;
    const ConstitutiveTensor4* tensor;
};

/// The eight tensors in fixed order C_e, C_c, C_micro, L_aniso, Ct_e, Ct_c, Ct_micro, Lt_aniso.
std::array<NamedTensor, 8> named_tensors(const MaterialParams& p);

}  // namespace micromorph
