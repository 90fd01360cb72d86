#include "micromorph/tensors.hpp"

#include "micromorph/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

namespace micromorph {

namespace {

Matrix3 unit(int i, int j)
{
    Matrix3 e = Matrix3::Zero();
    e(i, j) = 1.0;
    return e;
}

std::array<Matrix3, 6> make_sym_basis()
{
    const double s = 1.0 / std::sqrt(2.0);
    return {unit(0, 0),
            unit(1, 1),
            unit(2, 2),
            s * (unit(1, 2) + unit(2, 1)),
            s * (unit(0, 2) + unit(2, 0)),
            s * (unit(0, 1) + unit(1, 0))};
}

std::array<Matrix3, 3> make_skew_basis()
{
    const double s = 1.0 / std::sqrt(2.0);
    return {s * (unit(2, 1) - unit(1, 2)), s * (unit(0, 2) - unit(2, 0)), s * (unit(1, 0) - unit(0, 1))};
}

std::array<Matrix3, 9> make_full_basis()
{
    std::array<Matrix3, 9> b;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            b[3 * i + j] = unit(i, j);
    return b;
}

const std::array<Matrix3, 6> kSymBasis = make_sym_basis();
const std::array<Matrix3, 3> kSkewBasis = make_skew_basis();
const std::array<Matrix3, 9> kFullBasis = make_full_basis();

}  // namespace

Vector9 flatten(const Matrix3& x)
{
    Vector9 v;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            v(3 * i + j) = x(i, j);
    return v;
}

Matrix3 unflatten(const Vector9& v)
{
    Matrix3 x;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            x(i, j) = v(3 * i + j);
    return x;
}

std::string_view to_string(SymmetryClass cls)
{
    switch (cls) {
    case SymmetryClass::ElasticSym: return "ElasticSym";
    case SymmetryClass::CouplingSkew: return "CouplingSkew";
    case SymmetryClass::Curvature: return "Curvature";
    }
    return "?";
}

int domain_dimension(SymmetryClass cls)
{
    switch (cls) {
    case SymmetryClass::ElasticSym: return 6;
    case SymmetryClass::CouplingSkew: return 3;
    case SymmetryClass::Curvature: return 9;
    }
    return 0;
}

int independent_components(SymmetryClass cls)
{
    const int n = domain_dimension(cls);
    return n * (n + 1) / 2;
}

std::span<const Matrix3> orthonormal_basis(SymmetryClass cls)
{
    switch (cls) {
    case SymmetryClass::ElasticSym: return kSymBasis;
    case SymmetryClass::CouplingSkew: return kSkewBasis;
    case SymmetryClass::Curvature: return kFullBasis;
    }
    return {};
}

Eigen::VectorXd coordinates(SymmetryClass cls, const Matrix3& x)
{
    const auto basis = orthonormal_basis(cls);
    Eigen::VectorXd z(static_cast<Eigen::Index>(basis.size()));
    for (std::size_t a = 0; a < basis.size(); ++a)
        z(static_cast<Eigen::Index>(a)) = frobenius(basis[a], x);
    return z;
}

Matrix3 from_coordinates(SymmetryClass cls, const Eigen::VectorXd& z)
{
    const auto basis = orthonormal_basis(cls);
    if (z.size() != static_cast<Eigen::Index>(basis.size()))
        throw ParameterError("coordinate vector has wrong length for class " + std::string(to_string(cls)));
    Matrix3 x = Matrix3::Zero();
    for (std::size_t a = 0; a < basis.size(); ++a)
        x += z(static_cast<Eigen::Index>(a)) * basis[a];
    return x;
}

ConstitutiveTensor4::ConstitutiveTensor4(SymmetryClass cls)
    : cls_(cls), rep_(Eigen::MatrixXd::Zero(domain_dimension(cls), domain_dimension(cls)))
{
}

ConstitutiveTensor4::ConstitutiveTensor4(SymmetryClass cls, const Eigen::MatrixXd& representation) : cls_(cls)
{
    const int n = domain_dimension(cls);
    if (representation.rows() != n || representation.cols() != n) {
        std::ostringstream os;
        os << to_string(cls) << " representation must be " << n << "x" << n << ", got " << representation.rows()
           << "x" << representation.cols();
        throw ParameterError(os.str());
    }
    if (!representation.allFinite())
        throw ParameterError(std::string(to_string(cls)) + " representation has non-finite entries");
    const double asym = (representation - representation.transpose()).cwiseAbs().maxCoeff();
    const double scale = std::max(1.0, representation.cwiseAbs().maxCoeff());
    if (asym > 1e-12 * scale)
        throw ParameterError(std::string(to_string(cls)) + " representation violates major symmetry");
    rep_ = 0.5 * (representation + representation.transpose());
}

ConstitutiveTensor4 ConstitutiveTensor4::identity(SymmetryClass cls)
{
    const int n = domain_dimension(cls);
    return ConstitutiveTensor4(cls, Eigen::MatrixXd::Identity(n, n));
}

ConstitutiveTensor4 ConstitutiveTensor4::from_components(SymmetryClass cls, std::span<const double> upper)
{
    const int n = domain_dimension(cls);
    if (static_cast<int>(upper.size()) != independent_components(cls)) {
        std::ostringstream os;
        os << to_string(cls) << " expects " << independent_components(cls) << " components, got " << upper.size();
        throw ParameterError(os.str());
    }
    Eigen::MatrixXd m(n, n);
    std::size_t k = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            m(i, j) = upper[k++];
            m(j, i) = m(i, j);
        }
    return ConstitutiveTensor4(cls, m);
}

std::vector<double> ConstitutiveTensor4::components() const
{
    std::vector<double> out;
    const auto n = rep_.rows();
    out.reserve(static_cast<std::size_t>(n * (n + 1) / 2));
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i; j < n; ++j)
            out.push_back(rep_(i, j));
    return out;
}

Matrix3 ConstitutiveTensor4::apply(const Matrix3& x) const
{
    return from_coordinates(cls_, rep_ * coordinates(cls_, x));
}

double ConstitutiveTensor4::inner(const Matrix3& x, const Matrix3& y) const
{
    return coordinates(cls_, y).dot(rep_ * coordinates(cls_, x));
}

Matrix9 ConstitutiveTensor4::canonical_matrix() const
{
    const auto basis = orthonormal_basis(cls_);
    Eigen::Matrix<double, 9, Eigen::Dynamic> e(9, static_cast<Eigen::Index>(basis.size()));
    for (std::size_t a = 0; a < basis.size(); ++a)
        e.col(static_cast<Eigen::Index>(a)) = flatten(basis[a]);
    Matrix9 k = e * rep_ * e.transpose();
    return 0.5 * (k + k.transpose());
}

double ConstitutiveTensor4::component(int i, int j, int k, int l) const
{
    const auto basis = orthonormal_basis(cls_);
    double c = 0.0;
    for (std::size_t a = 0; a < basis.size(); ++a)
        for (std::size_t b = 0; b < basis.size(); ++b)
            c += rep_(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) * basis[a](i, j) * basis[b](k, l);
    return c;
}

ConstitutiveTensor4 ConstitutiveTensor4::scaled(double s) const
{
    return ConstitutiveTensor4(cls_, s * rep_);
}

Matrix3 apply_tensor(const ConstitutiveTensor4& t, const Matrix3& x) { return t.apply(x); }

Eigen::MatrixXd matrix_representation(const ConstitutiveTensor4& t) { return t.representation(); }

ConstitutiveTensor4 make_isotropic(SymmetryClass cls, std::span<const double> moduli)
{
    const std::size_t expected = cls == SymmetryClass::ElasticSym ? 2 : 1;
    if (moduli.size() != expected) {
        std::ostringstream os;
        os << "isotropic " << to_string(cls) << " takes " << expected << " moduli, got " << moduli.size();
        throw ParameterError(os.str());
    }
    switch (cls) {
    case SymmetryClass::ElasticSym: {
        // 2 mu on the whole of Sym(3) plus lambda on the trace direction 1/sqrt3.
        const double mu = moduli[0];
        const double lambda = moduli[1];
        Eigen::MatrixXd m = 2.0 * mu * Eigen::MatrixXd::Identity(6, 6);
        m.topLeftCorner(3, 3).array() += lambda;
        return ConstitutiveTensor4(cls, m);
    }
    case SymmetryClass::CouplingSkew:
        return ConstitutiveTensor4(cls, 2.0 * moduli[0] * Eigen::MatrixXd::Identity(3, 3));
    case SymmetryClass::Curvature:
        return ConstitutiveTensor4(cls, moduli[0] * Eigen::MatrixXd::Identity(9, 9));
    }
    throw ParameterError("unknown symmetry class");
}

ConstitutiveTensor4 make_isotropic(SymmetryClass cls, std::initializer_list<double> moduli)
{
    return make_isotropic(cls, std::span<const double>(moduli.begin(), moduli.size()));
}

std::string_view to_string(Definiteness d)
{
    switch (d) {
    case Definiteness::PositiveDefinite: return "PositiveDefinite";
    case Definiteness::PositiveSemiDefinite: return "PositiveSemiDefinite";
    case Definiteness::Indefinite: return "Indefinite";
    }
    return "?";
}

DefinitenessReport classify_definiteness(const ConstitutiveTensor4& t, double tol)
{
    if (!(tol > 0.0))
        throw ParameterError("definiteness tolerance must be positive");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t.representation(), Eigen::EigenvaluesOnly);
    DefinitenessReport r;
    r.min_modulus = es.eigenvalues().minCoeff();
    r.max_modulus = es.eigenvalues().maxCoeff();
    const double threshold = tol * std::max(std::abs(r.min_modulus), std::abs(r.max_modulus));
    if (r.min_modulus > threshold)
        r.classification = Definiteness::PositiveDefinite;
    else if (r.min_modulus >= -threshold)
        r.classification = Definiteness::PositiveSemiDefinite;
    else
        r.classification = Definiteness::Indefinite;
    return r;
}

std::string_view to_string(ModelVariant v)
{
    switch (v) {
    case ModelVariant::FullInertia: return "full";
    case ModelVariant::SimplifiedInertia: return "simplified";
    case ModelVariant::Quasistatic: return "quasistatic";
    case ModelVariant::ZeroLengthScale: return "zero_length";
    }
    return "?";
}

std::vector<std::string> MaterialParams::violations() const
{
    std::vector<std::string> out;
    auto check = [&out](bool ok, const std::string& msg) {
        if (!ok)
            out.push_back(msg);
    };
    check(std::isfinite(rho) && rho > 0.0, "rho must be > 0");
    check(std::isfinite(mu) && mu > 0.0, "mu must be > 0");
    check(std::isfinite(J) && J >= 0.0, "J must be >= 0");
    check(std::isfinite(Lc) && Lc >= 0.0, "Lc must be >= 0");
    if (variant == ModelVariant::FullInertia)
        check(J > 0.0, "J must be > 0 for the full-inertia model");
    if (variant == ModelVariant::ZeroLengthScale)
        check(Lc == 0.0, "Lc must be exactly 0 for the zero-length-scale model");
    else
        check(Lc > 0.0, "Lc must be > 0 unless the zero-length-scale model is selected");
    constexpr std::array<SymmetryClass, 4> expected = {SymmetryClass::ElasticSym, SymmetryClass::CouplingSkew,
                                                       SymmetryClass::ElasticSym, SymmetryClass::Curvature};
    const auto tensors = named_tensors(*this);
    for (std::size_t i = 0; i < tensors.size(); ++i) {
        const SymmetryClass want = expected[i % 4];
        check(tensors[i].tensor->symmetry_class() == want,
              std::string(tensors[i].name) + " must have symmetry class " + std::string(to_string(want)));
    }
    return out;
}

void MaterialParams::validate() const
{
    const auto v = violations();
    if (v.empty())
        return;
    std::string msg = "invalid material parameters:";
    for (const auto& s : v)
        msg += " " + s + ";";
    throw ParameterError(msg);
}

std::array<NamedTensor, 8> named_tensors(const MaterialParams& p)
{
    return {NamedTensor{"C_e", &p.C_e},         NamedTensor{"C_c", &p.C_c},   NamedTensor{"C_micro", &p.C_micro},
            NamedTensor{"L_aniso", &p.L_aniso}, NamedTensor{"Ct_e", &p.Ct_e}, NamedTensor{"Ct_c", &p.Ct_c},
            NamedTensor{"Ct_micro", &p.Ct_micro}, NamedTensor{"Lt_aniso", &p.Lt_aniso}};
}

}  // namespace micromorph
