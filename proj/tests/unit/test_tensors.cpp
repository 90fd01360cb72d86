#include "micromorph/errors.hpp"
#include "micromorph/tensors.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace micromorph;

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

Matrix3 random_sym(oracle::Gen& g) { return sym(g.matrix3()); }
Matrix3 random_skew(oracle::Gen& g) { return skew(g.matrix3()); }

Matrix3 domain_sample(oracle::Gen& g, SymmetryClass cls)
{
    switch (cls) {
    case SymmetryClass::ElasticSym: return random_sym(g);
    case SymmetryClass::CouplingSkew: return random_skew(g);
    case SymmetryClass::Curvature: break;
    }
    return g.matrix3();
}

const SymmetryClass kClasses[] = {SymmetryClass::ElasticSym, SymmetryClass::CouplingSkew, SymmetryClass::Curvature};

}  // namespace

TEST(Matrix3Algebra, SymPlusSkewReconstructs)
{
    oracle::Gen g(11);
    for (int trial = 0; trial < 200; ++trial) {
        const Matrix3 x = g.matrix3(std::pow(10.0, g.uniform(-3, 3)));
        EXPECT_LE((sym(x) + skew(x) - x).norm(), 8 * kEps * x.norm());
        EXPECT_EQ(sym(x), sym(x).transpose());
        EXPECT_EQ(skew(x), Matrix3(-skew(x).transpose()));
    }
}

TEST(Matrix3Algebra, FlattenIsRowMajor)
{
    Matrix3 x;
    x << 1, 2, 3, 4, 5, 6, 7, 8, 9;
    const Vector9 v = flatten(x);
    for (int i = 0; i < 9; ++i)
        EXPECT_EQ(v(i), i + 1);
    EXPECT_EQ(unflatten(v), x);
}

TEST(Bases, AreOrthonormalAndSpanTheirClass)
{
    for (auto cls : kClasses) {
        const auto basis = orthonormal_basis(cls);
        ASSERT_EQ(static_cast<int>(basis.size()), domain_dimension(cls));
        for (std::size_t a = 0; a < basis.size(); ++a)
            for (std::size_t b = 0; b < basis.size(); ++b)
                EXPECT_NEAR(frobenius(basis[a], basis[b]), a == b ? 1.0 : 0.0, 1e-15);
        oracle::Gen g(3);
        const Matrix3 x = domain_sample(g, cls);
        EXPECT_LE((from_coordinates(cls, coordinates(cls, x)) - x).norm(), 1e-14);
    }
    EXPECT_EQ(independent_components(SymmetryClass::ElasticSym), 21);
    EXPECT_EQ(independent_components(SymmetryClass::CouplingSkew), 6);
    EXPECT_EQ(independent_components(SymmetryClass::Curvature), 45);
}

TEST(ApplyTensor, IsotropicElasticOnIdentity)
{
    const auto t = make_isotropic(SymmetryClass::ElasticSym, {1.0, 0.0});
    EXPECT_LE((apply_tensor(t, Matrix3::Identity()) - 2 * Matrix3::Identity()).norm(), 1e-15);
}

TEST(ApplyTensor, ElasticAnnihilatesSkewAndCouplingAnnihilatesSym)
{
    oracle::Gen g(5);
    for (int trial = 0; trial < 20; ++trial) {
        const auto e = g.tensor(SymmetryClass::ElasticSym, false);
        const auto c = g.tensor(SymmetryClass::CouplingSkew, false);
        const Matrix3 x = g.matrix3();
        EXPECT_LE(apply_tensor(e, skew(x)).norm(), 1e-14);
        EXPECT_LE(apply_tensor(c, sym(x)).norm(), 1e-14);
        EXPECT_LE((apply_tensor(e, x) - apply_tensor(e, sym(x))).norm(), 1e-14);
        EXPECT_LE((apply_tensor(e, x) - apply_tensor(e, x).transpose()).norm(), 1e-14);
        EXPECT_LE((apply_tensor(c, x) + apply_tensor(c, x).transpose()).norm(), 1e-14);
    }
}

TEST(ApplyTensor, CouplingIsotropicScalesSkewPart)
{
    oracle::Gen g(6);
    const Matrix3 x = g.matrix3();
    const auto t = make_isotropic(SymmetryClass::CouplingSkew, {3.0});
    EXPECT_LE((apply_tensor(t, x) - 6 * skew(x)).norm(), 1e-14);
}

// Quadruple-loop contraction against the Cartesian components, where the
// components are recovered by the tensor acting on unit matrices.
TEST(ApplyTensor, MatchesQuadrupleLoopContraction)
{
    oracle::Gen g(7);
    for (auto cls : kClasses) {
        const auto t = g.tensor(cls, false);
        double c[3][3][3][3];
        for (int k = 0; k < 3; ++k)
            for (int l = 0; l < 3; ++l) {
                Matrix3 e = Matrix3::Zero();
                e(k, l) = 1.0;
                const Matrix3 col = t.apply(e);
                for (int i = 0; i < 3; ++i)
                    for (int j = 0; j < 3; ++j)
                        c[i][j][k][l] = col(i, j);
            }
        for (int trial = 0; trial < 10; ++trial) {
            const Matrix3 x = domain_sample(g, cls);
            Matrix3 y = Matrix3::Zero();
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    for (int k = 0; k < 3; ++k)
                        for (int l = 0; l < 3; ++l)
                            y(i, j) += c[i][j][k][l] * x(k, l);
            EXPECT_LE((apply_tensor(t, x) - y).norm(), 1e-13 * (1 + y.norm()));
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    for (int k = 0; k < 3; ++k)
                        for (int l = 0; l < 3; ++l)
                            EXPECT_NEAR(t.component(i, j, k, l), c[i][j][k][l], 1e-14);
        }
    }
}

TEST(ApplyTensor, IsLinear)
{
    oracle::Gen g(8);
    for (auto cls : kClasses) {
        const auto t = g.tensor(cls, false);
        const Matrix3 x = g.matrix3(), y = g.matrix3();
        const double a = g.uniform(-2, 2), b = g.uniform(-2, 2);
        EXPECT_LE((t.apply(a * x + b * y) - a * t.apply(x) - b * t.apply(y)).norm(), 1e-13);
    }
}

TEST(MatrixRepresentation, IdentityTensors)
{
    EXPECT_EQ(matrix_representation(ConstitutiveTensor4::identity(SymmetryClass::ElasticSym)),
              Eigen::MatrixXd::Identity(6, 6));
    EXPECT_EQ(matrix_representation(ConstitutiveTensor4::identity(SymmetryClass::Curvature)),
              Eigen::MatrixXd::Identity(9, 9));
    EXPECT_EQ(matrix_representation(ConstitutiveTensor4::identity(SymmetryClass::CouplingSkew)),
              Eigen::MatrixXd::Identity(3, 3));
}

TEST(MatrixRepresentation, IsotropicSpectrum)
{
    auto eig = [](double mu, double lambda) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
            matrix_representation(make_isotropic(SymmetryClass::ElasticSym, {mu, lambda})));
        return Eigen::VectorXd(es.eigenvalues());
    };
    const Eigen::VectorXd a = eig(1, 0);
    for (int i = 0; i < 6; ++i)
        EXPECT_NEAR(a(i), 2.0, 1e-14);
    const Eigen::VectorXd b = eig(1, 1);
    for (int i = 0; i < 5; ++i)
        EXPECT_NEAR(b(i), 2.0, 1e-14);
    EXPECT_NEAR(b(5), 5.0, 1e-14);
}

TEST(MatrixRepresentation, QuadraticFormMatchesCoordinates)
{
    oracle::Gen g(9);
    for (int trial = 0; trial < 50; ++trial) {
        for (auto cls : kClasses) {
            const auto t = g.tensor(cls, false, g.uniform(0.1, 10));
            const Matrix3 x = domain_sample(g, cls);
            const Eigen::VectorXd z = coordinates(cls, x);
            const double direct = frobenius(t.apply(x), x);
            const double via = z.dot(matrix_representation(t) * z);
            EXPECT_NEAR(direct, via, 1e-12 * std::max(1.0, std::abs(direct)));
        }
    }
}

TEST(MatrixRepresentation, MajorSymmetry)
{
    oracle::Gen g(10);
    for (int trial = 0; trial < 100; ++trial) {
        for (auto cls : kClasses) {
            const auto t = g.tensor(cls, false, std::pow(10.0, g.uniform(-2, 2)));
            const Matrix3 x = domain_sample(g, cls), y = domain_sample(g, cls);
            const double lhs = frobenius(t.apply(x), y), rhs = frobenius(x, t.apply(y));
            EXPECT_LE(std::abs(lhs - rhs), 64 * kEps * t.norm() * x.norm() * y.norm());
        }
    }
}

TEST(Classification, Examples)
{
    const auto id = classify_definiteness(ConstitutiveTensor4::identity(SymmetryClass::ElasticSym));
    EXPECT_EQ(id.classification, Definiteness::PositiveDefinite);
    EXPECT_NEAR(id.min_modulus, 1.0, 1e-15);
    EXPECT_NEAR(id.max_modulus, 1.0, 1e-15);

    const auto zero = classify_definiteness(ConstitutiveTensor4::zero(SymmetryClass::ElasticSym));
    EXPECT_EQ(zero.classification, Definiteness::PositiveSemiDefinite);
    EXPECT_EQ(zero.min_modulus, 0.0);
    EXPECT_EQ(zero.max_modulus, 0.0);

    const auto neg = classify_definiteness(make_isotropic(SymmetryClass::ElasticSym, {1.0, -1.0}));
    EXPECT_EQ(neg.classification, Definiteness::Indefinite);
    EXPECT_NEAR(neg.min_modulus, -1.0, 1e-14);

    const auto iso = classify_definiteness(make_isotropic(SymmetryClass::ElasticSym, {2.0, 1.0}));
    EXPECT_EQ(iso.classification, Definiteness::PositiveDefinite);
    EXPECT_NEAR(iso.min_modulus, 4.0, 1e-14);
    EXPECT_NEAR(iso.max_modulus, 7.0, 1e-14);
}

TEST(Classification, ScalingProperty)
{
    oracle::Gen g(12);
    for (int trial = 0; trial < 30; ++trial) {
        for (auto cls : kClasses) {
            const auto t = g.tensor(cls, trial % 2 == 0);
            const double s = std::pow(10.0, g.uniform(-3, 3));
            const auto a = classify_definiteness(t);
            const auto b = classify_definiteness(t.scaled(s));
            EXPECT_EQ(a.classification, b.classification);
            EXPECT_NEAR(b.min_modulus, s * a.min_modulus, 1e-12 * s * std::abs(a.max_modulus));
            EXPECT_NEAR(b.max_modulus, s * a.max_modulus, 1e-12 * s * std::abs(a.max_modulus));
            EXPECT_LE(a.min_modulus, a.max_modulus);
        }
    }
}

TEST(MakeIsotropic, WrongArityIsParameterError)
{
    EXPECT_THROW(make_isotropic(SymmetryClass::ElasticSym, {1.0}), ParameterError);
    EXPECT_THROW(make_isotropic(SymmetryClass::CouplingSkew, {1.0, 2.0}), ParameterError);
    EXPECT_THROW(make_isotropic(SymmetryClass::Curvature, {}), ParameterError);
}

TEST(Components, RoundTripAndArity)
{
    oracle::Gen g(13);
    for (auto cls : kClasses) {
        const auto t = g.tensor(cls, false);
        const auto c = t.components();
        ASSERT_EQ(static_cast<int>(c.size()), independent_components(cls));
        const auto back = ConstitutiveTensor4::from_components(cls, c);
        EXPECT_EQ(back.representation(), t.representation());
        std::vector<double> short_list(c.begin(), c.end() - 1);
        EXPECT_THROW(ConstitutiveTensor4::from_components(cls, short_list), ParameterError);
    }
}

TEST(MaterialParams, VariantScalarRules)
{
    MaterialParams p;
    EXPECT_TRUE(p.violations().empty());
    p.rho = 0.0;
    EXPECT_THROW(p.validate(), ParameterError);
    p = MaterialParams{};
    p.variant = ModelVariant::ZeroLengthScale;
    EXPECT_FALSE(p.violations().empty());  // Lc must be exactly zero
    p.Lc = 0.0;
    EXPECT_TRUE(p.violations().empty());
    p = MaterialParams{};
    p.Lc = 0.0;
    EXPECT_FALSE(p.violations().empty());
    p = MaterialParams{};
    p.variant = ModelVariant::SimplifiedInertia;
    p.J = 0.0;
    EXPECT_TRUE(p.violations().empty());
}
