#include "micromorph/assembly.hpp"
#include "micromorph/errors.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace micromorph;

namespace {

FESystem unit_system(int n, Vector3 origin = Vector3::Zero())
{
    return make_fe_system(build_box_mesh(Eigen::Vector3d::Ones(), {n, n, n}, origin));
}

double max_abs(const Eigen::MatrixXd& a) { return a.size() ? a.cwiseAbs().maxCoeff() : 0.0; }

MaterialParams zero_tilde_unit_mass()
{
    MaterialParams p;
    p.rho = 1.0;
    p.J = 1.0;
    return p;  // all tensors default to zero
}

}  // namespace

TEST(W1, PureMassMatchesDenseOracle)
{
    for (int n : {1, 2}) {
        const auto sys = unit_system(n);
        const auto p = zero_tilde_unit_mass();
        const Eigen::MatrixXd w1 = assemble_W1(p, sys).to_dense();
        const Eigen::MatrixXd ref = oracle::dense_form(sys, p, oracle::Form::Kinetic);
        EXPECT_LE(max_abs(w1 - ref), 1e-14);
        const auto l = sys.layout();
        EXPECT_EQ(max_abs(w1.block(l.u_offset, l.p_offset, l.u_size, l.p_size)), 0.0);
    }
}

TEST(W1, SingleCellUMassBlockIsEmptyAndPBlockIsEdgeMass)
{
    const auto sys = unit_system(1);
    const auto w1 = assemble_W1(zero_tilde_unit_mass(), sys);
    EXPECT_EQ(sys.layout().u_size, 0);
    EXPECT_EQ(w1.dimension(), 3);
    // The interior main diagonal is the only free edge; its three rows are
    // uncoupled copies of one scalar edge mass.
    const Eigen::MatrixXd d = w1.to_dense();
    EXPECT_GT(d(0, 0), 0.0);
    EXPECT_DOUBLE_EQ(d(0, 0), d(1, 1));
    EXPECT_DOUBLE_EQ(d(1, 1), d(2, 2));
    EXPECT_EQ(d(0, 1), 0.0);
}

TEST(W1W2, RandomMaterialsMatchDenseOracle)
{
    for (std::uint64_t seed : {31u, 32u, 33u}) {
        oracle::Gen g(seed);
        MaterialParams p;
        p.rho = g.uniform(0.5, 2);
        p.J = g.uniform(0.5, 2);
        p.mu = g.uniform(0.5, 2);
        p.Lc = g.uniform(0.2, 1.5);
        p.C_e = g.tensor(SymmetryClass::ElasticSym, false);
        p.C_c = g.tensor(SymmetryClass::CouplingSkew, false);
        p.C_micro = g.tensor(SymmetryClass::ElasticSym, false);
        p.L_aniso = g.tensor(SymmetryClass::Curvature, false);
        p.Ct_e = g.tensor(SymmetryClass::ElasticSym, true);
        p.Ct_c = g.tensor(SymmetryClass::CouplingSkew, true);
        p.Ct_micro = g.tensor(SymmetryClass::ElasticSym, true);
        p.Lt_aniso = g.tensor(SymmetryClass::Curvature, true);
        const auto sys = make_fe_system(build_box_mesh(Vector3(1.0, 0.8, 1.2), {2, 2, 2}));
        for (auto which : {oracle::Form::Kinetic, oracle::Form::Potential}) {
            const Eigen::MatrixXd a = which == oracle::Form::Kinetic ? assemble_W1(p, sys).to_dense()
                                                                     : assemble_W2(p, sys).to_dense();
            const Eigen::MatrixXd ref = oracle::dense_form(sys, p, which);
            EXPECT_LE(max_abs(a - ref), 1e-12 * (1 + max_abs(ref)));
        }
    }
}

TEST(W1, QuadraticFormEqualsKineticIntegrand)
{
    const auto sys = unit_system(2);
    const auto p = oracle::identity_like_material(41);
    const auto w1 = assemble_W1(p, sys);
    oracle::Gen g(42);
    for (int trial = 0; trial < 10; ++trial) {
        const Eigen::VectorXd v = g.vector(sys.n_dofs());
        const double ref = 2.0 * oracle::kinetic_energy_density_integral(sys, p, v);
        EXPECT_NEAR(w1.quadratic_form(v), ref, 1e-12 * ref);
    }
    EXPECT_EQ(w1.quadratic_form(Eigen::VectorXd::Zero(sys.n_dofs())), 0.0);
}

TEST(W1, VariantsDropInertiaTerms)
{
    const auto sys = unit_system(2);
    auto p = oracle::identity_like_material(43);
    const Eigen::MatrixXd full = assemble_W1(p, sys).to_dense();
    p.variant = ModelVariant::SimplifiedInertia;
    const Eigen::MatrixXd simplified = assemble_W1(p, sys).to_dense();
    auto q = p;
    q.J = 0.0;
    q.variant = ModelVariant::FullInertia;
    EXPECT_LE(max_abs(simplified - oracle::dense_form(sys, q, oracle::Form::Kinetic)), 1e-13);
    EXPECT_GT(max_abs(full - simplified), 1e-3);

    p.variant = ModelVariant::Quasistatic;
    const Eigen::MatrixXd quasi = assemble_W1(p, sys).to_dense();
    q.rho = 0.0;
    EXPECT_LE(max_abs(quasi - oracle::dense_form(sys, q, oracle::Form::Kinetic)), 1e-13);
}

TEST(W2, ZeroUntildeTensorsGiveZeroMatrix)
{
    const auto sys = unit_system(2);
    MaterialParams p;
    p.Ct_e = ConstitutiveTensor4::identity(SymmetryClass::ElasticSym);
    const auto w2 = assemble_W2(p, sys);
    EXPECT_EQ(max_abs(w2.to_dense()), 0.0);
}

TEST(W2, ZeroLengthScaleDropsCurl)
{
    const auto sys = unit_system(2);
    auto p = oracle::identity_like_material(44);
    p.variant = ModelVariant::ZeroLengthScale;
    p.Lc = 0.0;
    const Eigen::MatrixXd zl = assemble_W2(p, sys).to_dense();
    auto q = p;
    q.L_aniso = ConstitutiveTensor4::zero(SymmetryClass::Curvature);
    q.Lt_aniso = ConstitutiveTensor4::zero(SymmetryClass::Curvature);
    EXPECT_LE(max_abs(zl - oracle::dense_form(sys, q, oracle::Form::Potential)), 1e-13);
}

TEST(W2, DisplacementOnlyEnergyIsClassicalElasticity)
{
    const auto sys = make_fe_system(build_box_mesh(Vector3(1.0, 1.5, 0.75), {3, 3, 3}));
    const double mu = 1.3, lambda = 0.7, mu_c = 0.4;
    MaterialParams p;
    p.C_e = make_isotropic(SymmetryClass::ElasticSym, {mu, lambda});
    p.C_c = make_isotropic(SymmetryClass::CouplingSkew, {mu_c});
    const auto w2 = assemble_W2(p, sys);
    oracle::Gen g(45);
    for (int trial = 0; trial < 5; ++trial) {
        Eigen::VectorXd w = Eigen::VectorXd::Zero(sys.n_dofs());
        const Eigen::VectorXd u = g.vector(sys.u_space.n_dofs);
        w.head(u.size()) = u;
        double ref = 0.0;
        for (std::size_t c = 0; c < sys.mesh.n_cells(); ++c) {
            const Matrix3 gu = evaluate_grad_u(sys, u, c);
            const Matrix3 e = sym(gu), s = skew(gu);
            ref += sys.mesh.cell_volumes[c] *
                   (2 * mu * e.squaredNorm() + lambda * e.trace() * e.trace() + 2 * mu_c * s.squaredNorm());
        }
        EXPECT_NEAR(w2.quadratic_form(w), ref, 1e-12 * ref);
    }
}

TEST(Forms, ExactlySymmetric)
{
    const auto sys = unit_system(3);
    const auto p = oracle::identity_like_material(46);
    EXPECT_EQ(assemble_W1(p, sys).asymmetry(), 0.0);
    EXPECT_EQ(assemble_W2(p, sys).asymmetry(), 0.0);
    EXPECT_EQ(assemble_gram(sys).asymmetry(), 0.0);
    const auto w2 = assemble_W2(p, sys).to_dense();
    EXPECT_EQ(max_abs(w2 - w2.transpose()), 0.0);
}

TEST(Forms, TranslationInvariant)
{
    const auto p = oracle::identity_like_material(47);
    const auto a = unit_system(2);
    const auto b = unit_system(2, Vector3(10.0, -3.0, 7.5));
    for (int which = 0; which < 3; ++which) {
        const Eigen::MatrixXd x = which == 0 ? assemble_W1(p, a).to_dense()
                                  : which == 1 ? assemble_W2(p, a).to_dense()
                                               : assemble_gram(a).to_dense();
        const Eigen::MatrixXd y = which == 0 ? assemble_W1(p, b).to_dense()
                                  : which == 1 ? assemble_W2(p, b).to_dense()
                                               : assemble_gram(b).to_dense();
        EXPECT_LE(max_abs(x - y), 1e-12 * max_abs(x));
    }
}

TEST(Forms, RejectInvalidParameters)
{
    const auto sys = unit_system(2);
    MaterialParams p;
    p.rho = -1.0;
    EXPECT_THROW(assemble_W1(p, sys), ParameterError);
    EXPECT_THROW(assemble_W2(p, sys), ParameterError);
}

// Gram norm of the interpolant of u = sin(pi x) sin(pi y) sin(pi z) e1
// approaches (1 + 3 pi^2) / 8 under refinement.
TEST(Forms, RefinementConsistent)
{
    const double exact = (1.0 + 3.0 * std::numbers::pi * std::numbers::pi) / 8.0;
    double prev = std::numeric_limits<double>::infinity();
    for (int n : {2, 4, 8}) {
        const auto sys = unit_system(n);
        const Eigen::VectorXd u = interpolate_u(sys, [](const Vector3& x) {
            const double pi = std::numbers::pi;
            return Vector3(std::sin(pi * x(0)) * std::sin(pi * x(1)) * std::sin(pi * x(2)), 0, 0);
        });
        Eigen::VectorXd w = Eigen::VectorXd::Zero(sys.n_dofs());
        w.head(u.size()) = u;
        const double err = std::abs(assemble_gram(sys).quadratic_form(w) - exact);
        EXPECT_LT(err, prev);
        prev = err;
    }
    EXPECT_LT(prev, 0.1 * exact);
}

TEST(TimeProfiles, Evaluation)
{
    EXPECT_EQ(TimeProfile::constant(2.5)(7.0), 2.5);
    EXPECT_DOUBLE_EQ(TimeProfile::polynomial({1.0, -2.0, 0.5})(2.0), 1.0 - 4.0 + 2.0);
    const auto tab = TimeProfile::table({{0.0, 0.0}, {1.0, 2.0}, {3.0, -2.0}});
    EXPECT_DOUBLE_EQ(tab(0.5), 1.0);
    EXPECT_DOUBLE_EQ(tab(2.0), 0.0);
    EXPECT_DOUBLE_EQ(tab(3.0), -2.0);
    EXPECT_DOUBLE_EQ(tab(3.0 + 1e-15), -2.0);  // round-off overshoot of the last node
    EXPECT_THROW(tab(3.0 + 1e-9), RangeError);
    EXPECT_THROW(tab(3.5), RangeError);
    EXPECT_THROW(tab(-0.1), RangeError);
    EXPECT_THROW(TimeProfile::table({{1.0, 0.0}, {0.5, 1.0}}), ParameterError);
}

TEST(Load, ZeroAndConstantBodyForce)
{
    const auto sys = unit_system(3);
    LoadFunctional zero;
    EXPECT_EQ(assemble_load(zero, sys, 0.3).cwiseAbs().maxCoeff(), 0.0);

    LoadFunctional lf;
    lf.f_amplitude = Vector3::UnitX();
    const Eigen::VectorXd l = assemble_load(lf, sys, 0.0);
    Eigen::VectorXd ref = Eigen::VectorXd::Zero(sys.n_dofs());
    for (std::size_t c = 0; c < sys.mesh.n_cells(); ++c)
        for (int a = 0; a < 4; ++a) {
            const int d = sys.u_space.dof(sys.mesh.cells[c][a], 0);
            if (d >= 0)
                ref(d) += sys.mesh.cell_volumes[c] / 4.0;
        }
    EXPECT_LE((l - ref).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Load, LinearInAmplitudesAndProfiles)
{
    const auto sys = unit_system(2);
    oracle::Gen g(48);
    LoadFunctional a;
    a.f_amplitude = g.vector(3);
    a.M_amplitude = g.matrix3();
    a.f_profile = TimeProfile::polynomial({1.0, 0.5});
    a.M_profile = TimeProfile::table({{0.0, 1.0}, {2.0, 3.0}});
    LoadFunctional b = a;
    b.f_amplitude *= 2.0;
    b.M_amplitude *= 2.0;
    EXPECT_EQ(assemble_load(b, sys, 0.7), Eigen::VectorXd(2.0 * assemble_load(a, sys, 0.7)));

    LoadFunctional fa = a, ma = a;
    fa.M_amplitude.setZero();
    ma.f_amplitude.setZero();
    const Eigen::VectorXd sum = assemble_load(fa, sys, 1.1) + assemble_load(ma, sys, 1.1);
    EXPECT_LE((assemble_load(a, sys, 1.1) - sum).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_THROW(assemble_load(a, sys, 2.5), RangeError);
}
