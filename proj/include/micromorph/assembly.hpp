/**
 * @file assembly.hpp
 * @brief Assembly of the kinetic form W1, the potential form W2, the product
 *        norm Gram matrix and the load functional.
 *
 * All forms go through one integrand kernel. At every quadrature point each
 * basis function is described by its kinematic vector
 *
 *     (u, grad u, P, grad u - P, Curl P)      3 + 9 + 9 + 9 + 9 = 39 slots
 *
 * and a form is a block-diagonal symmetric weight on those slots. Model
 * variants only zero individual weights.
 */
#pragma once

#include "micromorph/fespace.hpp"
#include "micromorph/sparse_operator.hpp"
#include "micromorph/tensors.hpp"

#include <utility>
#include <vector>

namespace micromorph {

struct IntegrandWeights {
    Matrix3 u_mass = Matrix3::Zero();     // <A u, phi>
    Matrix9 gradient = Matrix9::Zero();   // <A grad u, grad phi>
    Matrix9 micro = Matrix9::Zero();      // <A P, Phi>
    Matrix9 relative = Matrix9::Zero();   // <A (grad u - P), (grad phi - Phi)>
    Matrix9 curl = Matrix9::Zero();       // <A Curl P, Curl Phi>
};

/// Weights of W1: rho, J, Ct_e, Ct_c, Ct_micro, mu Lc^2 Lt_aniso.
IntegrandWeights kinetic_weights(const MaterialParams& p);
/// Weights of W2: C_e, C_c, C_micro, mu Lc^2 L_aniso.
IntegrandWeights potential_weights(const MaterialParams& p);
/// Squared product norm |u|^2 + |grad u|^2 + |P|^2 + |Curl P|^2. The curl
/// slot is dropped for the zero-length-scale model, whose P lives in L2.
IntegrandWeights gram_weights(ModelVariant variant = ModelVariant::FullInertia);

/// Generic assembly over the unconstrained product space.
SparseSymOperator assemble_form(const FESystem& sys, const IntegrandWeights& w);

SparseSymOperator assemble_W1(const MaterialParams& p, const FESystem& sys);
SparseSymOperator assemble_W2(const MaterialParams& p, const FESystem& sys);
SparseSymOperator assemble_gram(const FESystem& sys, ModelVariant variant = ModelVariant::FullInertia);

/// Scalar time factor g(t) multiplying a spatially uniform amplitude.
class TimeProfile {
public:
    enum class Kind { Constant, Polynomial, Table };

    TimeProfile() = default;
    static TimeProfile constant(double value = 1.0);
    /// g(t) = c0 + c1 t + c2 t^2 + ...
    static TimeProfile polynomial(std::vector<double> coefficients);
    /// Piecewise linear through (t_i, g_i); t strictly increasing; evaluation
    /// outside [t_0, t_last] (beyond a 1e-12 relative round-off slack) raises
    /// RangeError.
    static TimeProfile table(std::vector<std::pair<double, double>> samples);

    double operator()(double t) const;
    Kind kind() const { return kind_; }
    const std::vector<double>& coefficients() const { return coefficients_; }
    const std::vector<std::pair<double, double>>& samples() const { return samples_; }

private:
    Kind kind_ = Kind::Constant;
    std::vector<double> coefficients_{1.0};
    std::vector<std::pair<double, double>> samples_;
};

/// Body force f(x, t) = f_amplitude g_f(t) and double body force
/// M(x, t) = M_amplitude g_M(t).
struct LoadFunctional {
    Vector3 f_amplitude = Vector3::Zero();
    TimeProfile f_profile;
    Matrix3 M_amplitude = Matrix3::Zero();
    TimeProfile M_profile;

    bool is_zero() const { return f_amplitude.isZero(0.0) && M_amplitude.isZero(0.0); }
};

/// Dual vector with u-block int <f(t), phi> and P-block int <M(t), Phi>.
Eigen::VectorXd assemble_load(const LoadFunctional& lf, const FESystem& sys, double t);

}  // namespace micromorph
