/**
 * @file dynamics.hpp
 * @brief Time integration of  W1(w'', phi) + W2(w, phi) = l(t)(phi).
 *
 * Two integrators share the data model. The Picard scheme iterates the map
 *
 *     v  ->  w(t) = w0 + (t - t0) w0' + int_{t0}^{t} (t - s) a[v](s) ds,
 *     a[v](s) = W1^{-1} (l(s) - W2 v(s)),
 *
 * on short intervals and glues them; the time integral is the composite
 * trapezoid on n_t uniform nodes. Newmark (average acceleration by default)
 * is the reference integrator.
 */
#pragma once

#include "micromorph/linalg.hpp"
#include "micromorph/sparse_operator.hpp"

#include <functional>
#include <string>
#include <vector>

namespace micromorph {

/// Coefficient state at one time. `w` and `w_t` hold [u | P] blocks laid out
/// as in the FESystem; the block accessors take the operator layout.
struct DynamicState {
    double t = 0.0;
    Eigen::VectorXd w;
    Eigen::VectorXd w_t;

    static DynamicState zero(int n, double t = 0.0);

    Eigen::VectorXd u_coeffs(const BlockLayout& l) const { return w.segment(l.u_offset, l.u_size); }
    Eigen::VectorXd p_coeffs(const BlockLayout& l) const { return w.segment(l.p_offset, l.p_size); }
    Eigen::VectorXd ut_coeffs(const BlockLayout& l) const { return w_t.segment(l.u_offset, l.u_size); }
    Eigen::VectorXd pt_coeffs(const BlockLayout& l) const { return w_t.segment(l.p_offset, l.p_size); }
};

struct EnergyPair {
    double kinetic = 0.0;    // 1/2 W1(w_t, w_t)
    double potential = 0.0;  // 1/2 W2(w, w)
    double total() const { return kinetic + potential; }
};

EnergyPair energy(const DynamicState& s, const SparseSymOperator& w1, const SparseSymOperator& w2);

/// Dual load vector l(t); an empty function means l = 0.
using LoadFn = std::function<Eigen::VectorXd(double)>;

struct Trajectory {
    std::vector<double> times;
    std::vector<DynamicState> states;
    std::vector<EnergyPair> energies;

    // Picard diagnostics, one entry per interval.
    std::vector<int> picard_iterations;
    std::vector<std::vector<double>> contraction_ratios;
    double delta = 0.0;
    int n_intervals = 0;

    long cg_iterations = 0;
    std::vector<std::string> notes;

    std::size_t size() const { return states.size(); }
};

/// Solves W1 a = -W2 w_prev + load.
Eigen::VectorXd stationary_solve(const SparseSymOperator& w1, const SparseSymOperator& w2,
                                 const Eigen::VectorXd& w_prev, const Eigen::VectorXd& load,
                                 const CgOptions& cg = {1e-14, 20000, true, false},
                                 const Eigen::VectorXd* guess = nullptr, int* iterations = nullptr);

struct PicardOptions {
    int n_t = 17;
    double fixed_tol = 1e-10;  // relative to 1 + Gram norm of the seed iterate
    int max_iter = 60;
    CgOptions cg{1e-14, 20000, true, false};
};

struct PicardIntervalResult {
    Trajectory trajectory;
    std::vector<double> ratios;   // diff_{k+1} / diff_k
    std::vector<double> diffs;    // max over nodes of ||w^{k+1} - w^k||_Gram
    int iterations = 0;
};

/// One fixed-point solve on [state0.t, state0.t + delta]. Throws
/// ConvergenceError carrying the ratio history if max_iter sweeps do not
/// reach the tolerance.
PicardIntervalResult picard_interval(const DynamicState& state0, const SparseSymOperator& w1,
                                     const SparseSymOperator& w2, const SparseSymOperator& gram, const LoadFn& load,
                                     double delta, const PicardOptions& opts = {});

/// Picard with interval length 1 / (2 sqrt(c_est)), shortened so that an
/// integer number of intervals covers [state0.t, state0.t + t_final].
Trajectory picard_integrate(const DynamicState& state0, const SparseSymOperator& w1, const SparseSymOperator& w2,
                            const SparseSymOperator& gram, const LoadFn& load, double t_final, double c_est,
                            const PicardOptions& opts = {});

/// Interval length actually used by picard_integrate, with the caps applied.
struct IntervalPlan {
    double delta_rule = 0.0;  // 1 / (2 sqrt(c_est)), +inf for c_est == 0
    double delta = 0.0;
    int n_intervals = 1;
    std::vector<std::string> notes;
};
IntervalPlan plan_intervals(double t_final, double c_est);

struct NewmarkOptions {
    double beta = 0.25;
    double gamma = 0.5;
    CgOptions cg{1e-14, 20000, true, false};
};

Trajectory newmark_integrate(const DynamicState& state0, const SparseSymOperator& w1, const SparseSymOperator& w2,
                             const LoadFn& load, double dt, int n_steps, const NewmarkOptions& opts = {});

/// sqrt(x^T G x)
double gram_norm(const SparseSymOperator& gram, const Eigen::VectorXd& x);

}  // namespace micromorph
