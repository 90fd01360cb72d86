#include "micromorph/dynamics.hpp"

#include "micromorph/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace micromorph {

DynamicState DynamicState::zero(int n, double t)
{
    return {t, Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n)};
}

EnergyPair energy(const DynamicState& s, const SparseSymOperator& w1, const SparseSymOperator& w2)
{
    return {0.5 * w1.quadratic_form(s.w_t), 0.5 * w2.quadratic_form(s.w)};
}

double gram_norm(const SparseSymOperator& gram, const Eigen::VectorXd& x)
{
    return std::sqrt(std::max(gram.quadratic_form(x), 0.0));
}

namespace {

Eigen::VectorXd load_at(const LoadFn& load, double t, int n)
{
    if (!load)
        return Eigen::VectorXd::Zero(n);
    Eigen::VectorXd l = load(t);
    if (l.size() != n)
        throw ParameterError("load vector has wrong length");
    return l;
}

void check_state(const DynamicState& s, int n)
{
    if (s.w.size() != n || s.w_t.size() != n)
        throw ParameterError("initial state does not match the operator dimension");
}

}  // namespace

Eigen::VectorXd stationary_solve(const SparseSymOperator& w1, const SparseSymOperator& w2,
                                 const Eigen::VectorXd& w_prev, const Eigen::VectorXd& load, const CgOptions& cg,
                                 const Eigen::VectorXd* guess, int* iterations)
{
    const Eigen::VectorXd rhs = load - w2.apply(w_prev);
    CgResult r = cg_solve(w1, rhs, cg, guess);
    if (iterations)
        *iterations = r.iterations;
    return std::move(r.x);
}

PicardIntervalResult picard_interval(const DynamicState& state0, const SparseSymOperator& w1,
                                     const SparseSymOperator& w2, const SparseSymOperator& gram, const LoadFn& load,
                                     double delta, const PicardOptions& opts)
{
    const int n = w1.dimension();
    if (w2.dimension() != n || gram.dimension() != n)
        throw ParameterError("picard_interval: operator dimensions differ");
    check_state(state0, n);
    if (!(delta > 0.0) || !std::isfinite(delta))
        throw ParameterError("picard_interval: interval length must be positive and finite");
    if (opts.n_t < 3)
        throw ParameterError("picard_interval: need at least 3 time nodes");

    const int nt = opts.n_t;
    const double h = delta / (nt - 1);
    std::vector<double> t(nt);
    for (int j = 0; j < nt; ++j)
        t[j] = state0.t + j * h;
    t[nt - 1] = state0.t + delta;

    std::vector<Eigen::VectorXd> loads(nt);
    for (int j = 0; j < nt; ++j)
        loads[j] = load_at(load, t[j], n);

    // Seed: free linear drift.
    std::vector<Eigen::VectorXd> w(nt), a(nt, Eigen::VectorXd::Zero(n));
    double seed_norm = 0.0;
    for (int j = 0; j < nt; ++j) {
        w[j] = state0.w + (j * h) * state0.w_t;
        seed_norm = std::max(seed_norm, gram_norm(gram, w[j]));
    }
    const double tol = opts.fixed_tol * (1.0 + seed_norm);

    PicardIntervalResult res;
    long cg_its = 0;
    std::vector<Eigen::VectorXd> next(nt);
    bool converged = false;
    while (res.iterations < opts.max_iter) {
        for (int j = 0; j < nt; ++j) {
            int its = 0;
            a[j] = stationary_solve(w1, w2, w[j], loads[j], opts.cg, &a[j], &its);
            cg_its += its;
        }
        // w(t_j) = w0 + t w0' + h [ (t_j - t_0)/2 a_0 + sum_{0<i<j} (t_j - t_i) a_i ]
        double diff = 0.0;
        for (int j = 0; j < nt; ++j) {
            Eigen::VectorXd acc = (0.5 * j) * a[0];
            for (int i = 1; i < j; ++i)
                acc += static_cast<double>(j - i) * a[i];
            next[j] = state0.w + (j * h) * state0.w_t + (h * h) * acc;
            diff = std::max(diff, gram_norm(gram, next[j] - w[j]));
        }
        w.swap(next);
        ++res.iterations;
        if (!res.diffs.empty() && res.diffs.back() > 0.0)
            res.ratios.push_back(diff / res.diffs.back());
        res.diffs.push_back(diff);
        if (diff <= tol) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        std::ostringstream os;
        os << "picard_interval: no fixed point after " << opts.max_iter << " sweeps on [" << t.front() << ", "
           << t.back() << "], last difference " << res.diffs.back() << " (interval too long for the contraction)";
        throw ConvergenceError(os.str(), res.ratios);
    }

    // Velocities from the accelerations that produced the accepted iterate.
    Trajectory& tr = res.trajectory;
    tr.times = t;
    tr.states.resize(nt);
    tr.energies.resize(nt);
    Eigen::VectorXd v = state0.w_t;
    for (int j = 0; j < nt; ++j) {
        if (j > 0)
            v += (0.5 * h) * (a[j - 1] + a[j]);
        tr.states[j] = {t[j], w[j], v};
        tr.energies[j] = energy(tr.states[j], w1, w2);
    }
    // Bit-exact gluing: the first node is the seed state itself.
    tr.states[0] = state0;
    tr.states[0].t = t[0];
    tr.energies[0] = energy(tr.states[0], w1, w2);
    tr.picard_iterations.push_back(res.iterations);
    tr.contraction_ratios.push_back(res.ratios);
    tr.delta = delta;
    tr.n_intervals = 1;
    tr.cg_iterations = cg_its;
    return res;
}

IntervalPlan plan_intervals(double t_final, double c_est)
{
    if (!(t_final > 0.0) || !std::isfinite(t_final))
        throw ParameterError("final time must be positive and finite");
    if (!(c_est >= 0.0) || !std::isfinite(c_est))
        throw ParameterError("contraction constant must be finite and non-negative");
    IntervalPlan p;
    p.delta_rule = c_est > 0.0 ? 1.0 / (2.0 * std::sqrt(c_est)) : std::numeric_limits<double>::infinity();
    double d = p.delta_rule;
    std::ostringstream os;
    os.precision(17);
    if (d > t_final) {
        os << "interval length capped at T_final = " << t_final << " (rule gives " << d << ")";
        p.notes.push_back(os.str());
        d = t_final;
    }
    else if (d < t_final * 1e-6) {
        os << "interval length floored at T_final/1e6 = " << t_final * 1e-6 << " (rule gives " << d << ")";
        p.notes.push_back(os.str());
        d = t_final * 1e-6;
    }
    p.n_intervals = std::max(1, static_cast<int>(std::ceil(t_final / d - 1e-12)));
    p.delta = t_final / p.n_intervals;
    return p;
}

Trajectory picard_integrate(const DynamicState& state0, const SparseSymOperator& w1, const SparseSymOperator& w2,
                            const SparseSymOperator& gram, const LoadFn& load, double t_final, double c_est,
                            const PicardOptions& opts)
{
    const IntervalPlan plan = plan_intervals(t_final, c_est);
    Trajectory out;
    out.delta = plan.delta;
    out.n_intervals = plan.n_intervals;
    out.notes = plan.notes;

    DynamicState seed = state0;
    for (int k = 0; k < plan.n_intervals; ++k) {
        PicardIntervalResult r = picard_interval(seed, w1, w2, gram, load, plan.delta, opts);
        Trajectory& piece = r.trajectory;
        if (k == plan.n_intervals - 1)
            piece.states.back().t = piece.times.back() = state0.t + t_final;
        const std::size_t first = k == 0 ? 0 : 1;
        for (std::size_t j = first; j < piece.size(); ++j) {
            out.times.push_back(piece.times[j]);
            out.states.push_back(piece.states[j]);
            out.energies.push_back(piece.energies[j]);
        }
        out.picard_iterations.push_back(r.iterations);
        out.contraction_ratios.push_back(std::move(r.ratios));
        out.cg_iterations += piece.cg_iterations;
        seed = piece.states.back();
    }
    return out;
}

Trajectory newmark_integrate(const DynamicState& state0, const SparseSymOperator& w1, const SparseSymOperator& w2,
                             const LoadFn& load, double dt, int n_steps, const NewmarkOptions& opts)
{
    const int n = w1.dimension();
    if (w2.dimension() != n)
        throw ParameterError("newmark_integrate: operator dimensions differ");
    check_state(state0, n);
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw ParameterError("newmark_integrate: time step must be positive");
    if (n_steps < 0)
        throw ParameterError("newmark_integrate: negative step count");

    const double beta = opts.beta;
    const double gamma = opts.gamma;
    const SparseSymOperator eff(SparseMatrix(w1.matrix() + (beta * dt * dt) * w2.matrix()), w1.layout());

    Trajectory tr;
    tr.delta = dt;
    tr.times.reserve(n_steps + 1);
    tr.states.reserve(n_steps + 1);
    tr.energies.reserve(n_steps + 1);

    DynamicState s = state0;
    int its = 0;
    Eigen::VectorXd acc = stationary_solve(w1, w2, s.w, load_at(load, s.t, n), opts.cg, nullptr, &its);
    tr.cg_iterations += its;
    tr.times.push_back(s.t);
    tr.states.push_back(s);
    tr.energies.push_back(energy(s, w1, w2));

    for (int step = 1; step <= n_steps; ++step) {
        const double t_next = state0.t + step * dt;
        const Eigen::VectorXd w_pred = s.w + dt * s.w_t + ((0.5 - beta) * dt * dt) * acc;
        const Eigen::VectorXd v_pred = s.w_t + ((1.0 - gamma) * dt) * acc;
        const Eigen::VectorXd rhs = load_at(load, t_next, n) - w2.apply(w_pred);
        CgResult r = cg_solve(eff, rhs, opts.cg, &acc);
        tr.cg_iterations += r.iterations;
        acc = std::move(r.x);
        s.t = t_next;
        s.w = w_pred + (beta * dt * dt) * acc;
        s.w_t = v_pred + (gamma * dt) * acc;
        tr.times.push_back(s.t);
        tr.states.push_back(s);
        tr.energies.push_back(energy(s, w1, w2));
    }
    return tr;
}

}  // namespace micromorph
