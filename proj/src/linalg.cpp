#include "micromorph/linalg.hpp"

#include "micromorph/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace micromorph {

CgResult cg_solve(const SparseSymOperator& a, const Eigen::VectorXd& b, const CgOptions& opts,
                  const Eigen::VectorXd* x0)
{
    const int n = a.dimension();
    if (b.size() != n)
        throw ParameterError("cg_solve: right-hand side has wrong length");
    if (!(opts.tol > 0.0))
        throw ParameterError("cg_solve: tolerance must be positive");

    CgResult res;
    res.x = x0 ? *x0 : Eigen::VectorXd::Zero(n);
    if (res.x.size() != n)
        throw ParameterError("cg_solve: initial guess has wrong length");
    if (opts.record_iterates)
        res.iterates.push_back(res.x);

    const double bnorm = b.norm();
    if (bnorm == 0.0) {
        res.x.setZero();
        return res;
    }

    Eigen::VectorXd inv_diag = Eigen::VectorXd::Ones(n);
    if (opts.jacobi) {
        const Eigen::VectorXd d = a.diagonal();
        for (int i = 0; i < n; ++i) {
            if (!(d(i) > 0.0))
                throw DefinitenessError("cg_solve: non-positive diagonal entry " + std::to_string(i));
            inv_diag(i) = 1.0 / d(i);
        }
    }

    Eigen::VectorXd r = b - a.apply(res.x);
    Eigen::VectorXd z = inv_diag.cwiseProduct(r);
    Eigen::VectorXd p = z;
    double rz = r.dot(z);
    std::vector<double> history{r.norm() / bnorm};
    res.relative_residual = history.back();

    const double target = opts.tol * bnorm;
    while (true) {
        if (r.norm() <= target) {
            // Confirm against the true residual; recurrences drift.
            r = b - a.apply(res.x);
            res.relative_residual = r.norm() / bnorm;
            if (r.norm() <= target)
                return res;
            z = inv_diag.cwiseProduct(r);
            p = z;
            rz = r.dot(z);
        }
        if (res.iterations >= opts.max_iter) {
            std::ostringstream os;
            os << "cg_solve: no convergence after " << opts.max_iter << " iterations, relative residual "
               << res.relative_residual;
            throw ConvergenceError(os.str(), history);
        }
        const Eigen::VectorXd ap = a.apply(p);
        const double curvature = p.dot(ap);
        if (!(curvature > 0.0))
            throw DefinitenessError("cg_solve: non-positive curvature p^T A p = " + std::to_string(curvature));
        const double alpha = rz / curvature;
        res.x += alpha * p;
        r -= alpha * ap;
        ++res.iterations;
        if (opts.record_iterates)
            res.iterates.push_back(res.x);
        z = inv_diag.cwiseProduct(r);
        const double rz_next = r.dot(z);
        p = z + (rz_next / rz) * p;
        rz = rz_next;
        res.relative_residual = r.norm() / bnorm;
        history.push_back(res.relative_residual);
    }
}

namespace {

Eigen::VectorXd seeded_start(int n, std::uint64_t seed)
{
    std::mt19937_64 gen(seed);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i)
        v(i) = static_cast<double>(gen() >> 11) * 0x1.0p-53 - 0.5;
    return v;
}

}  // namespace

GeneralizedEigenBounds extreme_generalized_eigenvalues(const SparseSymOperator& a, const SparseSymOperator& b,
                                                       const EigenOptions& opts)
{
    const int n = a.dimension();
    if (b.dimension() != n)
        throw ParameterError("extreme_generalized_eigenvalues: operator sizes differ");
    if (n == 0)
        throw ParameterError("extreme_generalized_eigenvalues: empty pencil");
    const int m_max = opts.max_krylov > 0 ? std::min(opts.max_krylov, n) : n;

    // Krylov basis q_i (B-orthonormal) and the products B q_i.
    std::vector<Eigen::VectorXd> q, bq;
    std::vector<double> alpha, beta;
    std::vector<double> history;

    Eigen::VectorXd v = seeded_start(n, opts.seed);
    Eigen::VectorXd bv = b.apply(v);
    double nv = v.dot(bv);
    if (!(nv > 0.0))
        throw DefinitenessError("extreme_generalized_eigenvalues: B is not positive definite");
    nv = std::sqrt(nv);
    q.push_back(v / nv);
    bq.push_back(bv / nv);

    GeneralizedEigenBounds out;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
    while (true) {
        const int j = static_cast<int>(q.size()) - 1;
        const Eigen::VectorXd aq = a.apply(q[j]);
        alpha.push_back(q[j].dot(aq));
        Eigen::VectorXd w = cg_solve(b, aq, opts.inner, nullptr).x;
        for (int pass = 0; pass < 2; ++pass)
            for (int i = 0; i <= j; ++i)
                w -= bq[i].dot(w) * q[i];
        const Eigen::VectorXd bw = b.apply(w);
        const double bb = std::sqrt(std::max(w.dot(bw), 0.0));

        const int m = j + 1;
        Eigen::VectorXd diag = Eigen::Map<Eigen::VectorXd>(alpha.data(), m);
        Eigen::VectorXd sub = m > 1 ? Eigen::VectorXd(Eigen::Map<Eigen::VectorXd>(beta.data(), m - 1))
                                    : Eigen::VectorXd();
        tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
        const Eigen::VectorXd& theta = tri.eigenvalues();
        const double scale = std::max({std::abs(theta(0)), std::abs(theta(m - 1)), 1e-300});
        const double res_min = bb * std::abs(tri.eigenvectors()(m - 1, 0));
        const double res_max = bb * std::abs(tri.eigenvectors()(m - 1, m - 1));
        history.push_back(std::max(res_min, res_max) / scale);

        const bool breakdown = bb <= 1e-13 * scale || bb == 0.0;
        const bool converged = res_min <= opts.rel_tol * scale && res_max <= opts.rel_tol * scale;
        if (converged || breakdown || m == n) {
            out.lambda_min = theta(0);
            out.lambda_max = theta(m - 1);
            out.krylov_dimension = m;
            return out;
        }
        if (m >= m_max) {
            std::ostringstream os;
            os << "extreme_generalized_eigenvalues: Krylov dimension " << m_max
               << " exhausted, relative residual " << history.back();
            throw ConvergenceError(os.str(), history);
        }
        beta.push_back(bb);
        q.push_back(w / bb);
        bq.push_back(bw / bb);
    }
}

Eigen::VectorXd jacobi_eigenvalues(const Eigen::MatrixXd& s, double tol, int max_sweeps)
{
    const int n = static_cast<int>(s.rows());
    if (s.cols() != n)
        throw ParameterError("jacobi_eigenvalues: matrix is not square");
    Eigen::MatrixXd a = 0.5 * (s + s.transpose());
    const double fro = a.norm();
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int r = p + 1; r < n; ++r)
                off += a(p, r) * a(p, r);
        if (std::sqrt(2.0 * off) <= tol * fro)
            break;
        for (int p = 0; p < n - 1; ++p)
            for (int r = p + 1; r < n; ++r) {
                const double apr = a(p, r);
                if (apr == 0.0)
                    continue;
                const double theta = (a(r, r) - a(p, p)) / (2.0 * apr);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double sn = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akr = a(k, r);
                    a(k, p) = c * akp - sn * akr;
                    a(k, r) = sn * akp + c * akr;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double ark = a(r, k);
                    a(p, k) = c * apk - sn * ark;
                    a(r, k) = sn * apk + c * ark;
                }
            }
    }
    Eigen::VectorXd ev = a.diagonal();
    std::sort(ev.data(), ev.data() + n);
    return ev;
}

Eigen::MatrixXd real_embedding(const ComplexMatrix& h)
{
    const auto n = h.rows();
    Eigen::MatrixXd e(2 * n, 2 * n);
    e.topLeftCorner(n, n) = h.real();
    e.topRightCorner(n, n) = -h.imag();
    e.bottomLeftCorner(n, n) = h.imag();
    e.bottomRightCorner(n, n) = h.real();
    return e;
}

namespace {

void require_hermitian(const ComplexMatrix& h, const char* name)
{
    if (h.rows() != h.cols())
        throw ParameterError(std::string("hermitian_dense_eig: ") + name + " is not square");
    const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
    const double dev = (h - h.adjoint()).cwiseAbs().maxCoeff();
    if (dev > 1e-12 * scale) {
        std::ostringstream os;
        os << "hermitian_dense_eig: " << name << " is not Hermitian (deviation " << dev << ")";
        throw ParameterError(os.str());
    }
}

}  // namespace

Eigen::VectorXd hermitian_dense_eig(const ComplexMatrix& h, const ComplexMatrix& g)
{
    require_hermitian(h, "H");
    require_hermitian(g, "G");
    if (h.rows() != g.rows())
        throw ParameterError("hermitian_dense_eig: H and G differ in size");
    if (h.rows() > 64)
        throw ParameterError("hermitian_dense_eig: dimension above 64");
    const int n = static_cast<int>(h.rows());
    const int m = 2 * n;

    const Eigen::MatrixXd hr = real_embedding(0.5 * (h + h.adjoint()));
    const Eigen::MatrixXd gr = real_embedding(0.5 * (g + g.adjoint()));

    // Cholesky G = L L^T.
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(m, m);
    const double gscale = gr.diagonal().cwiseAbs().maxCoeff();
    for (int j = 0; j < m; ++j) {
        double d = gr(j, j) - l.row(j).head(j).squaredNorm();
        if (!(d > 1e-14 * gscale))
            throw DefinitenessError("hermitian_dense_eig: G is not positive definite");
        l(j, j) = std::sqrt(d);
        for (int i = j + 1; i < m; ++i)
            l(i, j) = (gr(i, j) - l.row(i).head(j).dot(l.row(j).head(j))) / l(j, j);
    }
    // S = L^{-1} H L^{-T} by two triangular solves.
    const auto lt = l.triangularView<Eigen::Lower>();
    Eigen::MatrixXd y = lt.solve(hr);
    Eigen::MatrixXd s = lt.solve(y.transpose()).transpose();

    const Eigen::VectorXd doubled = jacobi_eigenvalues(s);
    Eigen::VectorXd ev(n);
    for (int i = 0; i < n; ++i)
        ev(i) = 0.5 * (doubled(2 * i) + doubled(2 * i + 1));
    return ev;
}

}  // namespace micromorph
