#include "micromorph/assembly.hpp"

#include "micromorph/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <thread>

namespace micromorph {

// ---------------------------------------------------------------------------
// SparseSymOperator
// ---------------------------------------------------------------------------

SparseSymOperator::SparseSymOperator(SparseMatrix m, BlockLayout layout) : m_(std::move(m)), layout_(layout)
{
    if (m_.rows() != m_.cols())
        throw ParameterError("operator must be square");
    if (layout_.dimension() != m_.rows())
        throw ParameterError("block layout does not match operator dimension");
    m_.makeCompressed();
    if (asymmetry() != 0.0)
        throw ParameterError("operator is not exactly symmetric");
}

SparseSymOperator SparseSymOperator::from_dense(const Eigen::MatrixXd& a)
{
    return from_dense(a, BlockLayout{0, static_cast<int>(a.rows()), static_cast<int>(a.rows()), 0});
}

SparseSymOperator SparseSymOperator::from_dense(const Eigen::MatrixXd& a, BlockLayout layout)
{
    if (a.rows() != a.cols())
        throw ParameterError("operator must be square");
    const Eigen::MatrixXd s = 0.5 * (a + a.transpose());
    if ((s - a).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, a.cwiseAbs().maxCoeff()))
        throw ParameterError("dense operator is not symmetric");
    SparseMatrix m = s.sparseView(0.0, 0.0);
    return SparseSymOperator(std::move(m), layout);
}

SparseSymOperator SparseSymOperator::identity(int n)
{
    SparseMatrix m(n, n);
    m.setIdentity();
    return SparseSymOperator(std::move(m), BlockLayout{0, n, n, 0});
}

SparseSymOperator SparseSymOperator::p_block() const
{
    const int off = layout_.p_offset;
    const int n = layout_.p_size;
    std::vector<Eigen::Triplet<double>> trip;
    for (int r = off; r < off + n; ++r)
        for (SparseMatrix::InnerIterator it(m_, r); it; ++it)
            if (it.col() >= off && it.col() < off + n)
                trip.emplace_back(r - off, static_cast<int>(it.col()) - off, it.value());
    SparseMatrix b(n, n);
    b.setFromTriplets(trip.begin(), trip.end());
    return SparseSymOperator(std::move(b), BlockLayout{0, 0, 0, n});
}

double SparseSymOperator::asymmetry() const
{
    const SparseMatrix t = m_.transpose();
    const SparseMatrix d = m_ - t;
    double worst = 0.0;
    for (int r = 0; r < d.outerSize(); ++r)
        for (SparseMatrix::InnerIterator it(d, r); it; ++it)
            worst = std::max(worst, std::abs(it.value()));
    return worst;
}

// ---------------------------------------------------------------------------
// Integrand weights
// ---------------------------------------------------------------------------

IntegrandWeights kinetic_weights(const MaterialParams& p)
{
    p.validate();
    IntegrandWeights w;
    if (p.has_macro_inertia())
        w.u_mass = p.rho * Matrix3::Identity();
    w.micro = p.Ct_micro.canonical_matrix();
    if (p.has_micro_inertia())
        w.micro += p.J * Matrix9::Identity();
    w.relative = p.Ct_e.canonical_matrix() + p.Ct_c.canonical_matrix();
    if (p.has_curvature())
        w.curl = p.mu * p.Lc * p.Lc * p.Lt_aniso.canonical_matrix();
    return w;
}

IntegrandWeights potential_weights(const MaterialParams& p)
{
    p.validate();
    IntegrandWeights w;
    w.micro = p.C_micro.canonical_matrix();
    w.relative = p.C_e.canonical_matrix() + p.C_c.canonical_matrix();
    if (p.has_curvature())
        w.curl = p.mu * p.Lc * p.Lc * p.L_aniso.canonical_matrix();
    return w;
}

IntegrandWeights gram_weights(ModelVariant variant)
{
    IntegrandWeights w;
    w.u_mass = Matrix3::Identity();
    w.gradient = Matrix9::Identity();
    w.micro = Matrix9::Identity();
    if (variant != ModelVariant::ZeroLengthScale)
        w.curl = Matrix9::Identity();
    return w;
}

// ---------------------------------------------------------------------------
// Assembly
// ---------------------------------------------------------------------------

namespace {

constexpr int kSlots = 39;
constexpr int kLocal = 30;  // 4 vertices x 3 components + 6 edges x 3 rows

using SlotMatrix = Eigen::Matrix<double, kSlots, kSlots>;
using Kinematics = Eigen::Matrix<double, kSlots, kLocal>;
using LocalMatrix = Eigen::Matrix<double, kLocal, kLocal>;

SlotMatrix slot_weights(const IntegrandWeights& w)
{
    SlotMatrix q = SlotMatrix::Zero();
    q.block<3, 3>(0, 0) = w.u_mass;
    q.block<9, 9>(3, 3) = w.gradient;
    q.block<9, 9>(12, 12) = w.micro;
    q.block<9, 9>(21, 21) = w.relative;
    q.block<9, 9>(30, 30) = w.curl;
    return 0.5 * (q + q.transpose());
}

int assembly_threads()
{
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("MICROMORPH_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1)
            n = std::min<unsigned>(n, static_cast<unsigned>(cap));
    }
    return static_cast<int>(n);
}

/// Local dof indices: u functions first (vertex-major), then P (edge-major).
std::array<int, kLocal> local_dofs(const FESystem& sys, std::size_t cell)
{
    std::array<int, kLocal> idx{};
    const auto& t = sys.mesh.cells[cell];
    for (int a = 0; a < 4; ++a)
        for (int c = 0; c < 3; ++c)
            idx[3 * a + c] = sys.u_space.dof(t[a], c);
    const int off = sys.u_space.n_dofs;
    for (int e = 0; e < 6; ++e)
        for (int r = 0; r < 3; ++r) {
            const int d = sys.p_space.dof(sys.mesh.cell_edges[cell][e], r);
            idx[12 + 3 * e + r] = d < 0 ? -1 : off + d;
        }
    return idx;
}

LocalMatrix local_matrix(const FESystem& sys, std::size_t cell, const SlotMatrix& q)
{
    const CellGeometry g = cell_geometry(sys.mesh, cell);
    const QuadratureRule& rule = tet_quadrature_degree2();
    LocalMatrix local = LocalMatrix::Zero();
    for (std::size_t iq = 0; iq < rule.points.size(); ++iq) {
        const auto& bary = rule.points[iq];
        const double wq = rule.weights[iq] * 6.0 * g.volume;
        const PBasisValues pb = eval_p_basis(sys.mesh, cell, bary);
        Kinematics k = Kinematics::Zero();
        for (int a = 0; a < 4; ++a)
            for (int c = 0; c < 3; ++c) {
                const int col = 3 * a + c;
                k(c, col) = bary[a];
                for (int j = 0; j < 3; ++j) {
                    k(3 + 3 * c + j, col) = g.grad_lambda[a](j);    // grad u
                    k(21 + 3 * c + j, col) = g.grad_lambda[a](j);   // grad u - P
                }
            }
        for (int e = 0; e < 6; ++e)
            for (int r = 0; r < 3; ++r) {
                const int col = 12 + 3 * e + r;
                for (int j = 0; j < 3; ++j) {
                    k(12 + 3 * r + j, col) = pb.values[e](j);       // P
                    k(21 + 3 * r + j, col) = -pb.values[e](j);      // grad u - P
                    k(30 + 3 * r + j, col) = pb.curls[e](j);        // Curl P
                }
            }
        local.noalias() += wq * k.transpose() * (q * k);
    }
    return local;
}

}  // namespace

SparseSymOperator assemble_form(const FESystem& sys, const IntegrandWeights& w)
{
    const SlotMatrix q = slot_weights(w);
    const std::size_t n_cells = sys.mesh.n_cells();
    std::vector<LocalMatrix, Eigen::aligned_allocator<LocalMatrix>> locals(n_cells);

    const int n_threads = std::min<int>(assembly_threads(), static_cast<int>(std::max<std::size_t>(1, n_cells)));
    auto work = [&](int tid) {
        for (std::size_t c = static_cast<std::size_t>(tid); c < n_cells; c += static_cast<std::size_t>(n_threads))
            locals[c] = local_matrix(sys, c, q);
    };
    if (n_threads <= 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < n_threads; ++t)
            pool.emplace_back(work, t);
        for (auto& th : pool)
            th.join();
    }

    // Insertion in cell order, upper local triangle mirrored, so that every
    // global (i,j) and (j,i) receive identical contributions in identical order.
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(n_cells * kLocal * kLocal);
    for (std::size_t c = 0; c < n_cells; ++c) {
        const auto idx = local_dofs(sys, c);
        const LocalMatrix& lm = locals[c];
        for (int a = 0; a < kLocal; ++a) {
            if (idx[a] < 0)
                continue;
            for (int b = a; b < kLocal; ++b) {
                if (idx[b] < 0)
                    continue;
                const double v = lm(a, b);
                trip.emplace_back(idx[a], idx[b], v);
                if (a != b)
                    trip.emplace_back(idx[b], idx[a], v);
            }
        }
    }
    const int n = sys.n_dofs();
    SparseMatrix m(n, n);
    m.setFromTriplets(trip.begin(), trip.end());
    return SparseSymOperator(std::move(m), sys.layout());
}

SparseSymOperator assemble_W1(const MaterialParams& p, const FESystem& sys)
{
    return assemble_form(sys, kinetic_weights(p));
}

SparseSymOperator assemble_W2(const MaterialParams& p, const FESystem& sys)
{
    return assemble_form(sys, potential_weights(p));
}

SparseSymOperator assemble_gram(const FESystem& sys, ModelVariant variant)
{
    return assemble_form(sys, gram_weights(variant));
}

// ---------------------------------------------------------------------------
// Loads
// ---------------------------------------------------------------------------

TimeProfile TimeProfile::constant(double value)
{
    TimeProfile p;
    p.kind_ = Kind::Constant;
    p.coefficients_ = {value};
    return p;
}

TimeProfile TimeProfile::polynomial(std::vector<double> coefficients)
{
    if (coefficients.empty())
        throw ParameterError("polynomial time profile needs at least one coefficient");
    TimeProfile p;
    p.kind_ = Kind::Polynomial;
    p.coefficients_ = std::move(coefficients);
    return p;
}

TimeProfile TimeProfile::table(std::vector<std::pair<double, double>> samples)
{
    if (samples.size() < 2)
        throw ParameterError("tabulated time profile needs at least two samples");
    for (std::size_t i = 1; i < samples.size(); ++i)
        if (!(samples[i].first > samples[i - 1].first))
            throw ParameterError("tabulated time profile must have strictly increasing times");
    TimeProfile p;
    p.kind_ = Kind::Table;
    p.coefficients_.clear();
    p.samples_ = std::move(samples);
    return p;
}

double TimeProfile::operator()(double t) const
{
    switch (kind_) {
    case Kind::Constant: return coefficients_.front();
    case Kind::Polynomial: {
        double acc = 0.0;
        for (auto it = coefficients_.rbegin(); it != coefficients_.rend(); ++it)
            acc = acc * t + *it;
        return acc;
    }
    case Kind::Table: {
        // Node times built by repeated addition may overshoot an end by a few ulps.
        const double t0 = samples_.front().first, t1 = samples_.back().first;
        const double slack = 1e-12 * std::max({1.0, std::abs(t0), std::abs(t1)});
        if (t < t0 - slack || t > t1 + slack) {
            std::ostringstream os;
            os << "time " << t << " outside tabulated load range [" << samples_.front().first << ", "
               << samples_.back().first << "]";
            throw RangeError(os.str());
        }
        t = std::clamp(t, t0, t1);
        auto hi = std::lower_bound(samples_.begin(), samples_.end(), t,
                                   [](const auto& s, double v) { return s.first < v; });
        if (hi == samples_.begin())
            return hi->second;
        auto lo = std::prev(hi);
        const double s = (t - lo->first) / (hi->first - lo->first);
        return (1.0 - s) * lo->second + s * hi->second;
    }
    }
    return 0.0;
}

Eigen::VectorXd assemble_load(const LoadFunctional& lf, const FESystem& sys, double t)
{
    Eigen::VectorXd out = Eigen::VectorXd::Zero(sys.n_dofs());
    if (lf.is_zero())
        return out;
    const Vector3 f = lf.f_amplitude * lf.f_profile(t);
    const Matrix3 M = lf.M_amplitude * lf.M_profile(t);
    const QuadratureRule& rule = tet_quadrature_degree2();
    const int p_off = sys.u_space.n_dofs;
    for (std::size_t c = 0; c < sys.mesh.n_cells(); ++c) {
        const CellGeometry g = cell_geometry(sys.mesh, c);
        const auto& t4 = sys.mesh.cells[c];
        for (std::size_t iq = 0; iq < rule.points.size(); ++iq) {
            const auto& bary = rule.points[iq];
            const double wq = rule.weights[iq] * 6.0 * g.volume;
            for (int a = 0; a < 4; ++a)
                for (int comp = 0; comp < 3; ++comp) {
                    const int d = sys.u_space.dof(t4[a], comp);
                    if (d >= 0)
                        out(d) += wq * f(comp) * bary[a];
                }
            const PBasisValues pb = eval_p_basis(sys.mesh, c, bary);
            for (int e = 0; e < 6; ++e)
                for (int r = 0; r < 3; ++r) {
                    const int d = sys.p_space.dof(sys.mesh.cell_edges[c][e], r);
                    if (d >= 0)
                        out(p_off + d) += wq * M.row(r).dot(pb.values[e]);
                }
        }
    }
    return out;
}

}  // namespace micromorph
