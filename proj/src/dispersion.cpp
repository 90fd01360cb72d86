#include "micromorph/analysis.hpp"

#include "micromorph/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace micromorph {

namespace {

using Complex = std::complex<double>;

// Plane-wave image of the 39 kinematic slots (u, grad u, P, grad u - P, Curl P)
// acting on z = (u^, P^).
Eigen::Matrix<Complex, 39, 12> plane_wave_kinematics(const Vector3& d, double k)
{
    Eigen::Matrix<Complex, 39, 12> l = Eigen::Matrix<Complex, 39, 12>::Zero();
    const Complex ik(0.0, k);
    for (int i = 0; i < 3; ++i)
        l(i, i) = 1.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            l(3 + 3 * i + j, i) = ik * d(j);
            l(21 + 3 * i + j, i) = ik * d(j);
        }
    for (int r = 0; r < 9; ++r) {
        l(12 + r, 3 + r) = 1.0;
        l(21 + r, 3 + r) = -1.0;
    }
    // (d x p)_m = eps_{m a b} d_a p_b for each row p = P^_i.
    static constexpr int eps_next[3][2] = {{1, 2}, {2, 0}, {0, 1}};
    for (int i = 0; i < 3; ++i)
        for (int m = 0; m < 3; ++m) {
            const int a = eps_next[m][0];
            const int b = eps_next[m][1];
            l(30 + 3 * i + m, 3 + 3 * i + b) += ik * d(a);
            l(30 + 3 * i + m, 3 + 3 * i + a) -= ik * d(b);
        }
    return l;
}

ComplexMatrix pencil_side(const IntegrandWeights& w, const Eigen::Matrix<Complex, 39, 12>& l)
{
    Eigen::Matrix<double, 39, 39> q = Eigen::Matrix<double, 39, 39>::Zero();
    q.block<3, 3>(0, 0) = w.u_mass;
    q.block<9, 9>(3, 3) = w.gradient;
    q.block<9, 9>(12, 12) = w.micro;
    q.block<9, 9>(21, 21) = w.relative;
    q.block<9, 9>(30, 30) = w.curl;
    q = (0.5 * (q + q.transpose())).eval();
    ComplexMatrix m = l.adjoint() * q.cast<Complex>() * l;
    return 0.5 * (m + m.adjoint());
}

}  // namespace

DispersionPencil build_dispersion_pencil(const MaterialParams& p, const Vector3& direction, double k)
{
    const double dn = direction.norm();
    if (!(dn > 0.0) || !std::isfinite(dn))
        throw ParameterError("dispersion direction must be a non-zero vector");
    if (!std::isfinite(k))
        throw ParameterError("wavenumber must be finite");
    const auto l = plane_wave_kinematics(direction / dn, k);
    return {pencil_side(kinetic_weights(p), l), pencil_side(potential_weights(p), l)};
}

DispersionResult dispersion_curves(const MaterialParams& p, const Vector3& direction, const std::vector<double>& k)
{
    if (k.empty())
        throw ParameterError("dispersion needs at least one wavenumber sample");
    DispersionResult res;
    res.k = k;
    res.direction = direction.normalized();
    res.omega.resize(static_cast<Eigen::Index>(k.size()), 12);
    res.unstable_count.assign(k.size(), 0);
    for (std::size_t s = 0; s < k.size(); ++s) {
        const DispersionPencil pen = build_dispersion_pencil(p, direction, k[s]);
        Eigen::VectorXd w2;
        try {
            w2 = hermitian_dense_eig(pen.B, pen.A);
        }
        catch (const DefinitenessError&) {
            std::ostringstream os;
            os << "kinetic pencil A(k) is not positive definite at k = " << k[s]
               << " (inertia tensors violate the definiteness hypotheses)";
            throw HypothesisError(os.str());
        }
        for (int j = 0; j < 12; ++j) {
            double om2 = w2(j);
            if (om2 < 0.0 && om2 >= kOmegaSquaredClamp)
                om2 = 0.0;
            if (om2 < 0.0) {
                ++res.unstable_count[s];
                res.omega(static_cast<Eigen::Index>(s), j) = -std::sqrt(-om2);
            }
            else {
                res.omega(static_cast<Eigen::Index>(s), j) = std::sqrt(om2);
            }
        }
    }
    if (k.size() >= 2)
        res.gaps = detect_band_gaps(res);
    return res;
}

std::vector<BandGap> detect_band_gaps(const DispersionResult& d, std::optional<std::pair<double, double>> k_range)
{
    std::vector<Eigen::Index> rows;
    std::vector<double> ks;
    for (std::size_t s = 0; s < d.k.size(); ++s)
        if (!k_range || (d.k[s] >= k_range->first && d.k[s] <= k_range->second)) {
            rows.push_back(static_cast<Eigen::Index>(s));
            ks.push_back(d.k[s]);
        }
    std::vector<BandGap> gaps;
    if (rows.empty())
        return gaps;
    std::sort(ks.begin(), ks.end());
    double resolution = 0.0;
    for (std::size_t i = 1; i < ks.size(); ++i)
        resolution = std::max(resolution, ks[i] - ks[i - 1]);

    const Eigen::Index nb = d.omega.cols();
    for (Eigen::Index j = 0; j + 1 < nb; ++j) {
        double top = -std::numeric_limits<double>::infinity();
        double bottom = std::numeric_limits<double>::infinity();
        for (const auto r : rows) {
            top = std::max(top, d.omega(r, j));
            bottom = std::min(bottom, d.omega(r, j + 1));
        }
        if (bottom > top)
            gaps.push_back({top, bottom, static_cast<int>(j), resolution});
    }
    // Branches are sorted per sample, so every branch value lies outside
    // each gap; re-verify against the samples anyway.
    std::erase_if(gaps, [&](const BandGap& g) {
        for (const auto r : rows)
            for (Eigen::Index j = 0; j < nb; ++j)
                if (d.omega(r, j) > g.lower && d.omega(r, j) < g.upper)
                    return true;
        return false;
    });
    return gaps;
}

}  // namespace micromorph
