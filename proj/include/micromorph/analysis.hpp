/**
 * @file analysis.hpp
 * @brief Certification of the existence hypotheses and of the discrete
 *        constants driving the Picard scheme, the incompatible Korn
 *        constant, and plane-wave dispersion.
 */
#pragma once

#include "micromorph/assembly.hpp"
#include "micromorph/linalg.hpp"

#include <optional>
#include <string>
#include <vector>

namespace micromorph {

struct HypothesisItem {
    std::string id;           // stable key, e.g. "tilde-definite"
    std::string description;
    bool passed = false;
    std::string detail;
};

struct TensorDiagnostics {
    std::string name;
    DefinitenessReport report;
};

struct WellPosednessReport {
    ModelVariant variant = ModelVariant::FullInertia;
    std::vector<TensorDiagnostics> tensors;     // the eight constitutive tensors
    std::vector<HypothesisItem> checklist;      // general list, then variant extras
    std::optional<double> m1;                   // discrete coercivity of W1
    std::optional<double> M2;                   // discrete boundedness of W2
    std::optional<double> c_est;
    std::optional<double> delta;

    bool hypotheses_passed() const;
    /// Hypotheses pass and, when it has been computed, m1 > 0.
    bool well_posed() const;
    const HypothesisItem* item(const std::string& id) const;
};

/// Checklist only; the discrete constants are filled in by the caller.
///
/// General items, in order:
///   symmetry            tensors carry their symmetry classes
///   bounded             untilde tensors are finite (bounded)
///   tilde-definite      Ct_e and Lt_aniso positive definite
///   tilde-semidefinite  Ct_micro and Ct_c positive semi-definite
///   load                loads continuous in time with values in the dual space
///   initial-data        initial data in the energy space
///   scalars             rho, J, Lc, mu positive (as the variant requires)
/// Variant extra (simplified and quasistatic inertia):
///   micro-definite      Ct_micro positive definite
WellPosednessReport check_hypotheses(const MaterialParams& p, double tol = kDefaultDefinitenessTol);

/// Smallest eigenvalue of the pencil (W1, Gram).
double discrete_coercivity(const SparseSymOperator& w1, const SparseSymOperator& gram, const EigenOptions& opts = {});

/// Largest |lambda| of the pencil (W2, Gram).
double discrete_boundedness(const SparseSymOperator& w2, const SparseSymOperator& gram,
                            const EigenOptions& opts = {});

struct ContractionConstant {
    double c_est = 0.0;
    double delta = 0.0;          // +inf when the map is constant
    bool constant_map = false;   // M2 == 0
};

/// c_est = sqrt(2) M2 / m1, delta = 1 / (2 sqrt(c_est)). Throws
/// CoercivityError for m1 <= 0.
ContractionConstant contraction_constant(double m1, double M2);

struct KornEstimate {
    double c_est = 0.0;        // +inf when the inequality fails
    double lambda_min = 0.0;   // smallest eigenvalue of (sym-mass + curl-curl, mass + curl-curl)
    bool certified = false;
    int p_dofs = 0;
};

/// Constant C in |P|^2 + |Curl P|^2 <= C (|sym P|^2 + |Curl P|^2) on the
/// discrete tangential-zero space.
KornEstimate korn_curl_constant(const FESystem& sys, const EigenOptions& opts = {});

// ---------------------------------------------------------------------------
// Dispersion
// ---------------------------------------------------------------------------

/// Plane-wave pencil B(k) z = omega^2 A(k) z with z = (u^, P^ row-major).
/// A comes from the kinetic integrand, B from the potential integrand, with
/// grad -> i k (.) (x) d and each row of Curl -> i k d x (.).
struct DispersionPencil {
    ComplexMatrix A;
    ComplexMatrix B;
};

DispersionPencil build_dispersion_pencil(const MaterialParams& p, const Vector3& direction, double k);

struct BandGap {
    double lower = 0.0;
    double upper = 0.0;
    int below_branch = 0;      // gap lies between branch j and j + 1 (0-based j)
    double k_resolution = 0.0; // largest spacing of the k samples used
};

struct DispersionResult {
    std::vector<double> k;
    Vector3 direction = Vector3::UnitX();
    /// One row per k sample, branches ascending. Unstable branches
    /// (omega^2 < -1e-10) are stored as -sqrt|omega^2|.
    Eigen::MatrixXd omega;
    std::vector<int> unstable_count;
    std::vector<BandGap> gaps;
};

inline constexpr double kOmegaSquaredClamp = -1e-10;

/// Throws HypothesisError when A(k) is not positive definite.
DispersionResult dispersion_curves(const MaterialParams& p, const Vector3& direction, const std::vector<double>& k);

/// Gaps between the global max of branch j and the global min of branch j + 1
/// over the samples with k in [k_min, k_max] (all samples when unset).
std::vector<BandGap> detect_band_gaps(const DispersionResult& d, std::optional<std::pair<double, double>> k_range = {});

}  // namespace micromorph
