#include "micromorph/analysis.hpp"

#include "micromorph/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace micromorph {

bool WellPosednessReport::hypotheses_passed() const
{
    return std::all_of(checklist.begin(), checklist.end(), [](const HypothesisItem& h) { return h.passed; });
}

bool WellPosednessReport::well_posed() const
{
    return hypotheses_passed() && (!m1 || *m1 > 0.0);
}

const HypothesisItem* WellPosednessReport::item(const std::string& id) const
{
    for (const auto& h : checklist)
        if (h.id == id)
            return &h;
    return nullptr;
}

namespace {

std::string moduli_text(const std::string& name, const DefinitenessReport& r)
{
    std::ostringstream os;
    os.precision(6);
    os << name << " " << to_string(r.classification) << " [" << r.min_modulus << ", " << r.max_modulus << "]";
    return os.str();
}

}  // namespace

WellPosednessReport check_hypotheses(const MaterialParams& p, double tol)
{
    WellPosednessReport rep;
    rep.variant = p.variant;
    for (const auto& nt : named_tensors(p))
        rep.tensors.push_back({std::string(nt.name), classify_definiteness(*nt.tensor, tol)});
    auto report_of = [&rep](const std::string& name) -> const DefinitenessReport& {
        for (const auto& t : rep.tensors)
            if (t.name == name)
                return t.report;
        throw std::logic_error("unknown tensor " + name);
    };
    auto add = [&rep](std::string id, std::string description, bool passed, std::string detail) {
        rep.checklist.push_back({std::move(id), std::move(description), passed, std::move(detail)});
    };

    {
        constexpr std::array<SymmetryClass, 4> expected = {SymmetryClass::ElasticSym, SymmetryClass::CouplingSkew,
                                                           SymmetryClass::ElasticSym, SymmetryClass::Curvature};
        const auto tensors = named_tensors(p);
        bool ok = true;
        std::string detail;
        for (std::size_t i = 0; i < tensors.size(); ++i)
            if (tensors[i].tensor->symmetry_class() != expected[i % 4]) {
                ok = false;
                detail += std::string(tensors[i].name) + " has class " +
                          std::string(to_string(tensors[i].tensor->symmetry_class())) + "; ";
            }
        add("symmetry", "constitutive tensors carry their symmetry classes", ok,
            ok ? "all eight tensors in class" : detail);
    }
    {
        bool ok = true;
        std::string detail;
        for (const char* n : {"C_e", "C_micro", "C_c", "L_aniso"}) {
            const auto& r = report_of(n);
            ok = ok && std::isfinite(r.min_modulus) && std::isfinite(r.max_modulus);
            detail += moduli_text(n, r) + "; ";
        }
        add("bounded", "C_e, C_micro, C_c, L_aniso are bounded", ok, detail);
    }
    {
        const auto& ce = report_of("Ct_e");
        const auto& lt = report_of("Lt_aniso");
        bool ok = ce.classification == Definiteness::PositiveDefinite;
        std::string detail = moduli_text("Ct_e", ce);
        if (p.has_curvature()) {
            ok = ok && lt.classification == Definiteness::PositiveDefinite;
            detail += "; " + moduli_text("Lt_aniso", lt);
        }
        else {
            detail += "; Lt_aniso not used (Lc = 0)";
        }
        add("tilde-definite", "Ct_e and Lt_aniso positive definite", ok, detail);
    }
    {
        const auto& cm = report_of("Ct_micro");
        const auto& cc = report_of("Ct_c");
        const bool ok = cm.classification != Definiteness::Indefinite && cc.classification != Definiteness::Indefinite;
        add("tilde-semidefinite", "Ct_micro and Ct_c positive semi-definite", ok,
            moduli_text("Ct_micro", cm) + "; " + moduli_text("Ct_c", cc));
    }
    add("load", "f, M continuous in time with values in the dual space", true,
        "discrete loads are finite combinations of basis duals");
    add("initial-data", "initial data in the energy space", true, "initial data are interpolated into the discrete space");
    {
        std::vector<std::string> bad;
        auto need = [&bad](bool ok, const char* what) {
            if (!ok)
                bad.emplace_back(what);
        };
        need(std::isfinite(p.mu) && p.mu > 0.0, "mu > 0");
        if (p.has_macro_inertia())
            need(std::isfinite(p.rho) && p.rho > 0.0, "rho > 0");
        if (p.has_micro_inertia())
            need(std::isfinite(p.J) && p.J > 0.0, "J > 0");
        else
            need(std::isfinite(p.J) && p.J >= 0.0, "J >= 0");
        if (p.has_curvature())
            need(std::isfinite(p.Lc) && p.Lc > 0.0, "Lc > 0");
        else
            need(p.Lc == 0.0, "Lc == 0");
        std::ostringstream os;
        os << "rho=" << p.rho << " J=" << p.J << " mu=" << p.mu << " Lc=" << p.Lc;
        for (const auto& b : bad)
            os << "; violated: " << b;
        add("scalars", "scalar moduli positive as the model requires", bad.empty(), os.str());
    }
    if (p.variant == ModelVariant::SimplifiedInertia || p.variant == ModelVariant::Quasistatic) {
        const auto& cm = report_of("Ct_micro");
        add("micro-definite", "Ct_micro positive definite (no J term in the kinetic form)",
            cm.classification == Definiteness::PositiveDefinite, moduli_text("Ct_micro", cm));
    }
    return rep;
}

double discrete_coercivity(const SparseSymOperator& w1, const SparseSymOperator& gram, const EigenOptions& opts)
{
    return extreme_generalized_eigenvalues(w1, gram, opts).lambda_min;
}

double discrete_boundedness(const SparseSymOperator& w2, const SparseSymOperator& gram, const EigenOptions& opts)
{
    const auto b = extreme_generalized_eigenvalues(w2, gram, opts);
    return std::max(std::abs(b.lambda_min), std::abs(b.lambda_max));
}

ContractionConstant contraction_constant(double m1, double M2)
{
    if (!(m1 > 0.0)) {
        std::ostringstream os;
        os << "kinetic form is not coercive (m1 = " << m1 << ")";
        throw CoercivityError(os.str());
    }
    if (!(M2 >= 0.0) || !std::isfinite(M2))
        throw ParameterError("boundedness constant must be finite and non-negative");
    ContractionConstant c;
    if (M2 == 0.0) {
        c.constant_map = true;
        c.delta = std::numeric_limits<double>::infinity();
        return c;
    }
    c.c_est = std::sqrt(2.0) * M2 / m1;
    c.delta = 1.0 / (2.0 * std::sqrt(c.c_est));
    return c;
}

KornEstimate korn_curl_constant(const FESystem& sys, const EigenOptions& opts)
{
    KornEstimate k;
    k.p_dofs = sys.p_space.n_dofs;
    if (k.p_dofs < 1)
        throw ParameterError("korn_curl_constant: the P-space has no degrees of freedom");

    IntegrandWeights full;
    full.micro = Matrix9::Identity();
    full.curl = Matrix9::Identity();
    IntegrandWeights symmetric = full;
    symmetric.micro = ConstitutiveTensor4::identity(SymmetryClass::ElasticSym).canonical_matrix();

    const SparseSymOperator a = assemble_form(sys, full).p_block();
    const SparseSymOperator b = assemble_form(sys, symmetric).p_block();

    // lambda_min(B, A) = 1 / lambda_max(A, B); A is positive definite, so
    // this side never solves with a possibly singular B.
    k.lambda_min = extreme_generalized_eigenvalues(b, a, opts).lambda_min;
    if (k.lambda_min > 1e-12) {
        k.c_est = 1.0 / k.lambda_min;
        k.certified = true;
    }
    else {
        k.c_est = std::numeric_limits<double>::infinity();
    }
    return k;
}

}  // namespace micromorph
