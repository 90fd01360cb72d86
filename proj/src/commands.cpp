#include "micromorph/commands.hpp"

#include "micromorph/analysis.hpp"
#include "micromorph/assembly.hpp"
#include "micromorph/errors.hpp"
#include "micromorph/mesh.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace micromorph {

std::optional<Command> parse_command(const std::string& name)
{
    for (auto c : {Command::Check, Command::Simulate, Command::Dispersion, Command::Korn, Command::ContractionDemo})
        if (name == to_string(c))
            return c;
    return std::nullopt;
}

std::string_view to_string(Command c)
{
    switch (c) {
    case Command::Check: return "check";
    case Command::Simulate: return "simulate";
    case Command::Dispersion: return "dispersion";
    case Command::Korn: return "korn";
    case Command::ContractionDemo: return "contraction-demo";
    }
    return "?";
}

int exit_code_for(const std::exception& e)
{
    if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const ParameterError*>(&e) ||
        dynamic_cast<const RangeError*>(&e))
        return 2;
    if (dynamic_cast<const HypothesisError*>(&e) || dynamic_cast<const CoercivityError*>(&e))
        return 3;
    return 4;
}

double bump_profile(const MeshConfig& mesh, const Vector3& x)
{
    double s = 1.0;
    for (int i = 0; i < 3; ++i)
        s *= std::sin(std::numbers::pi * (x(i) - mesh.origin(i)) / mesh.dims(i));
    return s;
}

namespace {

MeshConfig mesh_config_of(const FESystem& sys)
{
    return {sys.mesh.dims, sys.mesh.resolution, sys.mesh.origin};
}

Eigen::VectorXd u_field(const FESystem& sys, const FieldSpec& f)
{
    if (f.is_zero())
        return Eigen::VectorXd::Zero(sys.u_space.n_dofs);
    const MeshConfig mc = mesh_config_of(sys);
    const Vector3 a(f.amplitude[0], f.amplitude[1], f.amplitude[2]);
    return interpolate_u(sys, [&](const Vector3& x) -> Vector3 { return a * bump_profile(mc, x); });
}

Eigen::VectorXd p_field(const FESystem& sys, const FieldSpec& f)
{
    if (f.is_zero())
        return Eigen::VectorXd::Zero(sys.p_space.n_dofs);
    const MeshConfig mc = mesh_config_of(sys);
    const Matrix3 a = Eigen::Map<const Eigen::Matrix<double, 3, 3, Eigen::RowMajor>>(f.amplitude.data());
    return interpolate_p(sys, [&](const Vector3& x) -> Matrix3 { return a * bump_profile(mc, x); });
}

}  // namespace

DynamicState initial_state(const FESystem& sys, const SimulationConfig& sim)
{
    const BlockLayout l = sys.layout();
    DynamicState s = DynamicState::zero(sys.n_dofs());
    s.w.segment(l.u_offset, l.u_size) = u_field(sys, sim.u0);
    s.w.segment(l.p_offset, l.p_size) = p_field(sys, sim.p0);
    s.w_t.segment(l.u_offset, l.u_size) = u_field(sys, sim.ut0);
    s.w_t.segment(l.p_offset, l.p_size) = p_field(sys, sim.pt0);
    return s;
}

LoadFn make_load_fn(const FESystem& sys, const LoadFunctional& load)
{
    if (load.is_zero())
        return {};
    LoadFunctional only_f;
    only_f.f_amplitude = load.f_amplitude;
    LoadFunctional only_m;
    only_m.M_amplitude = load.M_amplitude;
    const Eigen::VectorXd lf = assemble_load(only_f, sys, 0.0);
    const Eigen::VectorXd lm = assemble_load(only_m, sys, 0.0);
    const TimeProfile gf = load.f_profile;
    const TimeProfile gm = load.M_profile;
    const bool has_f = !load.f_amplitude.isZero(0.0);
    const bool has_m = !load.M_amplitude.isZero(0.0);
    return [lf, lm, gf, gm, has_f, has_m](double t) -> Eigen::VectorXd {
        Eigen::VectorXd out = Eigen::VectorXd::Zero(lf.size());
        if (has_f)
            out += gf(t) * lf;
        if (has_m)
            out += gm(t) * lm;
        return out;
    };
}

namespace {

class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const RunConfig& cfg, Command cmd, std::vector<std::string> columns)
        : out_(path, std::ios::binary), precision_(cfg.output.precision), ncols_(columns.size())
    {
        if (!out_)
            throw ParameterError("cannot write '" + path.string() + "'");
        std::string schema;
        for (const auto& c : columns)
            schema += (schema.empty() ? "" : ",") + c;
        out_ << "# micromorph " << to_string(cmd) << '\n';
        out_ << "# config-hash: " << config_hash(cfg) << '\n';
        out_ << "# schema: " << schema << '\n';
        out_ << "# config:\n";
        std::istringstream is(serialize_config(cfg));
        for (std::string line; std::getline(is, line);)
            if (!line.empty())
                out_ << "#   " << line << '\n';
        out_ << schema << '\n';
    }

    void row(const std::vector<std::string>& cells)
    {
        if (cells.size() != ncols_)
            throw std::logic_error("csv row has wrong width");
        for (std::size_t i = 0; i < cells.size(); ++i)
            out_ << (i ? "," : "") << cells[i];
        out_ << '\n';
    }

    std::string num(double v) const { return format_double(v, precision_); }

private:
    std::ofstream out_;
    int precision_;
    std::size_t ncols_;
};

std::string quoted(const std::string& s)
{
    std::string q = "\"";
    for (char c : s) {
        if (c == '"')
            q += '"';
        q += c;
    }
    return q + "\"";
}

struct Operators {
    FESystem sys;
    SparseSymOperator w1, w2, gram;
};

Operators build_operators(const RunConfig& cfg, const std::array<int, 3>& resolution)
{
    Operators op{make_fe_system(build_box_mesh(cfg.mesh.dims, resolution, cfg.mesh.origin)), {}, {}, {}};
    op.w1 = assemble_W1(cfg.material, op.sys);
    op.w2 = assemble_W2(cfg.material, op.sys);
    op.gram = assemble_gram(op.sys, cfg.material.variant);
    return op;
}

EigenOptions eig_options(const RunConfig& cfg)
{
    EigenOptions o;
    o.rel_tol = cfg.analysis.eig_tol;
    return o;
}

std::string failed_items(const WellPosednessReport& rep)
{
    std::string s;
    for (const auto& h : rep.checklist)
        if (!h.passed)
            s += (s.empty() ? "" : ", ") + h.id;
    return s;
}

void require_hypotheses(const RunConfig& cfg)
{
    const WellPosednessReport rep = check_hypotheses(cfg.material);
    if (!rep.hypotheses_passed())
        throw HypothesisError("material violates hypotheses: " + failed_items(rep));
}

void write_report_file(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ParameterError("cannot write '" + path.string() + "'");
    out << text;
}

// ---------------------------------------------------------------------------

void run_check(const RunConfig& cfg, const std::filesystem::path& dir, std::vector<std::filesystem::path>& files,
               std::ostream& rep)
{
    WellPosednessReport r = check_hypotheses(cfg.material);
    if (cfg.material.violations().empty()) {
        const Operators op = build_operators(cfg, cfg.mesh.resolution);
        r.m1 = discrete_coercivity(op.w1, op.gram, eig_options(cfg));
        r.M2 = discrete_boundedness(op.w2, op.gram, eig_options(cfg));
        if (*r.m1 > 0.0) {
            const ContractionConstant c = contraction_constant(*r.m1, *r.M2);
            r.c_est = c.c_est;
            r.delta = c.delta;
        }
    }

    {
        CsvWriter csv(dir / "moduli.csv", cfg, Command::Check, {"tensor", "classification", "min_modulus", "max_modulus"});
        for (const auto& t : r.tensors)
            csv.row({t.name, std::string(to_string(t.report.classification)), csv.num(t.report.min_modulus),
                     csv.num(t.report.max_modulus)});
        files.push_back(dir / "moduli.csv");
    }
    {
        CsvWriter csv(dir / "hypotheses.csv", cfg, Command::Check, {"id", "passed", "description", "detail"});
        for (const auto& h : r.checklist)
            csv.row({h.id, h.passed ? "1" : "0", quoted(h.description), quoted(h.detail)});
        files.push_back(dir / "hypotheses.csv");
    }

    rep << "material variant: " << to_string(cfg.material.variant) << '\n';
    rep << "tensors:\n";
    for (const auto& t : r.tensors)
        rep << "  " << t.name << ": " << to_string(t.report.classification) << ", moduli in ["
            << format_double(t.report.min_modulus, 6) << ", " << format_double(t.report.max_modulus, 6) << "]\n";
    rep << "hypotheses:\n";
    for (const auto& h : r.checklist)
        rep << "  [" << (h.passed ? "pass" : "FAIL") << "] " << h.id << ": " << h.description << " (" << h.detail
            << ")\n";
    rep << "discrete constants on mesh " << cfg.mesh.resolution[0] << "x" << cfg.mesh.resolution[1] << "x"
        << cfg.mesh.resolution[2] << ":\n";
    auto opt = [](const std::optional<double>& v) { return v ? format_double(*v, 10) : std::string("n/a"); };
    rep << "  m1 (coercivity of W1)   = " << opt(r.m1) << '\n';
    rep << "  M2 (boundedness of W2)  = " << opt(r.M2) << '\n';
    rep << "  c_est = sqrt(2) M2 / m1 = " << opt(r.c_est) << '\n';
    rep << "  delta = 1/(2 sqrt c)    = " << opt(r.delta) << '\n';
    if (r.well_posed()) {
        rep << "verdict: well-posed (existence hypotheses satisfied)\n";
        return;
    }
    std::string why = failed_items(r);
    if (r.m1 && !(*r.m1 > 0.0))
        why += std::string(why.empty() ? "" : ", ") + "discrete coercivity";
    rep << "verdict: not well-posed (failed: " << why << ")\n";
    throw HypothesisError("not well-posed: " + why);
}

void run_simulate(const RunConfig& cfg, const std::filesystem::path& dir, std::vector<std::filesystem::path>& files,
                  std::ostream& rep)
{
    require_hypotheses(cfg);
    const SimulationConfig& sim = cfg.simulation;
    const Operators op = build_operators(cfg, cfg.mesh.resolution);
    const int n = op.sys.n_dofs();
    std::vector<int> samples = sim.sample_dofs;
    if (samples.empty()) {
        if (op.sys.u_space.n_dofs > 0)
            samples.push_back(0);
        if (op.sys.p_space.n_dofs > 0)
            samples.push_back(op.sys.u_space.n_dofs);
    }
    for (int d : samples)
        if (d >= n)
            throw ParameterError("sample dof " + std::to_string(d) + " exceeds system size " + std::to_string(n));

    const double m1 = discrete_coercivity(op.w1, op.gram, eig_options(cfg));
    if (!(m1 > 0.0))
        throw CoercivityError("kinetic form is not coercive on this mesh (m1 = " + format_double(m1, 6) + ")");
    const DynamicState s0 = initial_state(op.sys, sim);
    const LoadFn load = make_load_fn(op.sys, sim.load);

    Trajectory tr;
    std::vector<int> interval_of;
    rep << "system: " << op.sys.u_space.n_dofs << " u dofs + " << op.sys.p_space.n_dofs << " P dofs\n";
    rep << "m1 = " << format_double(m1, 10) << '\n';
    if (sim.integrator == Integrator::Picard) {
        const double M2 = discrete_boundedness(op.w2, op.gram, eig_options(cfg));
        const ContractionConstant c = contraction_constant(m1, M2);
        PicardOptions po;
        po.n_t = sim.n_t;
        po.fixed_tol = sim.fixed_tol;
        po.max_iter = sim.max_picard_iter;
        po.cg.tol = sim.cg_tol;
        tr = picard_integrate(s0, op.w1, op.w2, op.gram, load, sim.t_final, c.c_est, po);
        for (std::size_t g = 0; g < tr.size(); ++g)
            interval_of.push_back(g == 0 ? 0 : static_cast<int>((g - 1) / (sim.n_t - 1)));
        rep << "M2 = " << format_double(M2, 10) << ", c_est = " << format_double(c.c_est, 10)
            << ", delta rule = " << format_double(c.delta, 10) << '\n';
        rep << "picard: " << tr.n_intervals << " interval(s) of length " << format_double(tr.delta, 10) << ", "
            << sim.n_t << " nodes each\n";
        for (std::size_t k = 0; k < tr.picard_iterations.size(); ++k) {
            double worst = 0.0;
            for (double q : tr.contraction_ratios[k])
                worst = std::max(worst, q);
            rep << "  interval " << k << ": " << tr.picard_iterations[k] << " sweeps, max ratio "
                << format_double(worst, 6) << '\n';
        }
    }
    else {
        const double steps = sim.t_final / sim.dt;
        const int n_steps = static_cast<int>(std::llround(steps));
        if (std::abs(steps - n_steps) > 1e-9 * std::max(1.0, steps))
            rep << "note: T_final is not a multiple of dt; integrating " << n_steps << " steps to t = "
                << format_double(n_steps * sim.dt, 10) << '\n';
        NewmarkOptions no;
        no.cg.tol = sim.cg_tol;
        tr = newmark_integrate(s0, op.w1, op.w2, load, sim.dt, n_steps, no);
        interval_of.assign(tr.size(), 0);
        rep << "newmark: " << n_steps << " steps of dt = " << format_double(sim.dt, 10) << '\n';
    }
    for (const auto& note : tr.notes)
        rep << "note: " << note << '\n';

    std::vector<std::string> cols{"t", "kinetic", "potential", "total", "interval", "picard_iterations"};
    for (int d : samples)
        cols.push_back("w[" + std::to_string(d) + "]");
    CsvWriter csv(dir / "trajectory.csv", cfg, Command::Simulate, cols);
    for (std::size_t g = 0; g < tr.size(); ++g) {
        const int iv = interval_of[g];
        const int its = tr.picard_iterations.empty() ? 0 : tr.picard_iterations[static_cast<std::size_t>(iv)];
        std::vector<std::string> row{csv.num(tr.times[g]),         csv.num(tr.energies[g].kinetic),
                                     csv.num(tr.energies[g].potential), csv.num(tr.energies[g].total()),
                                     std::to_string(iv),             std::to_string(its)};
        for (int d : samples)
            row.push_back(csv.num(tr.states[g].w(d)));
        csv.row(row);
    }
    files.push_back(dir / "trajectory.csv");

    const double e0 = tr.energies.front().total();
    const double e1 = tr.energies.back().total();
    rep << "energy: E(0) = " << format_double(e0, 10) << ", E(T) = " << format_double(e1, 10);
    if (e0 != 0.0)
        rep << ", relative change " << format_double((e1 - e0) / std::abs(e0), 4);
    rep << "\n";
    rep << "nodes written: " << tr.size() << ", cg iterations: " << tr.cg_iterations << '\n';
}

void run_dispersion(const RunConfig& cfg, const std::filesystem::path& dir, std::vector<std::filesystem::path>& files,
                    std::ostream& rep)
{
    const std::vector<double> ks = cfg.analysis.k_samples();
    const DispersionResult d = dispersion_curves(cfg.material, cfg.analysis.k_direction, ks);
    {
        std::vector<std::string> cols{"k"};
        for (int j = 1; j <= 12; ++j)
            cols.push_back("omega_" + std::to_string(j));
        cols.push_back("unstable");
        CsvWriter csv(dir / "dispersion.csv", cfg, Command::Dispersion, cols);
        for (std::size_t s = 0; s < ks.size(); ++s) {
            std::vector<std::string> row{csv.num(ks[s])};
            for (int j = 0; j < 12; ++j)
                row.push_back(csv.num(d.omega(static_cast<Eigen::Index>(s), j)));
            row.push_back(std::to_string(d.unstable_count[s]));
            csv.row(row);
        }
        files.push_back(dir / "dispersion.csv");
    }
    {
        CsvWriter csv(dir / "gaps.csv", cfg, Command::Dispersion, {"lower", "upper", "below_branch", "k_resolution"});
        for (const auto& g : d.gaps)
            csv.row({csv.num(g.lower), csv.num(g.upper), std::to_string(g.below_branch + 1), csv.num(g.k_resolution)});
        files.push_back(dir / "gaps.csv");
    }
    rep << "plane waves along d = (" << format_double(d.direction(0), 6) << ", " << format_double(d.direction(1), 6)
        << ", " << format_double(d.direction(2), 6) << "), " << ks.size() << " samples of k in ["
        << format_double(cfg.analysis.k_min, 6) << ", " << format_double(cfg.analysis.k_max, 6) << "]\n";
    rep << "cutoffs at k = " << format_double(ks.front(), 6) << ":";
    for (int j = 0; j < 12; ++j)
        rep << ' ' << format_double(d.omega(0, j), 8);
    rep << '\n';
    int unstable = 0;
    for (int u : d.unstable_count)
        unstable += u;
    if (unstable > 0)
        rep << "warning: " << unstable << " unstable branch value(s) (omega^2 < 0), stored as -sqrt|omega^2|\n";
    if (d.gaps.empty())
        rep << "band gaps: none over the sampled range\n";
    for (const auto& g : d.gaps)
        rep << "band gap between branches " << g.below_branch + 1 << " and " << g.below_branch + 2 << ": ("
            << format_double(g.lower, 8) << ", " << format_double(g.upper, 8) << ")\n";
    if (!d.gaps.empty())
        rep << "caveat: gap edges are resolved only to the k spacing " << format_double(d.gaps.front().k_resolution, 6)
            << " and hold for this direction only\n";
}

void run_korn(const RunConfig& cfg, const std::filesystem::path& dir, std::vector<std::filesystem::path>& files,
              std::ostream& rep)
{
    CsvWriter csv(dir / "korn.csv", cfg, Command::Korn, {"level", "p_dofs", "lambda_min", "C_est", "certified"});
    std::vector<std::string> failures;
    double prev = 0.0;
    rep << "incompatible Korn constant |P|^2 + |Curl P|^2 <= C (|sym P|^2 + |Curl P|^2)\n";
    for (int level : cfg.analysis.korn_levels) {
        const FESystem sys = make_fe_system(build_box_mesh(cfg.mesh.dims, {level, level, level}, cfg.mesh.origin));
        const KornEstimate k = korn_curl_constant(sys, eig_options(cfg));
        csv.row({std::to_string(level), std::to_string(k.p_dofs), csv.num(k.lambda_min), csv.num(k.c_est),
                 k.certified ? "1" : "0"});
        rep << "  level " << level << ": " << k.p_dofs << " P dofs, C_est = " << format_double(k.c_est, 10);
        if (prev > 0.0 && k.certified)
            rep << " (ratio to previous " << format_double(k.c_est / prev, 6) << ")";
        rep << '\n';
        if (!k.certified)
            failures.push_back(std::to_string(level));
        prev = k.certified ? k.c_est : 0.0;
    }
    files.push_back(dir / "korn.csv");
    if (!failures.empty()) {
        std::string s;
        for (const auto& f : failures)
            s += (s.empty() ? "" : ", ") + f;
        rep << "inequality failure on level(s) " << s << '\n';
        throw HypothesisError("Korn-type inequality not certified on level(s) " + s);
    }
}

void run_contraction_demo(const RunConfig& cfg, const std::filesystem::path& dir,
                          std::vector<std::filesystem::path>& files, std::ostream& rep)
{
    require_hypotheses(cfg);
    const Operators op = build_operators(cfg, cfg.mesh.resolution);
    const double m1 = discrete_coercivity(op.w1, op.gram, eig_options(cfg));
    const double M2 = discrete_boundedness(op.w2, op.gram, eig_options(cfg));
    const ContractionConstant c = contraction_constant(m1, M2);
    rep << "m1 = " << format_double(m1, 10) << ", M2 = " << format_double(M2, 10) << '\n';

    CsvWriter csv(dir / "contraction.csv", cfg, Command::ContractionDemo,
                  {"iteration", "difference", "ratio", "bound", "within_bound"});
    files.push_back(dir / "contraction.csv");
    if (c.constant_map) {
        rep << "M2 = 0: the Picard map is constant, no contraction to measure\n";
        return;
    }
    const double bound = c.delta * c.delta * c.c_est;
    rep << "c_est = " << format_double(c.c_est, 10) << ", delta = " << format_double(c.delta, 10)
        << ", bound delta^2 c_est = " << format_double(bound, 10) << '\n';

    PicardOptions po;
    po.n_t = cfg.simulation.n_t;
    po.fixed_tol = cfg.simulation.fixed_tol;
    po.max_iter = cfg.simulation.max_picard_iter;
    po.cg.tol = cfg.simulation.cg_tol;
    const PicardIntervalResult r = picard_interval(initial_state(op.sys, cfg.simulation), op.w1, op.w2, op.gram,
                                                   make_load_fn(op.sys, cfg.simulation.load), c.delta, po);
    int violations = 0;
    for (std::size_t k = 0; k < r.diffs.size(); ++k) {
        if (k == 0) {
            csv.row({"1", csv.num(r.diffs[0]), "", csv.num(bound), ""});
            continue;
        }
        const double q = r.diffs[k - 1] > 0.0 ? r.diffs[k] / r.diffs[k - 1] : 0.0;
        const bool ok = q <= bound;
        violations += ok ? 0 : 1;
        csv.row({std::to_string(k + 1), csv.num(r.diffs[k]), csv.num(q), csv.num(bound), ok ? "1" : "0"});
    }
    rep << "picard on [0, delta]: " << r.iterations << " sweeps\n";
    rep << "  iter  difference          ratio\n";
    for (std::size_t k = 0; k < r.diffs.size(); ++k) {
        rep << "  " << k + 1 << "  " << format_double(r.diffs[k], 6);
        if (k > 0 && r.diffs[k - 1] > 0.0)
            rep << "  " << format_double(r.diffs[k] / r.diffs[k - 1], 6);
        rep << '\n';
    }
    rep << (violations == 0 ? "all measured ratios within the bound\n" : "bound exceeded by some ratios\n");
}

}  // namespace

std::vector<std::filesystem::path> run_command(Command cmd, const RunConfig& cfg, const std::filesystem::path& out_dir,
                                               std::ostream& report)
{
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec)
        throw ParameterError("cannot create output directory '" + out_dir.string() + "': " + ec.message());

    std::vector<std::filesystem::path> files;
    std::ostringstream rep;
    rep << "micromorph " << to_string(cmd) << ", config hash " << config_hash(cfg) << '\n';
    auto finish = [&] {
        write_report_file(out_dir / "report.txt", rep.str());
        files.push_back(out_dir / "report.txt");
        report << rep.str();
    };
    try {
        switch (cmd) {
        case Command::Check: run_check(cfg, out_dir, files, rep); break;
        case Command::Simulate: run_simulate(cfg, out_dir, files, rep); break;
        case Command::Dispersion: run_dispersion(cfg, out_dir, files, rep); break;
        case Command::Korn: run_korn(cfg, out_dir, files, rep); break;
        case Command::ContractionDemo: run_contraction_demo(cfg, out_dir, files, rep); break;
        }
    }
    catch (...) {
        finish();
        throw;
    }
    finish();
    return files;
}

}  // namespace micromorph
