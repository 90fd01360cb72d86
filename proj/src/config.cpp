#include "micromorph/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace micromorph {

namespace {

std::string join_issues(const std::vector<ConfigIssue>& issues)
{
    std::ostringstream os;
    os << "invalid configuration:";
    for (const auto& i : issues) {
        os << " [";
        if (i.line > 0)
            os << "line " << i.line << ", ";
        os << "key '" << i.key << "'] " << i.reason << ";";
    }
    return os.str();
}

}  // namespace

ConfigError::ConfigError(std::vector<ConfigIssue> issues) : Error(join_issues(issues)), issues_(std::move(issues)) {}

bool FieldSpec::is_zero() const
{
    for (double a : amplitude)
        if (a != 0.0)
            return false;
    return true;
}

std::vector<double> AnalysisConfig::k_samples() const
{
    std::vector<double> k(static_cast<std::size_t>(k_count));
    for (int i = 0; i < k_count; ++i)
        k[i] = k_count == 1 ? k_min : k_min + (k_max - k_min) * i / (k_count - 1);
    return k;
}

std::string format_double(double v, int precision)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    return buf;
}

std::uint64_t fnv1a64(const std::string& s)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string config_hash(const RunConfig& cfg)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(serialize_config(cfg))));
    return buf;
}

RunConfig default_config()
{
    RunConfig c;
    MaterialParams& m = c.material;
    m.C_e = ConstitutiveTensor4::identity(SymmetryClass::ElasticSym);
    m.C_c = ConstitutiveTensor4::identity(SymmetryClass::CouplingSkew);
    m.C_micro = ConstitutiveTensor4::identity(SymmetryClass::ElasticSym);
    m.L_aniso = ConstitutiveTensor4::identity(SymmetryClass::Curvature);
    m.Ct_e = ConstitutiveTensor4::identity(SymmetryClass::ElasticSym);
    m.Ct_c = ConstitutiveTensor4::identity(SymmetryClass::CouplingSkew);
    m.Ct_micro = ConstitutiveTensor4::identity(SymmetryClass::ElasticSym);
    m.Lt_aniso = ConstitutiveTensor4::identity(SymmetryClass::Curvature);
    return c;
}

// ---------------------------------------------------------------------------
// Value parsing
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> split_ws(const std::string& s)
{
    std::istringstream is(s);
    std::vector<std::string> out;
    for (std::string t; is >> t;)
        out.push_back(t);
    return out;
}

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& t)
{
    double v = 0.0;
    const auto* first = t.data();
    const auto* last = t.data() + t.size();
    if (first != last && *first == '+')
        ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v))
        throw ParameterError("'" + t + "' is not a finite number");
    return v;
}

long to_long(const std::string& t)
{
    long v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size())
        throw ParameterError("'" + t + "' is not an integer");
    return v;
}

std::vector<double> doubles(const std::vector<std::string>& tok, std::size_t from = 0)
{
    std::vector<double> out;
    for (std::size_t i = from; i < tok.size(); ++i)
        out.push_back(to_double(tok[i]));
    return out;
}

void need_count(const std::vector<std::string>& tok, std::size_t n)
{
    if (tok.size() != n)
        throw ParameterError("expected " + std::to_string(n) + " value(s), got " + std::to_string(tok.size()));
}

double scalar(const std::vector<std::string>& tok)
{
    need_count(tok, 1);
    return to_double(tok[0]);
}

int integer(const std::vector<std::string>& tok)
{
    need_count(tok, 1);
    const long v = to_long(tok[0]);
    if (v < -2147483647L || v > 2147483647L)
        throw ParameterError("integer out of range");
    return static_cast<int>(v);
}

Vector3 vec3(const std::vector<std::string>& tok)
{
    need_count(tok, 3);
    return {to_double(tok[0]), to_double(tok[1]), to_double(tok[2])};
}

TimeProfile parse_profile(const std::vector<std::string>& tok)
{
    if (tok.empty())
        throw ParameterError("empty time profile");
    const std::string& kind = tok[0];
    const std::vector<double> v = doubles(tok, 1);
    if (kind == "constant") {
        if (v.size() > 1)
            throw ParameterError("constant profile takes at most one value");
        return TimeProfile::constant(v.empty() ? 1.0 : v[0]);
    }
    if (kind == "polynomial") {
        if (v.empty())
            throw ParameterError("polynomial profile needs at least one coefficient");
        return TimeProfile::polynomial(v);
    }
    if (kind == "table") {
        if (v.size() < 4 || v.size() % 2 != 0)
            throw ParameterError("table profile needs pairs t g (at least two)");
        std::vector<std::pair<double, double>> s;
        for (std::size_t i = 0; i < v.size(); i += 2)
            s.emplace_back(v[i], v[i + 1]);
        return TimeProfile::table(std::move(s));
    }
    throw ParameterError("unknown time profile '" + kind + "' (constant | polynomial | table)");
}

FieldSpec parse_field(const std::vector<std::string>& tok, std::size_t n)
{
    if (tok.size() == 1 && tok[0] == "zero")
        return {};
    if (!tok.empty() && tok[0] == "bump") {
        FieldSpec f{doubles(tok, 1)};
        if (f.amplitude.size() != n)
            throw ParameterError("bump field needs " + std::to_string(n) + " amplitudes, got " +
                                 std::to_string(f.amplitude.size()));
        return f;
    }
    throw ParameterError("field must be 'zero' or 'bump' followed by " + std::to_string(n) + " amplitudes");
}

ModelVariant parse_variant(const std::vector<std::string>& tok)
{
    need_count(tok, 1);
    for (auto v : {ModelVariant::FullInertia, ModelVariant::SimplifiedInertia, ModelVariant::Quasistatic,
                   ModelVariant::ZeroLengthScale})
        if (tok[0] == to_string(v))
            return v;
    throw ParameterError("unknown variant '" + tok[0] + "' (full | simplified | quasistatic | zero_length)");
}

using Setter = std::function<void(RunConfig&, const std::vector<std::string>&)>;

ConstitutiveTensor4& tensor_slot(MaterialParams& m, const std::string& name)
{
    if (name == "C_e") return m.C_e;
    if (name == "C_c") return m.C_c;
    if (name == "C_micro") return m.C_micro;
    if (name == "L_aniso") return m.L_aniso;
    if (name == "Ct_e") return m.Ct_e;
    if (name == "Ct_c") return m.Ct_c;
    if (name == "Ct_micro") return m.Ct_micro;
    return m.Lt_aniso;
}

const std::map<std::string, std::map<std::string, Setter>>& schema()
{
    static const auto table = [] {
        std::map<std::string, std::map<std::string, Setter>> s;
        auto& mat = s["material"];
        mat["variant"] = [](RunConfig& c, const auto& t) { c.material.variant = parse_variant(t); };
        mat["rho"] = [](RunConfig& c, const auto& t) { c.material.rho = scalar(t); };
        mat["J"] = [](RunConfig& c, const auto& t) { c.material.J = scalar(t); };
        mat["mu"] = [](RunConfig& c, const auto& t) { c.material.mu = scalar(t); };
        mat["Lc"] = [](RunConfig& c, const auto& t) { c.material.Lc = scalar(t); };
        for (const char* name : {"C_e", "C_c", "C_micro", "L_aniso", "Ct_e", "Ct_c", "Ct_micro", "Lt_aniso"}) {
            const std::string n = name;
            mat[n] = [n](RunConfig& c, const auto& t) {
                ConstitutiveTensor4& slot = tensor_slot(c.material, n);
                std::string joined;
                for (const auto& x : t)
                    joined += x + " ";
                slot = parse_tensor_spec(slot.symmetry_class(), joined);
            };
        }

        auto& mesh = s["mesh"];
        mesh["dims"] = [](RunConfig& c, const auto& t) { c.mesh.dims = vec3(t); };
        mesh["origin"] = [](RunConfig& c, const auto& t) { c.mesh.origin = vec3(t); };
        mesh["resolution"] = [](RunConfig& c, const auto& t) {
            need_count(t, 3);
            for (int a = 0; a < 3; ++a)
                c.mesh.resolution[a] = integer({t[a]});
        };

        auto& sim = s["simulation"];
        sim["T_final"] = [](RunConfig& c, const auto& t) { c.simulation.t_final = scalar(t); };
        sim["integrator"] = [](RunConfig& c, const auto& t) {
            need_count(t, 1);
            if (t[0] == "picard")
                c.simulation.integrator = Integrator::Picard;
            else if (t[0] == "newmark")
                c.simulation.integrator = Integrator::Newmark;
            else
                throw ParameterError("integrator must be picard or newmark");
        };
        sim["dt"] = [](RunConfig& c, const auto& t) { c.simulation.dt = scalar(t); };
        sim["n_t"] = [](RunConfig& c, const auto& t) { c.simulation.n_t = integer(t); };
        sim["fixed_tol"] = [](RunConfig& c, const auto& t) { c.simulation.fixed_tol = scalar(t); };
        sim["max_picard_iter"] = [](RunConfig& c, const auto& t) { c.simulation.max_picard_iter = integer(t); };
        sim["cg_tol"] = [](RunConfig& c, const auto& t) { c.simulation.cg_tol = scalar(t); };
        sim["f"] = [](RunConfig& c, const auto& t) { c.simulation.load.f_amplitude = vec3(t); };
        sim["f_profile"] = [](RunConfig& c, const auto& t) { c.simulation.load.f_profile = parse_profile(t); };
        sim["M"] = [](RunConfig& c, const auto& t) {
            need_count(t, 9);
            const auto v = doubles(t);
            c.simulation.load.M_amplitude = Eigen::Map<const Eigen::Matrix<double, 3, 3, Eigen::RowMajor>>(v.data());
        };
        sim["M_profile"] = [](RunConfig& c, const auto& t) { c.simulation.load.M_profile = parse_profile(t); };
        sim["u0"] = [](RunConfig& c, const auto& t) { c.simulation.u0 = parse_field(t, 3); };
        sim["ut0"] = [](RunConfig& c, const auto& t) { c.simulation.ut0 = parse_field(t, 3); };
        sim["P0"] = [](RunConfig& c, const auto& t) { c.simulation.p0 = parse_field(t, 9); };
        sim["Pt0"] = [](RunConfig& c, const auto& t) { c.simulation.pt0 = parse_field(t, 9); };
        sim["sample_dofs"] = [](RunConfig& c, const auto& t) {
            c.simulation.sample_dofs.clear();
            for (const auto& x : t)
                c.simulation.sample_dofs.push_back(integer({x}));
        };

        auto& an = s["analysis"];
        an["k_direction"] = [](RunConfig& c, const auto& t) { c.analysis.k_direction = vec3(t); };
        an["k_min"] = [](RunConfig& c, const auto& t) { c.analysis.k_min = scalar(t); };
        an["k_max"] = [](RunConfig& c, const auto& t) { c.analysis.k_max = scalar(t); };
        an["k_count"] = [](RunConfig& c, const auto& t) { c.analysis.k_count = integer(t); };
        an["eig_tol"] = [](RunConfig& c, const auto& t) { c.analysis.eig_tol = scalar(t); };
        an["korn_levels"] = [](RunConfig& c, const auto& t) {
            if (t.empty())
                throw ParameterError("at least one level required");
            c.analysis.korn_levels.clear();
            for (const auto& x : t)
                c.analysis.korn_levels.push_back(integer({x}));
        };

        auto& out = s["output"];
        out["dir"] = [](RunConfig& c, const auto& t) {
            need_count(t, 1);
            c.output.dir = t[0];
        };
        out["precision"] = [](RunConfig& c, const auto& t) { c.output.precision = integer(t); };
        return s;
    }();
    return table;
}

void cross_validate(const RunConfig& c, std::vector<ConfigIssue>& issues)
{
    auto bad = [&issues](bool fail, const char* key, const std::string& reason) {
        if (fail)
            issues.push_back({0, key, reason});
    };
    for (const auto& v : c.material.violations())
        issues.push_back({0, "material", v});
    for (int a = 0; a < 3; ++a) {
        bad(!(c.mesh.dims(a) > 0.0), "dims", "box dimensions must be positive");
        bad(c.mesh.resolution[a] < 1, "resolution", "resolution must be >= 1");
    }
    const auto& s = c.simulation;
    bad(!(s.t_final > 0.0), "T_final", "must be positive");
    bad(!(s.dt > 0.0), "dt", "must be positive");
    bad(s.n_t < 3, "n_t", "need at least 3 nodes per interval");
    bad(!(s.fixed_tol > 0.0), "fixed_tol", "must be positive");
    bad(s.max_picard_iter < 1, "max_picard_iter", "must be >= 1");
    bad(!(s.cg_tol > 0.0), "cg_tol", "must be positive");
    for (int d : s.sample_dofs)
        bad(d < 0, "sample_dofs", "dof indices must be non-negative");
    const auto& a = c.analysis;
    bad(!(a.k_direction.norm() > 0.0), "k_direction", "must be non-zero");
    bad(a.k_count < 1, "k_count", "must be >= 1");
    bad(a.k_max < a.k_min, "k_max", "must be >= k_min");
    bad(!(a.eig_tol > 0.0), "eig_tol", "must be positive");
    for (int l : a.korn_levels)
        bad(l < 1, "korn_levels", "levels must be >= 1");
    bad(c.output.precision < 1 || c.output.precision > 17, "precision", "must be in 1..17");
    bad(c.output.dir.empty(), "dir", "must not be empty");
}

}  // namespace

ConstitutiveTensor4 parse_tensor_spec(SymmetryClass cls, const std::string& value)
{
    const auto tok = split_ws(value);
    if (tok.empty())
        throw ParameterError("empty tensor specification");
    const std::string& kind = tok[0];
    if (kind == "zero" && tok.size() == 1)
        return ConstitutiveTensor4::zero(cls);
    if (kind == "identity" && tok.size() == 1)
        return ConstitutiveTensor4::identity(cls);
    if (kind == "isotropic")
        return make_isotropic(cls, doubles(tok, 1));
    if (kind == "components") {
        const auto v = doubles(tok, 1);
        return ConstitutiveTensor4::from_components(cls, v);
    }
    throw ParameterError("tensor must be zero | identity | isotropic a [b] | components ...");
}

RunConfig parse_config(const std::string& text)
{
    RunConfig cfg = default_config();
    std::vector<ConfigIssue> issues;
    std::set<std::pair<std::string, std::string>> seen;
    std::string section;
    std::istringstream is(text);
    int lineno = 0;
    for (std::string raw; std::getline(is, raw);) {
        ++lineno;
        std::string line = raw;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                issues.push_back({lineno, line, "malformed section header"});
                continue;
            }
            section = trim(line.substr(1, line.size() - 2));
            if (!schema().count(section)) {
                issues.push_back({lineno, section, "unknown section"});
                section = "?";
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            issues.push_back({lineno, line, "expected 'key = value'"});
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty()) {
            issues.push_back({lineno, key, "key outside of any section"});
            continue;
        }
        if (section == "?")
            continue;
        const auto& keys = schema().at(section);
        const auto it = keys.find(key);
        if (it == keys.end()) {
            issues.push_back({lineno, key, "unknown key in section [" + section + "]"});
            continue;
        }
        if (!seen.insert({section, key}).second) {
            issues.push_back({lineno, key, "duplicate key"});
            continue;
        }
        try {
            it->second(cfg, split_ws(value));
        }
        catch (const Error& e) {
            issues.push_back({lineno, key, e.what()});
        }
    }
    if (issues.empty())
        cross_validate(cfg, issues);
    if (!issues.empty())
        throw ConfigError(std::move(issues));
    return cfg;
}

RunConfig load_config_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError({{0, "--config", "cannot read file '" + path + "'"}});
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace {

std::string nums(std::initializer_list<double> v)
{
    std::string s;
    for (double x : v) {
        if (!s.empty())
            s += ' ';
        s += format_double(x);
    }
    return s;
}

std::string nums(const std::vector<double>& v)
{
    std::string s;
    for (double x : v) {
        if (!s.empty())
            s += ' ';
        s += format_double(x);
    }
    return s;
}

std::string tensor_text(const ConstitutiveTensor4& t)
{
    const Eigen::MatrixXd& r = t.representation();
    if (r.isZero(0.0))
        return "zero";
    if (r == Eigen::MatrixXd::Identity(r.rows(), r.cols()))
        return "identity";
    return "components " + nums(t.components());
}

std::string profile_text(const TimeProfile& p)
{
    switch (p.kind()) {
    case TimeProfile::Kind::Constant:
        return "constant " + format_double(p.coefficients().empty() ? 1.0 : p.coefficients()[0]);
    case TimeProfile::Kind::Polynomial:
        return "polynomial " + nums(p.coefficients());
    case TimeProfile::Kind::Table: {
        std::vector<double> flat;
        for (const auto& [t, g] : p.samples()) {
            flat.push_back(t);
            flat.push_back(g);
        }
        return "table " + nums(flat);
    }
    }
    return "constant 1";
}

std::string field_text(const FieldSpec& f)
{
    return f.amplitude.empty() ? "zero" : "bump " + nums(f.amplitude);
}

std::string ints(const std::vector<int>& v)
{
    std::string s;
    for (int x : v) {
        if (!s.empty())
            s += ' ';
        s += std::to_string(x);
    }
    return s;
}

}  // namespace

std::string serialize_config(const RunConfig& c)
{
    std::ostringstream os;
    const MaterialParams& m = c.material;
    os << "[material]\n";
    os << "variant = " << to_string(m.variant) << '\n';
    os << "rho = " << format_double(m.rho) << '\n';
    os << "J = " << format_double(m.J) << '\n';
    os << "mu = " << format_double(m.mu) << '\n';
    os << "Lc = " << format_double(m.Lc) << '\n';
    for (const auto& nt : named_tensors(m))
        os << nt.name << " = " << tensor_text(*nt.tensor) << '\n';

    os << "\n[mesh]\n";
    os << "dims = " << nums({c.mesh.dims(0), c.mesh.dims(1), c.mesh.dims(2)}) << '\n';
    os << "resolution = " << c.mesh.resolution[0] << ' ' << c.mesh.resolution[1] << ' ' << c.mesh.resolution[2]
       << '\n';
    os << "origin = " << nums({c.mesh.origin(0), c.mesh.origin(1), c.mesh.origin(2)}) << '\n';

    const SimulationConfig& s = c.simulation;
    os << "\n[simulation]\n";
    os << "T_final = " << format_double(s.t_final) << '\n';
    os << "integrator = " << (s.integrator == Integrator::Picard ? "picard" : "newmark") << '\n';
    os << "dt = " << format_double(s.dt) << '\n';
    os << "n_t = " << s.n_t << '\n';
    os << "fixed_tol = " << format_double(s.fixed_tol) << '\n';
    os << "max_picard_iter = " << s.max_picard_iter << '\n';
    os << "cg_tol = " << format_double(s.cg_tol) << '\n';
    const Vector3& f = s.load.f_amplitude;
    os << "f = " << nums({f(0), f(1), f(2)}) << '\n';
    os << "f_profile = " << profile_text(s.load.f_profile) << '\n';
    const Matrix3& mm = s.load.M_amplitude;
    os << "M = "
       << nums({mm(0, 0), mm(0, 1), mm(0, 2), mm(1, 0), mm(1, 1), mm(1, 2), mm(2, 0), mm(2, 1), mm(2, 2)}) << '\n';
    os << "M_profile = " << profile_text(s.load.M_profile) << '\n';
    os << "u0 = " << field_text(s.u0) << '\n';
    os << "ut0 = " << field_text(s.ut0) << '\n';
    os << "P0 = " << field_text(s.p0) << '\n';
    os << "Pt0 = " << field_text(s.pt0) << '\n';
    if (!s.sample_dofs.empty())
        os << "sample_dofs = " << ints(s.sample_dofs) << '\n';

    const AnalysisConfig& a = c.analysis;
    os << "\n[analysis]\n";
    os << "k_direction = " << nums({a.k_direction(0), a.k_direction(1), a.k_direction(2)}) << '\n';
    os << "k_min = " << format_double(a.k_min) << '\n';
    os << "k_max = " << format_double(a.k_max) << '\n';
    os << "k_count = " << a.k_count << '\n';
    os << "korn_levels = " << ints(a.korn_levels) << '\n';
    os << "eig_tol = " << format_double(a.eig_tol) << '\n';

    os << "\n[output]\n";
    os << "dir = " << c.output.dir << '\n';
    os << "precision = " << c.output.precision << '\n';
    return os.str();
}

}  // namespace micromorph
