/**
 * @file config.hpp
 * @brief Run configuration: an INI-like text format with the sections
 *        [material] [mesh] [simulation] [analysis] [output].
 *
 * Lines are `key = value`; `#` and `;` start comments. Unknown sections or
 * keys, malformed values and duplicates are collected with their line
 * numbers and reported together in one ConfigError.
 *
 * Tensor values:
 *   zero | identity | isotropic a [b] | components c1 c2 ...
 * where `components` lists the upper triangle (row by row) of the matrix in
 * the orthonormal basis of the tensor's class (21, 6 or 45 numbers).
 */
#pragma once

#include "micromorph/assembly.hpp"
#include "micromorph/errors.hpp"
#include "micromorph/tensors.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace micromorph {

struct ConfigIssue {
    int line = 0;  // 0 when not tied to a line
    std::string key;
    std::string reason;
};

class ConfigError : public Error {
public:
    explicit ConfigError(std::vector<ConfigIssue> issues);
    const char* kind() const noexcept override { return "config-error"; }
    const std::vector<ConfigIssue>& issues() const noexcept { return issues_; }

private:
    std::vector<ConfigIssue> issues_;
};

/// Closed-form initial field a * prod_i sin(pi (x_i - o_i) / L_i), which
/// vanishes on the box boundary. `amplitude` has 3 entries for vector fields
/// and 9 (row-major) for tensor fields; empty means zero.
struct FieldSpec {
    std::vector<double> amplitude;
    bool is_zero() const;
};

enum class Integrator { Picard, Newmark };

struct MeshConfig {
    Vector3 dims = Vector3::Ones();
    std::array<int, 3> resolution{2, 2, 2};
    Vector3 origin = Vector3::Zero();
};

struct SimulationConfig {
    double t_final = 1.0;
    Integrator integrator = Integrator::Picard;
    double dt = 0.01;            // Newmark step
    int n_t = 17;                // Picard nodes per interval
    double fixed_tol = 1e-10;
    int max_picard_iter = 60;
    double cg_tol = 1e-14;
    LoadFunctional load;
    FieldSpec u0, ut0, p0, pt0;
    std::vector<int> sample_dofs;  // empty: first u and first P dof
};

struct AnalysisConfig {
    Vector3 k_direction = Vector3::UnitX();
    double k_min = 0.0;
    double k_max = 5.0;
    int k_count = 26;
    std::vector<int> korn_levels{2, 3, 4};
    double eig_tol = 1e-8;

    std::vector<double> k_samples() const;
};

struct OutputConfig {
    std::string dir = "out";
    int precision = 17;
};

struct RunConfig {
    MaterialParams material;
    MeshConfig mesh;
    SimulationConfig simulation;
    AnalysisConfig analysis;
    OutputConfig output;
};

/// Defaults: rho = J = mu = Lc = 1, every tensor the identity of its class.
RunConfig default_config();

/// Throws ConfigError listing every problem found.
RunConfig parse_config(const std::string& text);
RunConfig load_config_file(const std::string& path);

/// Canonical text with every key written out; parse_config inverts it exactly.
std::string serialize_config(const RunConfig& cfg);

/// 64-bit FNV-1a of the canonical text, as 16 hex digits.
std::string config_hash(const RunConfig& cfg);
std::uint64_t fnv1a64(const std::string& s);

/// Parses one tensor value for the given class; throws ParameterError.
ConstitutiveTensor4 parse_tensor_spec(SymmetryClass cls, const std::string& value);

/// %.{precision}g formatting used for every number written to disk.
std::string format_double(double v, int precision = 17);

}  // namespace micromorph
