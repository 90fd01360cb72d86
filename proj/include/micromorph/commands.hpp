#pragma once

#include "micromorph/config.hpp"
#include "micromorph/dynamics.hpp"
#include "micromorph/fespace.hpp"

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace micromorph {

enum class Command { Check, Simulate, Dispersion, Korn, ContractionDemo };

std::optional<Command> parse_command(const std::string& name);
std::string_view to_string(Command c);

/// Exit codes: 0 ok, 2 configuration/parameter error, 3 hypothesis failure,
/// 4 solver failure.
int exit_code_for(const std::exception& e);

/// Runs one command, writes its CSV files into `out_dir` and a readable
/// report to `report` (also saved as report.txt). Returns the written file
/// names. Failures are thrown as micromorph errors after any partial
/// artifacts have been written.
std::vector<std::filesystem::path> run_command(Command cmd, const RunConfig& cfg, const std::filesystem::path& out_dir,
                                               std::ostream& report);

/// Initial state interpolated from the configured closed-form fields.
DynamicState initial_state(const FESystem& sys, const SimulationConfig& sim);

/// l(t) as g_f(t) L_f + g_M(t) L_M with the two spatial parts assembled once.
LoadFn make_load_fn(const FESystem& sys, const LoadFunctional& load);

/// The closed-form bump profile prod_i sin(pi (x_i - o_i) / L_i).
double bump_profile(const MeshConfig& mesh, const Vector3& x);

}  // namespace micromorph
