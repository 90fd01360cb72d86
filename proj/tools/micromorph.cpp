// micromorph <command> --config <path> [--out <dir>]

#include "micromorph/commands.hpp"
#include "micromorph/config.hpp"
#include "micromorph/errors.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace mm = micromorph;

int main(int argc, char** argv)
{
    CLI::App app{"Relaxed micromorphic continuum: hypothesis checks, dynamics, dispersion"};
    std::string command;
    std::string config_path;
    std::string out_dir;
    app.add_option("command", command, "check | simulate | dispersion | korn | contraction-demo")->required();
    app.add_option("--config", config_path, "run configuration file")->required();
    app.add_option("--out", out_dir, "output directory (default: [output] dir)");

    try {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    }
    catch (const CLI::ParseError& e) {
        std::cerr << "usage-error: " << e.what() << '\n';
        return 2;
    }

    const auto cmd = mm::parse_command(command);
    if (!cmd) {
        std::cerr << "usage-error: unknown command '" << command << "'\n";
        return 2;
    }
    try {
        const mm::RunConfig cfg = mm::load_config_file(config_path);
        mm::run_command(*cmd, cfg, out_dir.empty() ? cfg.output.dir : out_dir, std::cout);
        return 0;
    }
    catch (const mm::Error& e) {
        std::cerr << e.kind() << ": " << e.what() << '\n';
        return mm::exit_code_for(e);
    }
    catch (const std::exception& e) {
        std::cerr << "internal-error: " << e.what() << '\n';
        return 4;
    }
}
