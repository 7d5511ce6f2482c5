#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "qsl/experiment.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitCompute = 2;
constexpr int kExitIo = 3;

int do_validate(const std::string& config_path) {
    qsl::RunConfig cfg = qsl::parse_config_file(config_path);
    std::cout << "config ok: " << config_path << "\n";
    (void)cfg;
    return kExitOk;
}

int do_run(const std::string& config_path, const std::string& out_dir, bool emit_plot) {
    qsl::RunConfig cfg = qsl::parse_config_file(config_path);
    auto written = qsl::run(cfg, out_dir);
    for (const auto& p : written) std::cout << "wrote " << p.string() << "\n";
    if (emit_plot) {
        auto script = qsl::emit_plot_script(out_dir);
        std::cout << "wrote " << script.string() << "\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Non-Hermitian evolution and quantum-speed-limit experiment runner"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "results";
    bool emit_plot = false;

    CLI::App* run_cmd = app.add_subcommand("run", "Run the experiment described by a config file");
    run_cmd->add_option("config", config_path, "Config file")->required();
    run_cmd->add_option("--out", out_dir, "Output directory (default: results)");
    run_cmd->add_flag("--emit-plot", emit_plot, "Also write a plotting script");

    CLI::App* validate_cmd = app.add_subcommand("validate", "Parse and validate a config file");
    validate_cmd->add_option("config", config_path, "Config file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (app.got_subcommand(validate_cmd)) return do_validate(config_path);
        return do_run(config_path, out_dir, emit_plot);
    } catch (const qsl::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const qsl::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "compute error: " << e.what() << "\n";
        return kExitCompute;
    }
}
