#include "smdiff/app.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <iostream>
#include <vector>

int main(int argc, char** argv)
{
    CLI::App app{"Steady multicomponent Stefan-Maxwell diffusion solver"};
    app.require_subcommand(1);

    std::string config_path;
    smd::RunOptions options;
    std::string out = ".";

    const std::pair<const char*, const char*> commands[] = {
        {"convergence", "Manufactured-solution convergence study"},
        {"demo", "Mixed boundary condition demonstration"},
        {"solve", "Solve a configured problem on the unit square"},
        {"spectrum", "Eigenvalues of the transport matrices at given states"},
    };
    std::vector<CLI::Option*> out_options;
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config_path, "JSON configuration file")->required()->check(CLI::ExistingFile);
        out_options.push_back(sub->add_option("--out", out, "Output directory (overrides the config's output)"));
        sub->add_option("--threads", options.threads, "Worker threads")->check(CLI::PositiveNumber);
        sub->add_flag("--strict", options.force_strict, "Treat data inconsistencies as errors");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        smd::RunConfig config = smd::load_config(config_path);
        if (config.experiment != command) {
            throw smd::ConfigError("configuration is for '" + config.experiment + "', not '" + command + "'",
                                   {"experiment"});
        }
        const bool out_given = std::any_of(out_options.begin(), out_options.end(), [](auto* o) { return o->count() > 0; });
        options.out = !out_given && config.output ? *config.output : out;
        return smd::run_experiment(config, options);
    } catch (const std::exception& e) {
        std::cerr << smd::error_json(e) << '\n';
        return smd::exit_code_for(e);
    }
}
