#include "eulerlab/cli.hpp"
#include "eulerlab/error.hpp"

#include <CLI11.hpp>

#include <iomanip>
#include <iostream>

namespace {

int usage_error(const std::string& msg) {
    std::cerr << "error: " << msg << "\n";
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    using namespace eulerlab;
    CLI::App app{"eulerlab: numerical experiments on weak solutions of the incompressible Euler equations"};
    app.require_subcommand(1);

    cli::RunOptions options;
    std::string output_dir;
    std::uint64_t seed = 0;
    int jobs = 0;
    std::string config_path;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("config", config_path, "JSON experiment config")->required();
        sub->add_option("--seed-override", seed, "Replace the config seed");
        sub->add_option("--jobs", jobs, "Maximum worker threads")->check(CLI::PositiveNumber);
    };
    CLI::App* run = app.add_subcommand("run", "Run an experiment and write its artifacts");
    add_common(run);
    run->add_option("--output-dir", output_dir, "Artifact directory (overrides the config)");
    CLI::App* validate = app.add_subcommand("validate", "Check a config and print derived quantities");
    add_common(validate);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    if (!output_dir.empty()) options.output_dir = output_dir;
    if (run->count("--seed-override") || validate->count("--seed-override")) options.seed_override = seed;
    options.jobs = jobs;

    cli::Json config;
    try {
        config = cli::load_config(config_path);
    } catch (const Error& e) {
        return usage_error(e.what());
    }

    if (*validate) {
        const cli::Diagnostics d = cli::validate_config(config, options);
        for (const auto& e : d.errors) std::cout << "error: " << e << "\n";
        std::size_t width = 0;
        for (const auto& [k, v] : d.derived) width = std::max(width, k.size());
        for (const auto& [k, v] : d.derived) std::cout << std::left << std::setw(static_cast<int>(width) + 2) << k << v << "\n";
        std::cout << (d.ok() ? "config ok" : "config invalid") << "\n";
        return d.ok() ? 0 : 1;
    }

    const cli::Outcome out = cli::run_config(config, options);
    std::cout << out.summary;
    if (!out.output_dir.empty() && out.exit_code != 1) std::cout << " [" << out.output_dir.string() << "]";
    std::cout << "\n";
    return out.exit_code;
}
