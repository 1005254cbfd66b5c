#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"cirad: collaborative PMCW radar simulator"};
    app.require_subcommand(1);

    std::optional<std::string> config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> output_dir;
    std::optional<std::size_t> trials;

    for (const char* name : {"simulate", "sweep", "psl", "codes"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("config", config, "experiment config file")->check(CLI::ExistingFile);
        sub->add_option("--seed", seed, "override master_seed");
        sub->add_option("--output-dir", output_dir, "override output_dir");
        if (std::string(name) == "sweep") sub->add_option("--trials", trials, "override trials");
    }
    app.get_subcommand("simulate")->description("run one CPI in both modes and write maps");
    app.get_subcommand("sweep")->description("hit rate versus SNR");
    app.get_subcommand("psl")->description("range-cut PSL over code seeds");
    app.get_subcommand("codes")->description("correlation audit of the code pair");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    const auto* sub = app.get_subcommands().front();
    std::optional<std::filesystem::path> path;
    if (config) path = *config;
    return cirad::cli::run_command(sub->get_name(), path, {seed, output_dir, trials}, std::cout, std::cerr);
}
