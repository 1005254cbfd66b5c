#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "cirad/experiment.hpp"

namespace cirad::cli {

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> output_dir;
    std::optional<std::size_t> trials;
};

/// Flag overrides win over CIRAD_OUTPUT_DIR, which wins over the config.
ExperimentConfig apply_overrides(ExperimentConfig config, const Overrides& overrides);

/// Tracks every file a command writes and emits manifest.txt last.
class Manifest {
public:
    Manifest(std::filesystem::path root, std::string command, std::string config_hash, std::uint64_t seed);

    std::filesystem::path path(const std::string& name);
    void write() const;
    const std::vector<std::string>& files() const { return files_; }

private:
    std::filesystem::path root_;
    std::string command_;
    std::string config_hash_;
    std::uint64_t seed_;
    std::vector<std::string> files_;
};

void run_simulate(const ExperimentConfig& config, Manifest& manifest, std::ostream& out);
void run_sweep(const ExperimentConfig& config, Manifest& manifest, std::ostream& out);
void run_psl(const ExperimentConfig& config, Manifest& manifest, std::ostream& out);
void run_codes(const ExperimentConfig& config, Manifest& manifest, std::ostream& out);

/// Loads, overrides, dispatches and writes the manifest. Returns the process
/// exit status: 0 success, 1 validation error, 2 runtime error.
int run_command(std::string_view command, const std::optional<std::filesystem::path>& config_path,
                const Overrides& overrides, std::ostream& out, std::ostream& err);

}  // namespace cirad::cli
