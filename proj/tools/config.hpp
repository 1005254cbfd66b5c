#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "cirad/experiment.hpp"

namespace cirad::cli {

/// Parses `key = value` lines. '#' starts a comment. Unknown keys, bad values
/// and duplicate scalar keys raise ValidationError with the line number;
/// the finished config is run through validate().
ExperimentConfig parse_config(std::string_view text, const std::string& source = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);

/// Every key with its effective value, one per line, in a fixed order.
/// Reloading the output yields the same config.
std::string dump_config(const ExperimentConfig& config);

/// 16 hex digits of FNV-1a over dump_config, ignoring output_dir and
/// max_workers.
std::string config_hash(const ExperimentConfig& config);

}  // namespace cirad::cli
