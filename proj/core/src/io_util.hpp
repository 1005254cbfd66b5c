#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>

namespace cirad::detail {

/// Shortest decimal that round-trips the double exactly.
std::string fmt_double(double v);

std::ofstream open_output(const std::filesystem::path& path);
std::ifstream open_input(const std::filesystem::path& path);

std::string_view trim(std::string_view s);

}  // namespace cirad::detail
