#include "config.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include "cirad/error.hpp"

namespace cirad::cli {

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_list(std::string_view s) {
    std::vector<std::string_view> out;
    while (true) {
        const auto comma = s.find(',');
        out.push_back(trim(s.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        s.remove_prefix(comma + 1);
    }
    return out;
}

double to_double(std::string_view key, std::string_view v) {
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(out)) {
        throw ValidationError(std::string(key) + ": expected a number, got '" + std::string(v) + "'");
    }
    return out;
}

std::uint64_t to_uint(std::string_view key, std::string_view v) {
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size()) {
        throw ValidationError(std::string(key) + ": expected a non-negative integer, got '" + std::string(v) + "'");
    }
    return out;
}

bool to_bool(std::string_view key, std::string_view v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ValidationError(std::string(key) + ": expected true or false, got '" + std::string(v) + "'");
}

Target to_target(std::string_view key, std::string_view v) {
    const auto parts = split_list(v);
    if (parts.size() < 3 || parts.size() > 6) {
        throw ValidationError(std::string(key) +
                              ": expected r1, r2, velocity[, alpha[, angle_c1[, angle_c2]]]");
    }
    Target t;
    t.range_to_c1_m = to_double(key, parts[0]);
    t.range_to_c2_m = to_double(key, parts[1]);
    t.velocity_mps = to_double(key, parts[2]);
    t.reflectivity = parts.size() > 3 ? to_double(key, parts[3]) : 1.0;
    t.angle_to_c1_rad = parts.size() > 4 ? to_double(key, parts[4]) : 0.0;
    t.angle_to_c2_rad = parts.size() > 5 ? to_double(key, parts[5]) : 0.0;
    return t;
}

struct Waveform {
    double carrier_hz;
    double bandwidth_hz;
    std::size_t code_length;
    std::size_t pulses;
};

using Setter = std::function<void(ExperimentConfig&, Waveform&, std::string_view, std::string_view)>;

const std::map<std::string, Setter, std::less<>>& setters() {
    static const std::map<std::string, Setter, std::less<>> table = {
        {"carrier_hz", [](auto&, auto& w, auto k, auto v) { w.carrier_hz = to_double(k, v); }},
        {"bandwidth_hz", [](auto&, auto& w, auto k, auto v) { w.bandwidth_hz = to_double(k, v); }},
        {"code_length", [](auto&, auto& w, auto k, auto v) { w.code_length = to_uint(k, v); }},
        {"pulses_per_cpi", [](auto&, auto& w, auto k, auto v) { w.pulses = to_uint(k, v); }},
        {"c1_velocity_mps", [](auto& c, auto&, auto k, auto v) { c.scene.radars[0].velocity_mps = to_double(k, v); }},
        {"c2_velocity_mps", [](auto& c, auto&, auto k, auto v) { c.scene.radars[1].velocity_mps = to_double(k, v); }},
        {"mode", [](auto& c, auto&, auto, auto v) { c.mode = parse_cpi_mode(v); }},
        {"code_set", [](auto& c, auto&, auto, auto v) { c.code_set = parse_code_set(v); }},
        {"snr_db", [](auto& c, auto&, auto k, auto v) { c.run.snr_db = to_double(k, v); }},
        {"solver", [](auto& c, auto&, auto, auto v) { c.run.solver = parse_solver_choice(v); }},
        {"solver_max_iter", [](auto& c, auto&, auto k, auto v) { c.run.iterative.max_iter = to_uint(k, v); }},
        {"solver_tol", [](auto& c, auto&, auto k, auto v) { c.run.iterative.tol = to_double(k, v); }},
        {"solver_step", [](auto& c, auto&, auto k, auto v) { c.run.iterative.step = to_double(k, v); }},
        {"stale_range_offset_m",
         [](auto& c, auto&, auto k, auto v) { c.run.staleness.range_offset_m = to_double(k, v); }},
        {"stale_velocity_offset_mps",
         [](auto& c, auto&, auto k, auto v) { c.run.staleness.velocity_offset_mps = to_double(k, v); }},
        {"cross_path_enabled", [](auto& c, auto&, auto k, auto v) { c.run.cross_path_enabled = to_bool(k, v); }},
        {"quantization_bits",
         [](auto& c, auto&, auto k, auto v) {
             if (v == "none") {
                 c.side_channel.quantization_bits.reset();
             } else {
                 c.side_channel.quantization_bits = static_cast<int>(to_uint(k, v));
             }
         }},
        {"drop_probability", [](auto& c, auto&, auto k, auto v) { c.side_channel.drop_probability = to_double(k, v); }},
        {"latency_pulses", [](auto& c, auto&, auto k, auto v) { c.side_channel.latency_pulses = to_uint(k, v); }},
        {"master_seed", [](auto& c, auto&, auto k, auto v) { c.master_seed = to_uint(k, v); }},
        {"max_workers", [](auto& c, auto&, auto k, auto v) { c.max_workers = to_uint(k, v); }},
        {"output_dir", [](auto& c, auto&, auto, auto v) { c.output_dir = std::string(v); }},
        {"snr_grid",
         [](auto& c, auto&, auto k, auto v) {
             c.snr_grid.clear();
             for (auto item : split_list(v)) c.snr_grid.push_back(to_double(k, item));
         }},
        {"trials", [](auto& c, auto&, auto k, auto v) { c.trials = to_uint(k, v); }},
        {"range_min_m", [](auto& c, auto&, auto k, auto v) { c.range_min_m = to_double(k, v); }},
        {"range_max_m", [](auto& c, auto&, auto k, auto v) { c.range_max_m = to_double(k, v); }},
        {"alpha2_min", [](auto& c, auto&, auto k, auto v) { c.alpha2_min = to_double(k, v); }},
        {"alpha2_max", [](auto& c, auto&, auto k, auto v) { c.alpha2_max = to_double(k, v); }},
        {"target_velocity_mps", [](auto& c, auto&, auto k, auto v) { c.target_velocity_mps = to_double(k, v); }},
        {"min_target_separation_m",
         [](auto& c, auto&, auto k, auto v) { c.min_target_separation_m = to_double(k, v); }},
        {"min_separation_bins", [](auto& c, auto&, auto k, auto v) { c.peaks.min_separation_bins = to_uint(k, v); }},
        {"detection_max_range_m", [](auto& c, auto&, auto k, auto v) { c.peaks.max_range_m = to_double(k, v); }},
        {"psl_seeds", [](auto& c, auto&, auto k, auto v) { c.psl_seeds = to_uint(k, v); }},
        {"psl_exclusion_bins", [](auto& c, auto&, auto k, auto v) { c.psl_exclusion_bins = to_uint(k, v); }},
    };
    return table;
}

}  // namespace

ExperimentConfig parse_config(std::string_view text, const std::string& source) {
    ExperimentConfig config;
    const WaveformParams defaults;
    Waveform w{defaults.carrier_hz, defaults.bandwidth_hz, defaults.code_length, defaults.pulses_per_cpi};
    std::set<std::string, std::less<>> seen;
    bool targets_given = false;

    std::size_t line_no = 0;
    std::istringstream in{std::string(text)};
    std::string raw;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto where = source + ":" + std::to_string(line_no) + ": ";
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ValidationError(where + "expected 'key = value'");
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (key.empty()) throw ValidationError(where + "missing key");
        if (value.empty()) throw ValidationError(where + std::string(key) + ": missing value");
        try {
            if (key == "target") {
                if (!targets_given) config.scene.targets.clear();
                targets_given = true;
                config.scene.targets.push_back(to_target(key, value));
                continue;
            }
            const auto it = setters().find(key);
            if (it == setters().end()) throw ValidationError("unknown key '" + std::string(key) + "'");
            if (!seen.insert(std::string(key)).second) {
                throw ValidationError("duplicate key '" + std::string(key) + "'");
            }
            it->second(config, w, key, value);
        } catch (const ValidationError& e) {
            throw ValidationError(where + e.what());
        }
    }

    if (!(w.bandwidth_hz > 0.0)) throw ValidationError("bandwidth_hz: must be > 0");
    if (!(w.carrier_hz > 0.0)) throw ValidationError("carrier_hz: must be > 0");
    if (w.code_length < 2) throw ValidationError("code_length: must be >= 2");
    if (w.pulses < 2) throw ValidationError("pulses_per_cpi: must be >= 2");
    config.waveform = make_waveform(w.carrier_hz, w.bandwidth_hz, w.code_length, w.pulses);
    validate(config);
    return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path.string());
}

namespace {

std::string num(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return ec == std::errc{} ? std::string(buf, ptr) : "nan";
}

}  // namespace

std::string dump_config(const ExperimentConfig& c) {
    std::ostringstream os;
    const auto& w = c.waveform;
    os << "carrier_hz = " << num(w.carrier_hz) << '\n'
       << "bandwidth_hz = " << num(w.bandwidth_hz) << '\n'
       << "code_length = " << w.code_length << '\n'
       << "pulses_per_cpi = " << w.pulses_per_cpi << '\n'
       << "c1_velocity_mps = " << num(c.scene.c1().velocity_mps) << '\n'
       << "c2_velocity_mps = " << num(c.scene.c2().velocity_mps) << '\n';
    for (const auto& t : c.scene.targets) {
        os << "target = " << num(t.range_to_c1_m) << ", " << num(t.range_to_c2_m) << ", " << num(t.velocity_mps)
           << ", " << num(t.reflectivity.real()) << ", " << num(t.angle_to_c1_rad) << ", " << num(t.angle_to_c2_rad)
           << '\n';
    }
    os << "mode = " << to_string(c.mode) << '\n'
       << "code_set = " << to_string(c.code_set) << '\n'
       << "snr_db = " << num(c.run.snr_db) << '\n'
       << "solver = " << to_string(c.run.solver) << '\n'
       << "solver_max_iter = " << c.run.iterative.max_iter << '\n'
       << "solver_tol = " << num(c.run.iterative.tol) << '\n'
       << "solver_step = " << num(c.run.iterative.step) << '\n'
       << "stale_range_offset_m = " << num(c.run.staleness.range_offset_m) << '\n'
       << "stale_velocity_offset_mps = " << num(c.run.staleness.velocity_offset_mps) << '\n'
       << "cross_path_enabled = " << (c.run.cross_path_enabled ? "true" : "false") << '\n'
       << "quantization_bits = "
       << (c.side_channel.quantization_bits ? std::to_string(*c.side_channel.quantization_bits) : "none") << '\n'
       << "drop_probability = " << num(c.side_channel.drop_probability) << '\n'
       << "latency_pulses = " << c.side_channel.latency_pulses << '\n'
       << "master_seed = " << c.master_seed << '\n'
       << "max_workers = " << c.max_workers << '\n'
       << "output_dir = " << c.output_dir << '\n'
       << "snr_grid = ";
    for (std::size_t i = 0; i < c.snr_grid.size(); ++i) os << (i ? ", " : "") << num(c.snr_grid[i]);
    os << '\n'
       << "trials = " << c.trials << '\n'
       << "range_min_m = " << num(c.range_min_m) << '\n'
       << "range_max_m = " << num(c.range_max_m) << '\n'
       << "alpha2_min = " << num(c.alpha2_min) << '\n'
       << "alpha2_max = " << num(c.alpha2_max) << '\n'
       << "target_velocity_mps = " << num(c.target_velocity_mps) << '\n'
       << "min_target_separation_m = " << num(c.min_target_separation_m) << '\n'
       << "min_separation_bins = " << c.peaks.min_separation_bins << '\n'
       << "detection_max_range_m = " << num(c.peaks.max_range_m) << '\n'
       << "psl_seeds = " << c.psl_seeds << '\n'
       << "psl_exclusion_bins = " << c.psl_exclusion_bins << '\n';
    return os.str();
}

std::string config_hash(const ExperimentConfig& config) {
    // Where results go and how many threads make them do not change the results.
    ExperimentConfig canonical = config;
    canonical.output_dir.clear();
    canonical.max_workers = 1;
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : dump_config(canonical)) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace cirad::cli
