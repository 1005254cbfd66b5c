#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "cirad/coord_protocol.hpp"
#include "cirad/eval.hpp"
#include "cirad/scene.hpp"

namespace cirad {

enum class CodeSet { RandomBinary, Polyphase, OrthogonalPair };

std::string_view to_string(CodeSet set);
CodeSet parse_code_set(std::string_view text);

/// Codes for c1 and c2 drawn from independent substreams of seed.
CpiCodes make_codes(CodeSet set, std::size_t n, std::uint64_t seed);

struct ExperimentConfig {
    WaveformParams waveform;
    Scene scene = default_scene();
    CpiMode mode = CpiMode::Collaborative;
    CodeSet code_set = CodeSet::RandomBinary;
    RunOptions run;
    SideChannel side_channel;
    std::uint64_t master_seed = 1;
    std::size_t max_workers = 1;
    std::string output_dir = "out";

    // SNR sweep.
    std::vector<double> snr_grid = default_snr_grid();
    std::size_t trials = 1000;
    double range_min_m = 10.0;
    double range_max_m = 100.0;
    double alpha2_min = 0.2;
    double alpha2_max = 0.5;
    double target_velocity_mps = 10.0;
    double min_target_separation_m = 0.0;
    PeakOptions peaks;

    // PSL experiment.
    std::size_t psl_seeds = 50;
    std::size_t psl_exclusion_bins = 1;

    static Scene default_scene();
    static std::vector<double> default_snr_grid();
};

void validate(const ExperimentConfig& config);

struct Provenance {
    std::string config_hash;
    std::uint64_t master_seed = 0;
    std::string version;
};

std::string_view library_version();

struct HitRateCurve {
    std::vector<double> snr_points_db;
    std::vector<double> hit_rate_baseline;
    std::vector<double> hit_rate_enhanced;
    std::size_t trials = 0;
    std::uint64_t seed = 0;
};

/// Two random targets per trial (alpha_1 = 1, alpha_2 uniform), baseline and
/// collaborative runs share scene, codes, absorbed phases and noise. The same
/// trial scenes are reused at every SNR point. Trials are spread over
/// max_workers threads and reduced in trial order.
HitRateCurve run_hit_rate_sweep(const ExperimentConfig& config);

/// Scene used by trial `trial` of a sweep.
Scene sweep_trial_scene(const ExperimentConfig& config, std::size_t trial);

struct PslSample {
    std::uint64_t code_seed = 0;
    double baseline_db = 0.0;       // baseline sidelobe over the enhanced peak
    double baseline_self_db = 0.0;  // baseline sidelobe over its own peak
    double enhanced_db = 0.0;
    double peak_ratio = 0.0;        // enhanced over baseline target-bin magnitude
};

struct PslReport {
    double psl_baseline_db = 0.0;  // medians over code seeds
    double psl_baseline_self_db = 0.0;
    double psl_enhanced_db = 0.0;
    double improvement_db = 0.0;   // median of baseline_db - enhanced_db
    double peak_ratio = 0.0;
    std::vector<PslSample> samples;
};

/// Range cut through the target's Doppler bin for both modes on
/// config.scene, one run per code seed, summarized by medians.
PslReport run_psl_experiment(const ExperimentConfig& config);

void write_hit_rate_csv(const HitRateCurve& curve, const Provenance& prov, const std::filesystem::path& path);
void write_psl_csv(const PslReport& report, const Provenance& prov, const std::filesystem::path& path);

}  // namespace cirad
