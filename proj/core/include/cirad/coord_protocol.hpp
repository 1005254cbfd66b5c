#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cirad/ci_align.hpp"
#include "cirad/codebook.hpp"
#include "cirad/rdproc.hpp"
#include "cirad/scene.hpp"
#include "cirad/waveform_synth.hpp"
#include "cirad/weight.hpp"

namespace cirad {

enum class CpiMode { Noncooperative, Collaborative };
enum class SolverChoice { Auto, ClosedForm, Iterative };

std::string_view to_string(CpiMode mode);
std::string_view to_string(SolverChoice solver);
CpiMode parse_cpi_mode(std::string_view text);
SolverChoice parse_solver_choice(std::string_view text);

/// What each radar puts on air in one pulse. Codes are "c1", "c2" or "W*c2".
struct PulseAssignment {
    std::optional<std::string> c1_transmits;
    std::optional<std::string> c2_transmits;
    std::string weight_status;  // none, pending, applied, dropped
};

struct CpiSchedule {
    std::vector<PulseAssignment> pulse_assignments;
    std::size_t coordination_pulses = 2;
};

struct SideChannel {
    std::optional<int> quantization_bits;  // per real component, 2..32
    double drop_probability = 0.0;
    std::size_t latency_pulses = 0;
};

void validate(const SideChannel& channel);

/// Offsets applied to the scene the solver believes in, modelling channel
/// knowledge carried over from the previous CPI.
struct ChannelStaleness {
    double range_offset_m = 0.0;
    double velocity_offset_mps = 0.0;

    bool active() const { return range_offset_m != 0.0 || velocity_offset_mps != 0.0; }
};

struct RunOptions {
    double snr_db = 10.0;
    SolverChoice solver = SolverChoice::Auto;
    IterativeOptions iterative;
    ChannelStaleness staleness;
    bool cross_path_enabled = true;
    /// Per-sample power the SNR refers to; defaults to max_k |alpha_hat_k|^2.
    std::optional<double> noise_reference;
};

struct CpiCodes {
    Code c1;
    Code c2;
};

struct CpiResult {
    DataCube cube_c1;                        // processed pulses only
    std::optional<WeightMatrix> weight;      // as received by c2 after the side channel
    std::optional<WeightMatrix> solved;      // as computed at c1
    CpiSchedule schedule;
    ChannelParams channel;                   // ground truth, absorbed phases included
    bool exchange_dropped = false;
    double noise_variance = 0.0;
    std::vector<std::string> trace;          // one line per pulse

    std::size_t effective_pulses() const { return cube_c1.pulses(); }
};

/// Non-cooperative: both radars transmit their own codes on all M pulses.
/// Collaborative: pulse 1 c1 sends c2, pulse 2 c2 sends c2, c1 solves for W,
/// W crosses the side channel, pulses 3..M carry c1 and W*c2 together. The
/// returned cube holds pulses 3..M only. Deterministic in seed.
CpiResult run_cpi(const Scene& scene, const WaveformParams& wf, CpiMode mode, const SideChannel& channel,
                  const CpiCodes& codes, std::uint64_t seed, const RunOptions& options = {});

CpiSchedule make_schedule(CpiMode mode, std::size_t pulses, std::size_t latency_pulses = 0,
                          bool dropped = false);

/// Rounds each real component to 2^(bits-1)-1 levels on [-1, 1], then puts
/// every entry back on the unit circle.
WeightMatrix quantize_weight(const WeightMatrix& weight, int bits);

/// Bytes needed to send W: N * 2 * bits / 8 for a diagonal W (32 bits when
/// unquantized), N * N * 2 * bits / 8 for a full one.
std::size_t channel_payload_size(const WeightMatrix& weight, const SideChannel& channel);

/// Bytes to share the raw cube instead: N * M * 2 * 4.
std::size_t raw_cube_bytes(std::size_t chips, std::size_t pulses);

struct ProcessedCpi {
    RangeDopplerMap self_map;                  // correlation with c1
    std::optional<RangeDopplerMap> cross_map;  // correlation with c2, collaborative only
    RangeDopplerMap detection_map;             // self_map, or |self| + |cross|
};

ProcessedCpi process_cpi(const CpiResult& result, const CpiCodes& codes, CpiMode mode);

}  // namespace cirad
