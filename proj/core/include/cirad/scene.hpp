#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "cirad/matrix.hpp"

namespace cirad {

enum class RadarId { C1, C2 };

struct RadarNode {
    RadarId id = RadarId::C1;
    double velocity_mps = 0.0;  // along the common motion axis
    std::string code_ref;
};

struct Target {
    double range_to_c1_m = 5.0;
    double range_to_c2_m = 10.0;
    double velocity_mps = 10.0;
    double angle_to_c1_rad = 0.0;
    double angle_to_c2_rad = 0.0;
    cd reflectivity{1.0, 0.0};
};

struct Scene {
    std::array<RadarNode, 2> radars{RadarNode{RadarId::C1, 0.0, "c1"}, RadarNode{RadarId::C2, 0.0, "c2"}};
    std::vector<Target> targets;

    const RadarNode& c1() const { return radars[0]; }
    const RadarNode& c2() const { return radars[1]; }
};

inline constexpr double kLightSpeed = 3e8;

struct WaveformParams {
    double carrier_hz = 77e9;
    double bandwidth_hz = 120e6;
    std::size_t code_length = 256;
    std::size_t pulses_per_cpi = 128;
    double chip_s = 1.0 / 120e6;
    double pulse_s = 256.0 / 120e6;
    double light_speed = kLightSpeed;

    /// Range covered by one fast-time bin on the monostatic path, c / (2B).
    double range_resolution_m() const { return light_speed / (2.0 * bandwidth_hz); }
};

/// Builds consistent waveform parameters: T_c = 1/B and T = N * T_c.
WaveformParams make_waveform(double carrier_hz, double bandwidth_hz, std::size_t code_length,
                             std::size_t pulses_per_cpi, double light_speed = kLightSpeed);

/// Throws ValidationError naming the offending field.
void validate(const WaveformParams& wf);
void validate(const Scene& scene);

struct TargetChannel {
    double radial_velocity_mps = 0.0;  // (v_k - v_1) cos(theta_k1)
    double self_doppler_hz = 0.0;
    double cross_doppler_hz = 0.0;
    std::size_t self_chip_shift = 0;
    std::size_t cross_chip_shift = 0;
    double bistatic_range_m = 0.0;
    double self_gain = 0.0;   // power, g0 / r_k1^4
    double cross_gain = 0.0;  // power, g0 / (r_k1^2 r_k2^2)
    cd self_amplitude;        // alpha_k * sqrt(self_gain) * exp(j phi_self)
    cd cross_amplitude;       // alpha_k * sqrt(cross_gain) * exp(j phi_cross)
};

struct ChannelParams {
    std::vector<TargetChannel> targets;
};

struct PathGains {
    double self_gain = 0.0;
    double cross_gain = 0.0;
};

/// Power path gains with a single shared constant g0.
PathGains path_gains(const Target& target, double g0 = 1.0);

/// ceil(delay / T_c) with tolerance so that exact multiples of the chip do
/// not round up because of floating-point noise.
std::size_t chip_shift(double delay_s, double chip_s);

/// Derives Doppler, chip shifts and gains. Amplitudes carry no absorbed phase;
/// see absorb_phases.
ChannelParams derive_channel(const Scene& scene, const WaveformParams& wf);

/// Returns a copy with an independent uniform phase in [0, 2pi) folded into the
/// self and cross amplitudes of every target.
ChannelParams absorb_phases(const ChannelParams& chan, std::uint64_t seed);

}  // namespace cirad
