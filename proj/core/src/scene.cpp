#include "cirad/scene.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "cirad/error.hpp"
#include "cirad/rng.hpp"

namespace cirad {

namespace {

void require(bool ok, const std::string& field, const std::string& constraint) {
    if (!ok) throw ValidationError(field + ": " + constraint);
}

bool finite(double v) { return std::isfinite(v); }

}  // namespace

WaveformParams make_waveform(double carrier_hz, double bandwidth_hz, std::size_t code_length,
                             std::size_t pulses_per_cpi, double light_speed) {
    WaveformParams wf;
    wf.carrier_hz = carrier_hz;
    wf.bandwidth_hz = bandwidth_hz;
    wf.code_length = code_length;
    wf.pulses_per_cpi = pulses_per_cpi;
    wf.light_speed = light_speed;
    wf.chip_s = 1.0 / bandwidth_hz;
    wf.pulse_s = static_cast<double>(code_length) / bandwidth_hz;
    validate(wf);
    return wf;
}

void validate(const WaveformParams& wf) {
    require(finite(wf.carrier_hz) && wf.carrier_hz > 0.0, "carrier_hz", "must be positive and finite");
    require(finite(wf.bandwidth_hz) && wf.bandwidth_hz > 0.0, "bandwidth_hz", "must be positive and finite");
    require(wf.code_length >= 2, "code_length", "must be >= 2");
    require(wf.pulses_per_cpi >= 1, "pulses_per_cpi", "must be >= 1");
    require(finite(wf.light_speed) && wf.light_speed > 0.0, "light_speed", "must be positive and finite");
    require(finite(wf.chip_s) && wf.chip_s > 0.0, "chip_s", "must be positive and finite");
    const double expected = wf.chip_s * static_cast<double>(wf.code_length);
    require(std::abs(expected - wf.pulse_s) <= 1e-12 * wf.pulse_s, "pulse_s",
            "must equal chip_s * code_length");
}

void validate(const Scene& scene) {
    require(finite(scene.c1().velocity_mps), "v1", "must be finite");
    require(finite(scene.c2().velocity_mps), "v2", "must be finite");
    for (std::size_t k = 0; k < scene.targets.size(); ++k) {
        const auto& t = scene.targets[k];
        const std::string prefix = "target[" + std::to_string(k) + "].";
        require(finite(t.range_to_c1_m) && t.range_to_c1_m > 0.0, prefix + "range_to_c1", "must be > 0");
        require(finite(t.range_to_c2_m) && t.range_to_c2_m > 0.0, prefix + "range_to_c2", "must be > 0");
        require(finite(t.velocity_mps), prefix + "velocity", "must be finite");
        require(finite(t.angle_to_c1_rad) && t.angle_to_c1_rad >= 0.0 && t.angle_to_c1_rad < std::numbers::pi,
                prefix + "angle_to_c1", "must lie in [0, pi)");
        require(finite(t.angle_to_c2_rad) && t.angle_to_c2_rad >= 0.0 && t.angle_to_c2_rad < std::numbers::pi,
                prefix + "angle_to_c2", "must lie in [0, pi)");
        require(finite(t.reflectivity.real()) && finite(t.reflectivity.imag()), prefix + "reflectivity",
                "must be finite");
    }
}

PathGains path_gains(const Target& target, double g0) {
    const double r1 = target.range_to_c1_m;
    const double r2 = target.range_to_c2_m;
    if (!(r1 > 0.0) || !(r2 > 0.0)) throw ValidationError("path_gains: ranges must be > 0");
    return {g0 / (r1 * r1 * r1 * r1), g0 / (r1 * r1 * r2 * r2)};
}

std::size_t chip_shift(double delay_s, double chip_s) {
    const double chips = delay_s / chip_s;
    const double nearest = std::round(chips);
    if (std::abs(chips - nearest) <= 1e-9 * std::max(1.0, nearest)) {
        return static_cast<std::size_t>(nearest);
    }
    return static_cast<std::size_t>(std::ceil(chips));
}

ChannelParams derive_channel(const Scene& scene, const WaveformParams& wf) {
    validate(wf);
    validate(scene);
    const double c = wf.light_speed;
    const double v1 = scene.c1().velocity_mps;
    const double v2 = scene.c2().velocity_mps;

    ChannelParams chan;
    chan.targets.reserve(scene.targets.size());
    for (const auto& t : scene.targets) {
        TargetChannel tc;
        const double cos1 = std::cos(t.angle_to_c1_rad);
        tc.radial_velocity_mps = (t.velocity_mps - v1) * cos1;
        tc.self_doppler_hz = 2.0 * tc.radial_velocity_mps * wf.carrier_hz / c;
        tc.cross_doppler_hz = (2.0 * t.velocity_mps - (v1 + v2)) * cos1 * wf.carrier_hz / c;
        tc.bistatic_range_m = t.range_to_c1_m + t.range_to_c2_m;
        // delay / T_c written as range * B / c so integral chip counts stay exact.
        tc.self_chip_shift = chip_shift(2.0 * t.range_to_c1_m * wf.bandwidth_hz / c, 1.0);
        tc.cross_chip_shift = chip_shift(tc.bistatic_range_m * wf.bandwidth_hz / c, 1.0);
        const auto gains = path_gains(t);
        tc.self_gain = gains.self_gain;
        tc.cross_gain = gains.cross_gain;
        tc.self_amplitude = t.reflectivity * std::sqrt(gains.self_gain);
        tc.cross_amplitude = t.reflectivity * std::sqrt(gains.cross_gain);
        chan.targets.push_back(tc);
    }
    return chan;
}

ChannelParams absorb_phases(const ChannelParams& chan, std::uint64_t seed) {
    auto eng = derive_engine(seed, Stream::AbsorbedPhase);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    ChannelParams out = chan;
    for (auto& t : out.targets) {
        t.self_amplitude *= std::polar(1.0, phase(eng));
        t.cross_amplitude *= std::polar(1.0, phase(eng));
    }
    return out;
}

}  // namespace cirad
