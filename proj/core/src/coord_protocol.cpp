#include "cirad/coord_protocol.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "cirad/error.hpp"
#include "cirad/rng.hpp"

namespace cirad {

std::string_view to_string(CpiMode mode) {
    return mode == CpiMode::Noncooperative ? "noncooperative" : "collaborative";
}

std::string_view to_string(SolverChoice solver) {
    switch (solver) {
        case SolverChoice::Auto: return "auto";
        case SolverChoice::ClosedForm: return "closed-form";
        case SolverChoice::Iterative: return "iterative";
    }
    return "auto";
}

CpiMode parse_cpi_mode(std::string_view text) {
    if (text == "noncooperative") return CpiMode::Noncooperative;
    if (text == "collaborative") return CpiMode::Collaborative;
    throw ValidationError("mode: expected noncooperative or collaborative, got '" + std::string(text) + "'");
}

SolverChoice parse_solver_choice(std::string_view text) {
    if (text == "auto") return SolverChoice::Auto;
    if (text == "closed-form") return SolverChoice::ClosedForm;
    if (text == "iterative") return SolverChoice::Iterative;
    throw ValidationError("solver: expected auto, closed-form or iterative, got '" + std::string(text) + "'");
}

void validate(const SideChannel& channel) {
    if (!(channel.drop_probability >= 0.0 && channel.drop_probability <= 1.0)) {
        throw ValidationError("drop_probability must lie in [0, 1]");
    }
    if (channel.quantization_bits && (*channel.quantization_bits < 2 || *channel.quantization_bits > 32)) {
        throw ValidationError("quantization_bits must lie in [2, 32]");
    }
}

CpiSchedule make_schedule(CpiMode mode, std::size_t pulses, std::size_t latency_pulses, bool dropped) {
    CpiSchedule schedule;
    schedule.pulse_assignments.resize(pulses);
    if (mode == CpiMode::Noncooperative) {
        schedule.coordination_pulses = 0;
        for (auto& p : schedule.pulse_assignments) {
            p.c1_transmits = "c1";
            p.c2_transmits = "c2";
            p.weight_status = "none";
        }
        return schedule;
    }
    if (pulses < 3) throw ValidationError("collaborative mode needs at least 3 pulses per CPI");
    schedule.coordination_pulses = 2;
    schedule.pulse_assignments[0] = {"c2", std::nullopt, "none"};
    schedule.pulse_assignments[1] = {std::nullopt, "c2", "none"};
    for (std::size_t m = 2; m < pulses; ++m) {
        auto& p = schedule.pulse_assignments[m];
        p.c1_transmits = "c1";
        if (dropped) {
            p.c2_transmits = "c2";
            p.weight_status = "dropped";
        } else if (m - 2 < latency_pulses) {
            p.c2_transmits = "c2";
            p.weight_status = "pending";
        } else {
            p.c2_transmits = "W*c2";
            p.weight_status = "applied";
        }
    }
    return schedule;
}

WeightMatrix quantize_weight(const WeightMatrix& weight, int bits) {
    if (bits < 2 || bits > 32) throw ValidationError("quantization_bits must lie in [2, 32]");
    const double levels = std::ldexp(1.0, bits - 1) - 1.0;
    auto q = [levels](double x) { return std::round(std::clamp(x, -1.0, 1.0) * levels) / levels; };
    auto snap = [&](cd z) {
        const cd r{q(z.real()), q(z.imag())};
        const double mag = std::abs(r);
        return mag > 0.0 ? r / mag : cd{1.0, 0.0};
    };
    WeightMatrix out = weight;
    if (out.kind == WeightKind::Diagonal) {
        for (auto& z : out.diagonal) z = snap(z);
    } else {
        for (auto& z : out.full.data()) z = snap(z);
    }
    return out;
}

std::size_t channel_payload_size(const WeightMatrix& weight, const SideChannel& channel) {
    const std::size_t bits = channel.quantization_bits ? static_cast<std::size_t>(*channel.quantization_bits) : 32;
    const std::size_t n = weight.size();
    const std::size_t entries = weight.kind == WeightKind::Diagonal ? n : n * n;
    return (entries * 2 * bits + 7) / 8;
}

std::size_t raw_cube_bytes(std::size_t chips, std::size_t pulses) { return chips * pulses * 2 * 4; }

namespace {

CMatrix columns(const CMatrix& m, std::size_t first, std::size_t count) {
    CMatrix out(m.rows(), count);
    for (std::size_t c = 0; c < count; ++c) {
        auto src = m.col(first + c);
        std::copy(src.begin(), src.end(), out.col(c).begin());
    }
    return out;
}

void add_into(CMatrix& dst, const CMatrix& src) {
    auto d = dst.data();
    auto s = src.data();
    for (std::size_t i = 0; i < d.size(); ++i) d[i] += s[i];
}

Scene stale_scene(Scene scene, const ChannelStaleness& staleness) {
    for (auto& t : scene.targets) {
        t.range_to_c1_m += staleness.range_offset_m;
        t.range_to_c2_m += staleness.range_offset_m;
        t.velocity_mps += staleness.velocity_offset_mps;
    }
    return scene;
}

std::vector<std::string> trace_lines(const CpiSchedule& schedule) {
    std::vector<std::string> lines;
    lines.reserve(schedule.pulse_assignments.size());
    for (std::size_t m = 0; m < schedule.pulse_assignments.size(); ++m) {
        const auto& p = schedule.pulse_assignments[m];
        std::ostringstream os;
        os << "pulse=" << m + 1 << " c1=" << p.c1_transmits.value_or("-") << " c2=" << p.c2_transmits.value_or("-")
           << " weight=" << p.weight_status;
        lines.push_back(os.str());
    }
    return lines;
}

}  // namespace

CpiResult run_cpi(const Scene& scene, const WaveformParams& wf, CpiMode mode, const SideChannel& channel,
                  const CpiCodes& codes, std::uint64_t seed, const RunOptions& options) {
    validate(wf);
    validate(scene);
    validate(channel);
    const std::size_t n = wf.code_length;
    const std::size_t pulses = wf.pulses_per_cpi;
    if (codes.c1.size() != n || codes.c2.size() != n) throw ValidationError("code length does not match N");
    if (mode == CpiMode::Collaborative) {
        if (pulses < 3) throw ValidationError("collaborative mode needs pulses_per_cpi >= 3");
        if (!options.cross_path_enabled) throw ValidationError("collaborative mode needs the cross path");
    }

    CpiResult result;
    result.channel = absorb_phases(derive_channel(scene, wf), seed);
    const auto& chan = result.channel;

    double reference = 0.0;
    if (options.noise_reference) {
        reference = *options.noise_reference;
    } else {
        for (const auto& t : chan.targets) reference = std::max(reference, std::norm(t.self_amplitude));
    }
    result.noise_variance = noise_variance_for_snr(reference, options.snr_db);
    const CMatrix noise = complex_noise(n, pulses, result.noise_variance, seed);

    if (mode == CpiMode::Noncooperative) {
        DataCube cube = synthesize_self_echo(codes.c1, chan, wf);
        if (options.cross_path_enabled) cube = combine(cube, synthesize_cross_echo(codes.c2, std::nullopt, chan, wf));
        add_into(cube.samples, noise);
        cube.components.noise = noise;
        result.cube_c1 = std::move(cube);
        result.schedule = make_schedule(mode, pulses);
        result.trace = trace_lines(result.schedule);
        return result;
    }

    // Pulses 1 and 2: coordination captures at c1.
    const CMatrix coord_noise =
        complex_noise(n, 2, result.noise_variance, derive_seed(seed, Stream::CoordinationNoise));
    std::vector<cd> self_obs(n), cross_obs(n);
    {
        const DataCube s = synthesize_self_echo(codes.c2, chan, wf, {0, 1});
        const DataCube x = synthesize_cross_echo(codes.c2, std::nullopt, chan, wf, {1, 1});
        for (std::size_t i = 0; i < n; ++i) {
            self_obs[i] = s.samples(i, 0) + coord_noise(i, 0);
            cross_obs[i] = x.samples(i, 0) + coord_noise(i, 1);
        }
    }

    const ChannelParams knowledge = options.staleness.active()
                                        ? absorb_phases(derive_channel(stale_scene(scene, options.staleness), wf), seed)
                                        : chan;
    const auto problem =
        make_problem(std::move(self_obs), std::move(cross_obs), codes.c2, cross_paths_from_channel(knowledge, wf, 1));
    result.solved = options.solver == SolverChoice::Iterative
                        ? solve_alignment_iterative(problem, options.iterative)
                        : solve_alignment_closed_form(problem);

    // Side channel: the drop draw is always taken so later draws never shift.
    auto eng = derive_engine(seed, Stream::SideChannel);
    const double draw = std::uniform_real_distribution<double>(0.0, 1.0)(eng);
    result.exchange_dropped = channel.drop_probability > 0.0 && draw < channel.drop_probability;
    if (result.exchange_dropped) {
        result.weight = WeightMatrix::identity(n);
    } else if (channel.quantization_bits) {
        result.weight = quantize_weight(*result.solved, *channel.quantization_bits);
    } else {
        result.weight = result.solved;
    }

    const std::size_t active = pulses - 2;
    const std::size_t pending = result.exchange_dropped ? 0 : std::min(channel.latency_pulses, active);
    const PulseWindow window{2, active};
    DataCube cube = synthesize_self_echo(codes.c1, chan, wf, window);
    DataCube cross = synthesize_cross_echo(codes.c2, result.weight, chan, wf, window);
    if (pending > 0) {
        const DataCube plain = synthesize_cross_echo(codes.c2, std::nullopt, chan, wf, window);
        for (std::size_t m = 0; m < pending; ++m) {
            auto src = plain.samples.col(m);
            std::copy(src.begin(), src.end(), cross.samples.col(m).begin());
        }
        cross.components.cross = cross.samples;
    }
    cube = combine(cube, cross);
    CMatrix data_noise = columns(noise, 2, active);
    add_into(cube.samples, data_noise);
    cube.components.noise = std::move(data_noise);
    result.cube_c1 = std::move(cube);

    result.schedule = make_schedule(mode, pulses, pending, result.exchange_dropped);
    result.trace = trace_lines(result.schedule);
    return result;
}

ProcessedCpi process_cpi(const CpiResult& result, const CpiCodes& codes, CpiMode mode) {
    ProcessedCpi out;
    out.self_map = doppler_dft(correlate_fast_time(result.cube_c1, codes.c1, CorrelationMode::Cyclic, "c1"));
    if (mode == CpiMode::Collaborative) {
        out.cross_map = doppler_dft(correlate_fast_time(result.cube_c1, codes.c2, CorrelationMode::Cyclic, "c2"));
        out.detection_map = fuse_noncoherent(out.self_map, *out.cross_map);
    } else {
        out.detection_map = out.self_map;
    }
    return out;
}

}  // namespace cirad
