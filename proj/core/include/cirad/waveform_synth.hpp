#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

#include "cirad/codebook.hpp"
#include "cirad/matrix.hpp"
#include "cirad/scene.hpp"
#include "cirad/weight.hpp"

namespace cirad {

/// Half-open range of absolute pulse indices [first, first + count) in a CPI.
struct PulseWindow {
    std::size_t first = 0;
    std::size_t count = 0;
};

struct CubeComponents {
    std::optional<CMatrix> self;
    std::optional<CMatrix> cross;
    std::optional<CMatrix> noise;
};

/// N x M baseband samples at one receiver: rows are chips, columns pulses.
struct DataCube {
    CMatrix samples;
    RadarId receiver = RadarId::C1;
    std::size_t first_pulse = 0;
    CubeComponents components;

    std::size_t chips() const { return samples.rows(); }
    std::size_t pulses() const { return samples.cols(); }
};

/// y[n, m] = sum_k a_k c[n - s_k] exp(-j2pi f_k n T_c) exp(+j2pi f_k m T)
/// with self-path shifts, Doppler and amplitudes. Shifts wrap cyclically.
/// An empty window means all pulses of the CPI.
DataCube synthesize_self_echo(const Code& code, const ChannelParams& chan, const WaveformParams& wf,
                              PulseWindow window = {});

/// Cross-path echo from radar c2. With a weight, c2 transmits W c2 and each
/// target sees that weighted code delayed by its own cross shift.
DataCube synthesize_cross_echo(const Code& code, const std::optional<WeightMatrix>& weight,
                               const ChannelParams& chan, const WaveformParams& wf, PulseWindow window = {});

/// Elementwise sum; components are carried along.
DataCube combine(const DataCube& a, const DataCube& b);

/// Circularly-symmetric white Gaussian samples with E|z|^2 = variance,
/// generated column by column from the seed.
CMatrix complex_noise(std::size_t rows, std::size_t cols, double variance, std::uint64_t seed);

/// Noise variance for a target per-sample SNR against a reference power.
double noise_variance_for_snr(double reference_power, double snr_db);

/// Peak per-sample power of the self component if present, else of the samples.
double reference_power(const DataCube& cube);

/// Adds white noise so that reference / variance = 10^(snr_db/10). The
/// reference defaults to reference_power(cube). Throws on an all-zero cube.
DataCube add_noise(const DataCube& cube, double snr_db, std::uint64_t seed,
                   std::optional<double> reference = std::nullopt);

/// Debug export: columns n, m, re, im.
void write_cube_csv(const DataCube& cube, const std::filesystem::path& path);

}  // namespace cirad
