#include "cirad/waveform_synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <span>

#include "cirad/error.hpp"
#include "cirad/rng.hpp"
#include "io_util.hpp"

namespace cirad {

namespace {

PulseWindow resolve(PulseWindow window, const WaveformParams& wf) {
    if (window.count == 0) return {0, wf.pulses_per_cpi};
    return window;
}

enum class Path { Self, Cross };

// Accumulates every target's contribution into a fresh N x count matrix.
CMatrix synthesize(std::span<const cd> tx, const ChannelParams& chan, const WaveformParams& wf, PulseWindow window,
                   Path path) {
    const std::size_t n = wf.code_length;
    CMatrix out(n, window.count);
    std::vector<cd> base(n);
    std::vector<cd> slow(window.count);
    const double two_pi = 2.0 * std::numbers::pi;
    for (const auto& t : chan.targets) {
        const bool self = path == Path::Self;
        const double fd = self ? t.self_doppler_hz : t.cross_doppler_hz;
        const std::size_t shift = (self ? t.self_chip_shift : t.cross_chip_shift) % n;
        const cd amp = self ? t.self_amplitude : t.cross_amplitude;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t src = (i + n - shift) % n;
            const cd fast = std::polar(1.0, -two_pi * fd * static_cast<double>(i) * wf.chip_s);
            base[i] = amp * tx[src] * fast;
        }
        for (std::size_t m = 0; m < window.count; ++m) {
            const double pulse = static_cast<double>(window.first + m);
            slow[m] = std::polar(1.0, two_pi * fd * pulse * wf.pulse_s);
        }
        for (std::size_t m = 0; m < window.count; ++m) {
            auto col = out.col(m);
            for (std::size_t i = 0; i < n; ++i) col[i] += base[i] * slow[m];
        }
    }
    return out;
}

void check_code(const Code& code, const WaveformParams& wf) {
    validate(wf);
    if (code.size() != wf.code_length) {
        throw ValidationError("code length " + std::to_string(code.size()) + " does not match N = " +
                              std::to_string(wf.code_length));
    }
}

}  // namespace

DataCube synthesize_self_echo(const Code& code, const ChannelParams& chan, const WaveformParams& wf,
                              PulseWindow window) {
    check_code(code, wf);
    window = resolve(window, wf);
    DataCube cube;
    cube.first_pulse = window.first;
    cube.samples = synthesize(code.samples, chan, wf, window, Path::Self);
    cube.components.self = cube.samples;
    return cube;
}

DataCube synthesize_cross_echo(const Code& code, const std::optional<WeightMatrix>& weight,
                               const ChannelParams& chan, const WaveformParams& wf, PulseWindow window) {
    check_code(code, wf);
    window = resolve(window, wf);
    DataCube cube;
    cube.first_pulse = window.first;
    if (weight) {
        const Code tx = apply_weight(*weight, code);
        cube.samples = synthesize(tx.samples, chan, wf, window, Path::Cross);
    } else {
        cube.samples = synthesize(code.samples, chan, wf, window, Path::Cross);
    }
    cube.components.cross = cube.samples;
    return cube;
}

namespace {

std::optional<CMatrix> sum_opt(const std::optional<CMatrix>& a, const std::optional<CMatrix>& b) {
    if (!a) return b;
    if (!b) return a;
    CMatrix out = *a;
    auto dst = out.data();
    auto src = b->data();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
    return out;
}

}  // namespace

DataCube combine(const DataCube& a, const DataCube& b) {
    if (a.chips() != b.chips() || a.pulses() != b.pulses()) throw ValidationError("cube dimension mismatch");
    DataCube out = a;
    auto dst = out.samples.data();
    auto src = b.samples.data();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
    out.components.self = sum_opt(a.components.self, b.components.self);
    out.components.cross = sum_opt(a.components.cross, b.components.cross);
    out.components.noise = sum_opt(a.components.noise, b.components.noise);
    return out;
}

CMatrix complex_noise(std::size_t rows, std::size_t cols, double variance, std::uint64_t seed) {
    auto eng = derive_engine(seed, Stream::Noise);
    std::normal_distribution<double> gauss(0.0, std::sqrt(variance / 2.0));
    CMatrix out(rows, cols);
    for (auto& z : out.data()) {
        const double re = gauss(eng);
        const double im = gauss(eng);
        z = {re, im};
    }
    return out;
}

double noise_variance_for_snr(double reference, double snr_db) {
    if (!std::isfinite(snr_db)) throw ValidationError("snr_db must be finite");
    if (!(reference > 0.0)) throw ValidationError("SNR is undefined for an all-zero signal");
    return reference / std::pow(10.0, snr_db / 10.0);
}

double reference_power(const DataCube& cube) {
    const CMatrix& m = cube.components.self ? *cube.components.self : cube.samples;
    double peak = 0.0;
    for (const auto& z : m.data()) peak = std::max(peak, std::norm(z));
    return peak;
}

DataCube add_noise(const DataCube& cube, double snr_db, std::uint64_t seed, std::optional<double> reference) {
    if (cube.samples.empty()) throw ValidationError("add_noise: empty cube");
    const double variance = noise_variance_for_snr(reference.value_or(reference_power(cube)), snr_db);
    DataCube out = cube;
    CMatrix noise = complex_noise(cube.chips(), cube.pulses(), variance, seed);
    auto dst = out.samples.data();
    auto src = noise.data();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
    out.components.noise = sum_opt(cube.components.noise, std::move(noise));
    return out;
}

void write_cube_csv(const DataCube& cube, const std::filesystem::path& path) {
    auto out = detail::open_output(path);
    out << "n,m,re,im\n";
    for (std::size_t m = 0; m < cube.pulses(); ++m) {
        for (std::size_t n = 0; n < cube.chips(); ++n) {
            const cd z = cube.samples(n, m);
            out << n << ',' << cube.first_pulse + m << ',' << detail::fmt_double(z.real()) << ','
                << detail::fmt_double(z.imag()) << '\n';
        }
    }
    if (!out) throw RuntimeError("write failed for '" + path.string() + "'");
}

}  // namespace cirad
