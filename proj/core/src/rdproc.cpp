#include "cirad/rdproc.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cirad/error.hpp"
#include "fft.hpp"
#include "io_util.hpp"

namespace cirad {

using detail::FftDirection;
using detail::fft_inplace;

RangeProfileMatrix correlate_fast_time(const DataCube& cube, const Code& code, CorrelationMode mode,
                                       std::string reference_code) {
    const std::size_t n = cube.chips();
    if (code.size() != n) {
        throw ValidationError("correlate_fast_time: code length " + std::to_string(code.size()) +
                              " does not match cube fast-time size " + std::to_string(n));
    }
    const std::size_t len = mode == CorrelationMode::Cyclic ? n : 2 * n;
    std::vector<cd> spectrum(len);
    std::copy(code.samples.begin(), code.samples.end(), spectrum.begin());
    fft_inplace(spectrum, FftDirection::Forward);
    for (auto& z : spectrum) z = std::conj(z);

    RangeProfileMatrix out{CMatrix(n, cube.pulses()), std::move(reference_code)};
    std::vector<cd> work(len);
    const double scale = 1.0 / static_cast<double>(len);
    for (std::size_t m = 0; m < cube.pulses(); ++m) {
        const auto column = cube.samples.col(m);
        std::fill(work.begin(), work.end(), cd{});
        std::copy(column.begin(), column.end(), work.begin());
        fft_inplace(work, FftDirection::Forward);
        for (std::size_t k = 0; k < len; ++k) work[k] *= spectrum[k];
        fft_inplace(work, FftDirection::Inverse);
        auto dst = out.values.col(m);
        for (std::size_t i = 0; i < n; ++i) dst[i] = work[i] * scale;
    }
    return out;
}

namespace {

bool is_local_max(const RMatrix& mag, std::size_t r, std::size_t c) {
    const std::size_t rows = mag.rows();
    const std::size_t cols = mag.cols();
    const double v = mag(r, c);
    // Offsets 0, 1 and period-1 cover the wrapped 3x3 neighbourhood.
    for (std::size_t dr : {std::size_t{0}, std::size_t{1}, rows - 1}) {
        for (std::size_t dc : {std::size_t{0}, std::size_t{1}, cols - 1}) {
            if (dr == 0 && dc == 0) continue;
            if (mag((r + dr) % rows, (c + dc) % cols) > v) return false;
        }
    }
    return true;
}

std::size_t cyclic_distance(std::size_t a, std::size_t b, std::size_t period) {
    const std::size_t d = a > b ? a - b : b - a;
    return std::min(d, period - d);
}

}  // namespace

RangeDopplerMap make_map(CMatrix values) {
    RangeDopplerMap map;
    map.values = std::move(values);
    const std::size_t rows = map.values.rows();
    const std::size_t cols = map.values.cols();
    RMatrix mag(rows, cols);
    double peak = 0.0;
    for (std::size_t i = 0; i < mag.size(); ++i) {
        mag.data()[i] = std::abs(map.values.data()[i]);
        peak = std::max(peak, mag.data()[i]);
    }
    map.magnitude_db = RMatrix(rows, cols, kPslFloorDb);
    if (peak > 0.0) {
        for (std::size_t i = 0; i < mag.size(); ++i) {
            const double v = mag.data()[i];
            if (v > 0.0) map.magnitude_db.data()[i] = std::max(kPslFloorDb, 20.0 * std::log10(v / peak));
        }
    }
    if (rows == 0 || cols == 0) return map;
    for (std::size_t c = 0; c < cols; ++c) {
        for (std::size_t r = 0; r < rows; ++r) {
            if (mag(r, c) > 0.0 && is_local_max(mag, r, c)) map.peak_list.push_back({r, c, mag(r, c)});
        }
    }
    std::sort(map.peak_list.begin(), map.peak_list.end(), [](const MapPeak& a, const MapPeak& b) {
        if (a.magnitude != b.magnitude) return a.magnitude > b.magnitude;
        if (a.range_bin != b.range_bin) return a.range_bin < b.range_bin;
        return a.doppler_bin < b.doppler_bin;
    });
    if (map.peak_list.size() > kMaxListedPeaks) map.peak_list.resize(kMaxListedPeaks);
    return map;
}

RangeDopplerMap doppler_dft(const RangeProfileMatrix& profile) {
    const std::size_t rows = profile.values.rows();
    const std::size_t pulses = profile.values.cols();
    CMatrix out(rows, pulses);
    std::vector<cd> row(pulses);
    for (std::size_t n = 0; n < rows; ++n) {
        for (std::size_t m = 0; m < pulses; ++m) row[m] = profile.values(n, m);
        fft_inplace(row, FftDirection::Forward);
        for (std::size_t w = 0; w < pulses; ++w) out(n, w) = row[w];
    }
    return make_map(std::move(out));
}

RangeDopplerMap fuse_noncoherent(const RangeDopplerMap& a, const RangeDopplerMap& b) {
    if (a.range_bins() != b.range_bins() || a.doppler_bins() != b.doppler_bins()) {
        throw ValidationError("fuse_noncoherent: map dimensions differ");
    }
    CMatrix fused(a.range_bins(), a.doppler_bins());
    auto dst = fused.data();
    auto va = a.values.data();
    auto vb = b.values.data();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = cd{std::abs(va[i]) + std::abs(vb[i]), 0.0};
    return make_map(std::move(fused));
}

double peak_sidelobe_level(const RangeDopplerMap& map, std::size_t range_exclusion, std::size_t doppler_exclusion) {
    const std::size_t rows = map.range_bins();
    const std::size_t cols = map.doppler_bins();
    if (rows == 0 || cols == 0) throw ValidationError("peak_sidelobe_level: empty map");
    if (2 * range_exclusion + 1 >= rows && 2 * doppler_exclusion + 1 >= cols) {
        throw ValidationError("peak_sidelobe_level: exclusion window covers the entire map");
    }
    std::size_t pr = 0, pc = 0;
    double peak = -1.0;
    for (std::size_t c = 0; c < cols; ++c) {
        for (std::size_t r = 0; r < rows; ++r) {
            if (map.magnitude(r, c) > peak) {
                peak = map.magnitude(r, c);
                pr = r;
                pc = c;
            }
        }
    }
    double sidelobe = 0.0;
    for (std::size_t c = 0; c < cols; ++c) {
        for (std::size_t r = 0; r < rows; ++r) {
            if (cyclic_distance(r, pr, rows) <= range_exclusion && cyclic_distance(c, pc, cols) <= doppler_exclusion) {
                continue;
            }
            sidelobe = std::max(sidelobe, map.magnitude(r, c));
        }
    }
    if (!(peak > 0.0) || sidelobe == 0.0) return kPslFloorDb;
    return std::min(0.0, 20.0 * std::log10(sidelobe / peak));
}

double cut_psl(std::span<const double> cut, std::size_t exclusion, double reference) {
    const std::size_t n = cut.size();
    if (n == 0) throw ValidationError("cut_psl: empty cut");
    if (2 * exclusion + 1 >= n) throw ValidationError("cut_psl: exclusion window covers the entire cut");
    const auto peak_it = std::max_element(cut.begin(), cut.end());
    const auto peak_idx = static_cast<std::size_t>(peak_it - cut.begin());
    double sidelobe = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (cyclic_distance(i, peak_idx, n) > exclusion) sidelobe = std::max(sidelobe, cut[i]);
    }
    const double denom = reference > 0.0 ? reference : *peak_it;
    if (!(denom > 0.0) || sidelobe == 0.0) return kPslFloorDb;
    return std::max(kPslFloorDb, 20.0 * std::log10(sidelobe / denom));
}

std::vector<double> range_cut(const RangeDopplerMap& map, std::size_t doppler_bin) {
    if (doppler_bin >= map.doppler_bins()) throw ValidationError("range_cut: Doppler bin out of range");
    std::vector<double> cut(map.range_bins());
    for (std::size_t r = 0; r < cut.size(); ++r) cut[r] = map.magnitude(r, doppler_bin);
    return cut;
}

std::vector<double> doppler_cut(const RangeDopplerMap& map, std::size_t range_bin) {
    if (range_bin >= map.range_bins()) throw ValidationError("doppler_cut: range bin out of range");
    std::vector<double> cut(map.doppler_bins());
    for (std::size_t c = 0; c < cut.size(); ++c) cut[c] = map.magnitude(range_bin, c);
    return cut;
}

std::size_t nearest_doppler_bin(double doppler_hz, double pulse_s, std::size_t pulses) {
    const auto m = static_cast<long long>(pulses);
    const auto bin = static_cast<long long>(std::llround(doppler_hz * pulse_s * static_cast<double>(pulses)));
    return static_cast<std::size_t>(((bin % m) + m) % m);
}

double doppler_of_bin(std::size_t bin, double pulse_s, std::size_t pulses) {
    auto signed_bin = static_cast<double>(bin);
    if (2 * bin > pulses) signed_bin -= static_cast<double>(pulses);
    return signed_bin / (static_cast<double>(pulses) * pulse_s);
}

double dirichlet_magnitude(double omega, std::size_t pulses, double fd_times_t) {
    const double m = static_cast<double>(pulses);
    const double x = omega / m - fd_times_t;
    const double den = std::sin(std::numbers::pi * x);
    if (std::abs(den) < 1e-15) return m;
    return std::abs(std::sin(std::numbers::pi * m * x) / den);
}

void write_map_csv(const RangeDopplerMap& map, const std::filesystem::path& path) {
    auto out = detail::open_output(path);
    out << "range_bin,doppler_bin,magnitude_db\n";
    for (std::size_t r = 0; r < map.range_bins(); ++r) {
        for (std::size_t c = 0; c < map.doppler_bins(); ++c) {
            out << r << ',' << c << ',' << detail::fmt_double(map.magnitude_db(r, c)) << '\n';
        }
    }
    if (!out) throw RuntimeError("write failed for '" + path.string() + "'");
}

void write_map_pgm(const RangeDopplerMap& map, const std::filesystem::path& path, double floor_db) {
    if (!(floor_db < 0.0)) throw ValidationError("heatmap floor must be negative dB");
    auto out = detail::open_output(path);
    out << "P5\n" << map.doppler_bins() << ' ' << map.range_bins() << "\n255\n";
    for (std::size_t r = 0; r < map.range_bins(); ++r) {
        for (std::size_t c = 0; c < map.doppler_bins(); ++c) {
            const double db = std::clamp(map.magnitude_db(r, c), floor_db, 0.0);
            const auto level = static_cast<unsigned char>(std::lround(255.0 * (1.0 - db / floor_db)));
            out.put(static_cast<char>(level));
        }
    }
    if (!out) throw RuntimeError("write failed for '" + path.string() + "'");
}

void write_peaks_csv(const std::vector<MapPeak>& peaks, const std::filesystem::path& path) {
    auto out = detail::open_output(path);
    out << "range_bin,doppler_bin,magnitude\n";
    for (const auto& p : peaks) {
        out << p.range_bin << ',' << p.doppler_bin << ',' << detail::fmt_double(p.magnitude) << '\n';
    }
    if (!out) throw RuntimeError("write failed for '" + path.string() + "'");
}

}  // namespace cirad
