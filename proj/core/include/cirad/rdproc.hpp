#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "cirad/codebook.hpp"
#include "cirad/matrix.hpp"
#include "cirad/waveform_synth.hpp"

namespace cirad {

/// Fast-time correlation output: range bin x pulse.
struct RangeProfileMatrix {
    CMatrix values;
    std::string reference_code;
};

struct MapPeak {
    std::size_t range_bin = 0;
    std::size_t doppler_bin = 0;
    double magnitude = 0.0;
};

/// Range bin x Doppler bin. magnitude_db is normalized to the map maximum.
struct RangeDopplerMap {
    CMatrix values;
    RMatrix magnitude_db;
    std::vector<MapPeak> peak_list;

    std::size_t range_bins() const { return values.rows(); }
    std::size_t doppler_bins() const { return values.cols(); }
    double magnitude(std::size_t range_bin, std::size_t doppler_bin) const {
        return std::abs(values(range_bin, doppler_bin));
    }
};

/// Number of local maxima kept in RangeDopplerMap::peak_list.
inline constexpr std::size_t kMaxListedPeaks = 32;

/// values[n, m] = sum_p cube[p, m] conj(code[p - n]). Cyclic mode wraps
/// p - n modulo N; linear mode treats the code as zero outside [0, N).
/// Raw sums: a unit-amplitude zero-Doppler echo peaks at exactly N.
RangeProfileMatrix correlate_fast_time(const DataCube& cube, const Code& code,
                                       CorrelationMode mode = CorrelationMode::Cyclic,
                                       std::string reference_code = {});

/// Row-wise unwindowed DFT over pulses:
/// R(n, w) = sum_m r(n, m) exp(-j 2 pi w m / M).
RangeDopplerMap doppler_dft(const RangeProfileMatrix& profile);

/// Wraps raw values into a map, filling magnitude_db and peak_list.
RangeDopplerMap make_map(CMatrix values);

/// |a| + |b| stored as real magnitudes.
RangeDopplerMap fuse_noncoherent(const RangeDopplerMap& a, const RangeDopplerMap& b);

/// 2-D PSL in dB: strongest cell outside a (2*range_exclusion+1) x
/// (2*doppler_exclusion+1) window around the global peak, relative to the peak.
/// Both axes wrap. Returns kPslFloorDb when every sidelobe is zero.
double peak_sidelobe_level(const RangeDopplerMap& map, std::size_t range_exclusion = 1,
                           std::size_t doppler_exclusion = 1);

/// 1-D PSL of a magnitude cut, mainlobe at the cut maximum, cyclic exclusion.
/// With reference > 0 the sidelobe is expressed relative to that value
/// instead of the cut's own peak.
double cut_psl(std::span<const double> cut, std::size_t exclusion = 1, double reference = 0.0);

std::vector<double> range_cut(const RangeDopplerMap& map, std::size_t doppler_bin);
std::vector<double> doppler_cut(const RangeDopplerMap& map, std::size_t range_bin);

/// Doppler bin nearest to f_d T M, wrapped into [0, M).
std::size_t nearest_doppler_bin(double doppler_hz, double pulse_s, std::size_t pulses);

/// Signed Doppler frequency of a bin (bins above M/2 are negative).
double doppler_of_bin(std::size_t bin, double pulse_s, std::size_t pulses);

/// |sin(pi M x) / sin(pi x)| with x = w/M - f_d T; equals M at x = 0.
double dirichlet_magnitude(double omega, std::size_t pulses, double fd_times_t);

/// CSV with columns range_bin, doppler_bin, magnitude_db.
void write_map_csv(const RangeDopplerMap& map, const std::filesystem::path& path);
/// Binary PGM (P5), rows = range bins, dB clipped at floor_db -> black.
void write_map_pgm(const RangeDopplerMap& map, const std::filesystem::path& path, double floor_db = -60.0);
/// CSV with columns range_bin, doppler_bin, magnitude.
void write_peaks_csv(const std::vector<MapPeak>& peaks, const std::filesystem::path& path);

}  // namespace cirad
