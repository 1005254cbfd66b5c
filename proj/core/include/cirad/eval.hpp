#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cirad/rdproc.hpp"
#include "cirad/scene.hpp"

namespace cirad {

struct Detection {
    double range_m = 0.0;
    double velocity_mps = 0.0;
    double magnitude = 0.0;
    std::size_t range_bin = 0;
    std::size_t doppler_bin = 0;
};

struct PeakOptions {
    std::size_t min_separation_bins = 2;
    /// Bins whose range exceeds this are ignored; 0 disables the limit.
    double max_range_m = 0.0;
};

/// Up to k local maxima of |map| in descending magnitude, ties broken by the
/// lower range bin and then the lower Doppler bin. A candidate within
/// min_separation_bins (Chebyshev, both axes wrapping) of an accepted peak
/// is dropped. range_m = bin * c T_c / 2; velocity uses the monostatic
/// Doppler relation at the carrier.
std::vector<Detection> extract_peaks(const RangeDopplerMap& map, std::size_t k, const WaveformParams& wf,
                                     const PeakOptions& opts = {});

/// Number of truth targets matched by a detection within c / (2B) of range
/// to c1. Pairs are assigned greedily from the closest outward and each
/// detection is used at most once.
std::size_t score_hits(std::span<const Detection> detections, std::span<const Target> truth,
                       const WaveformParams& wf);

}  // namespace cirad
