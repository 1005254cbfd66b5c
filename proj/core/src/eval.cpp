#include "cirad/eval.hpp"

#include <algorithm>
#include <tuple>

#include "cirad/error.hpp"

namespace cirad {

namespace {

std::size_t cyclic_distance(std::size_t a, std::size_t b, std::size_t period) {
    const std::size_t d = a > b ? a - b : b - a;
    return std::min(d, period - d);
}

}  // namespace

std::vector<Detection> extract_peaks(const RangeDopplerMap& map, std::size_t k, const WaveformParams& wf,
                                     const PeakOptions& opts) {
    if (k == 0) throw ValidationError("extract_peaks: k must be at least 1");
    const std::size_t rows = map.range_bins();
    const std::size_t cols = map.doppler_bins();
    const double bin_m = wf.light_speed * wf.chip_s / 2.0;

    RMatrix mag(rows, cols);
    for (std::size_t c = 0; c < cols; ++c) {
        for (std::size_t r = 0; r < rows; ++r) mag(r, c) = map.magnitude(r, c);
    }
    std::size_t usable_rows = rows;
    if (opts.max_range_m > 0.0) {
        usable_rows = std::min(rows, static_cast<std::size_t>(opts.max_range_m / bin_m) + 1);
    }

    std::vector<MapPeak> candidates;
    for (std::size_t r = 0; r < usable_rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            const double v = mag(r, c);
            if (v <= 0.0) continue;
            bool peak = true;
            for (std::size_t dr : {std::size_t{0}, std::size_t{1}, rows - 1}) {
                for (std::size_t dc : {std::size_t{0}, std::size_t{1}, cols - 1}) {
                    if (dr % rows == 0 && dc % cols == 0) continue;
                    if (mag((r + dr) % rows, (c + dc) % cols) > v) peak = false;
                }
            }
            if (peak) candidates.push_back({r, c, v});
        }
    }
    std::sort(candidates.begin(), candidates.end(), [](const MapPeak& a, const MapPeak& b) {
        return std::tuple(-a.magnitude, a.range_bin, a.doppler_bin) <
               std::tuple(-b.magnitude, b.range_bin, b.doppler_bin);
    });

    std::vector<Detection> out;
    for (const auto& cand : candidates) {
        if (out.size() == k) break;
        const bool suppressed = std::any_of(out.begin(), out.end(), [&](const Detection& d) {
            return cyclic_distance(d.range_bin, cand.range_bin, rows) <= opts.min_separation_bins &&
                   cyclic_distance(d.doppler_bin, cand.doppler_bin, cols) <= opts.min_separation_bins;
        });
        if (suppressed) continue;
        Detection d;
        d.range_bin = cand.range_bin;
        d.doppler_bin = cand.doppler_bin;
        d.magnitude = cand.magnitude;
        d.range_m = static_cast<double>(cand.range_bin) * bin_m;
        d.velocity_mps = doppler_of_bin(cand.doppler_bin, wf.pulse_s, cols) * wf.light_speed / (2.0 * wf.carrier_hz);
        out.push_back(d);
    }
    return out;
}

std::size_t score_hits(std::span<const Detection> detections, std::span<const Target> truth,
                       const WaveformParams& wf) {
    if (truth.empty()) throw ValidationError("score_hits: truth list is empty");
    const double resolution = wf.range_resolution_m();
    const double limit = resolution * (1.0 + 1e-12);

    struct Pair {
        double distance;
        double truth_range;
        double detection_range;
        std::size_t t;
        std::size_t d;
    };
    std::vector<Pair> pairs;
    for (std::size_t t = 0; t < truth.size(); ++t) {
        for (std::size_t d = 0; d < detections.size(); ++d) {
            const double dist = std::abs(detections[d].range_m - truth[t].range_to_c1_m);
            if (dist <= limit) pairs.push_back({dist, truth[t].range_to_c1_m, detections[d].range_m, t, d});
        }
    }
    std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
        return std::tie(a.distance, a.truth_range, a.detection_range) <
               std::tie(b.distance, b.truth_range, b.detection_range);
    });
    std::vector<bool> truth_used(truth.size(), false), det_used(detections.size(), false);
    std::size_t hits = 0;
    for (const auto& p : pairs) {
        if (truth_used[p.t] || det_used[p.d]) continue;
        truth_used[p.t] = det_used[p.d] = true;
        ++hits;
    }
    return hits;
}

}  // namespace cirad
