#include <gtest/gtest.h>

#include <algorithm>

#include "cirad/coord_protocol.hpp"
#include "cirad/error.hpp"
#include "cirad/eval.hpp"
#include "cirad/experiment.hpp"

using namespace cirad;

namespace {

RangeDopplerMap map_from(const RMatrix& mag) {
    CMatrix v(mag.rows(), mag.cols());
    for (std::size_t c = 0; c < mag.cols(); ++c) {
        for (std::size_t r = 0; r < mag.rows(); ++r) v(r, c) = mag(r, c);
    }
    return make_map(std::move(v));
}

Detection at(double range_m) {
    Detection d;
    d.range_m = range_m;
    return d;
}

Target truth(double range_m) {
    Target t;
    t.range_to_c1_m = range_m;
    return t;
}

}  // namespace

TEST(Eval, SingleDelta) {
    const WaveformParams wf;
    RMatrix m(32, 16, 0.0);
    m(4, 1) = 3.0;
    const auto dets = extract_peaks(map_from(m), 3, wf);
    ASSERT_EQ(dets.size(), 1u);
    EXPECT_EQ(dets[0].range_bin, 4u);
    EXPECT_EQ(dets[0].doppler_bin, 1u);
    EXPECT_DOUBLE_EQ(dets[0].range_m, 5.0);
    EXPECT_DOUBLE_EQ(dets[0].magnitude, 3.0);
    EXPECT_NEAR(dets[0].velocity_mps, doppler_of_bin(1, wf.pulse_s, 16) * 3e8 / (2 * 77e9), 1e-12);
    EXPECT_THROW(extract_peaks(map_from(m), 0, wf), ValidationError);
}

TEST(Eval, EqualPeaksBreakTiesByRange) {
    const WaveformParams wf;
    RMatrix m(32, 16, 0.0);
    m(20, 3) = 2.0;
    m(7, 9) = 2.0;
    const auto dets = extract_peaks(map_from(m), 2, wf);
    ASSERT_EQ(dets.size(), 2u);
    EXPECT_EQ(dets[0].range_bin, 7u);
    EXPECT_EQ(dets[1].range_bin, 20u);
}

TEST(Eval, NeighborsAreSuppressed) {
    const WaveformParams wf;
    RMatrix m(32, 16, 0.0);
    m(10, 5) = 3.0;
    m(12, 7) = 2.0;  // a separate local max, but within 2 bins
    m(20, 5) = 1.0;
    PeakOptions opts;
    opts.min_separation_bins = 2;
    const auto dets = extract_peaks(map_from(m), 2, wf, opts);
    ASSERT_EQ(dets.size(), 2u);
    EXPECT_EQ(dets[1].range_bin, 20u);
    opts.min_separation_bins = 1;
    EXPECT_EQ(extract_peaks(map_from(m), 2, wf, opts)[1].range_bin, 12u);
    opts.max_range_m = 15.0;
    const auto near = extract_peaks(map_from(m), 3, wf, opts);
    EXPECT_TRUE(std::all_of(near.begin(), near.end(), [](const Detection& d) { return d.range_m <= 15.0; }));
}

TEST(Eval, TwoTargetSceneAtHighSnr) {
    const WaveformParams wf;
    Scene s;
    s.targets = {Target{}, truth(8.0)};
    s.targets[1].range_to_c2_m = 12.0;
    const auto codes = make_codes(CodeSet::RandomBinary, 256, 5);
    RunOptions opts;
    opts.snr_db = 300.0;
    const auto r = run_cpi(s, wf, CpiMode::Collaborative, {}, codes, 5, opts);
    const auto map = process_cpi(r, codes, CpiMode::Collaborative).detection_map;
    const auto dets = extract_peaks(map, 2, wf);
    ASSERT_EQ(dets.size(), 2u);
    for (const auto& t : s.targets) {
        const bool found = std::any_of(dets.begin(), dets.end(), [&](const Detection& d) {
            return std::abs(d.range_m - t.range_to_c1_m) <= 1.25;
        });
        EXPECT_TRUE(found) << "target at " << t.range_to_c1_m;
    }
    EXPECT_EQ(score_hits(dets, s.targets, wf), 2u);
}

TEST(Eval, ScoreHits) {
    const WaveformParams wf;
    const std::vector<Target> one{truth(40.0)};
    const std::vector<Detection> exact{at(40.0)};
    const std::vector<Detection> off{at(41.3)};
    EXPECT_EQ(score_hits(exact, one, wf), 1u);
    EXPECT_EQ(score_hits(off, one, wf), 0u);
    EXPECT_EQ(score_hits(std::vector<Detection>{at(41.25)}, one, wf), 1u);

    const std::vector<Target> two{truth(40.0), truth(42.0)};
    EXPECT_EQ(score_hits(std::vector<Detection>{at(41.0)}, two, wf), 1u);
    EXPECT_EQ(score_hits(std::vector<Detection>{at(41.0), at(42.5)}, two, wf), 2u);
    EXPECT_EQ(score_hits(std::vector<Detection>{}, two, wf), 0u);
    EXPECT_THROW(score_hits(exact, std::vector<Target>{}, wf), ValidationError);
}

TEST(Eval, ScoreHitsIsPermutationInvariant) {
    const WaveformParams wf;
    std::vector<Target> t{truth(10.0), truth(11.0), truth(30.0), truth(31.1)};
    std::vector<Detection> d{at(10.5), at(11.9), at(30.2), at(50.0), at(31.0)};
    const auto want = score_hits(d, t, wf);
    std::sort(t.begin(), t.end(), [](const Target& a, const Target& b) { return a.range_to_c1_m < b.range_to_c1_m; });
    std::sort(d.begin(), d.end(), [](const Detection& a, const Detection& b) { return a.range_m < b.range_m; });
    do {
        EXPECT_EQ(score_hits(d, t, wf), want);
    } while (std::next_permutation(d.begin(), d.end(),
                                   [](const Detection& a, const Detection& b) { return a.range_m < b.range_m; }));
    std::reverse(t.begin(), t.end());
    EXPECT_EQ(score_hits(d, t, wf), want);
}
