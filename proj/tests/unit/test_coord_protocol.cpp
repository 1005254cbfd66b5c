#include <gtest/gtest.h>

#include "cirad/coord_protocol.hpp"
#include "cirad/error.hpp"
#include "cirad/experiment.hpp"

using namespace cirad;

namespace {

Scene reference_scene() {
    Scene s;
    s.targets.push_back(Target{});
    return s;
}

CpiCodes codes(std::uint64_t seed = 1) { return make_codes(CodeSet::RandomBinary, 256, seed); }

CMatrix tail(const CMatrix& m, std::size_t first) {
    CMatrix out(m.rows(), m.cols() - first);
    for (std::size_t c = first; c < m.cols(); ++c) {
        for (std::size_t r = 0; r < m.rows(); ++r) out(r, c - first) = m(r, c);
    }
    return out;
}

}  // namespace

TEST(CoordProtocol, CollaborativeSchedule) {
    const auto s = make_schedule(CpiMode::Collaborative, 8);
    ASSERT_EQ(s.pulse_assignments.size(), 8u);
    EXPECT_EQ(s.coordination_pulses, 2u);
    EXPECT_EQ(s.pulse_assignments[0].c1_transmits, "c2");
    EXPECT_FALSE(s.pulse_assignments[0].c2_transmits);
    EXPECT_FALSE(s.pulse_assignments[1].c1_transmits);
    EXPECT_EQ(s.pulse_assignments[1].c2_transmits, "c2");
    for (std::size_t m = 2; m < 8; ++m) {
        EXPECT_EQ(s.pulse_assignments[m].c1_transmits, "c1");
        EXPECT_EQ(s.pulse_assignments[m].c2_transmits, "W*c2");
    }
    const auto n = make_schedule(CpiMode::Noncooperative, 4);
    for (const auto& p : n.pulse_assignments) {
        EXPECT_EQ(p.c1_transmits, "c1");
        EXPECT_EQ(p.c2_transmits, "c2");
    }
    EXPECT_THROW(make_schedule(CpiMode::Collaborative, 2), ValidationError);
}

TEST(CoordProtocol, NoncooperativeCubeIsSelfPlusCrossPlusNoise) {
    const WaveformParams wf;
    const auto cc = codes();
    const auto r = run_cpi(reference_scene(), wf, CpiMode::Noncooperative, {}, cc, 9);
    EXPECT_FALSE(r.weight.has_value());
    EXPECT_EQ(r.effective_pulses(), 128u);
    const auto self = synthesize_self_echo(cc.c1, r.channel, wf);
    const auto cross = synthesize_cross_echo(cc.c2, std::nullopt, r.channel, wf);
    const auto noise = complex_noise(256, 128, r.noise_variance, 9);
    for (std::size_t m = 0; m < 128; m += 7) {
        for (std::size_t n = 0; n < 256; ++n) {
            EXPECT_EQ(r.cube_c1.samples(n, m), self.samples(n, m) + cross.samples(n, m) + noise(n, m));
        }
    }
    EXPECT_NEAR(r.noise_variance, 0.0016 / 10.0, 1e-15);
}

TEST(CoordProtocol, IdealChannelCarriesSolverWeight) {
    const WaveformParams wf;
    const auto cc = codes(2);
    const auto r = run_cpi(reference_scene(), wf, CpiMode::Collaborative, {}, cc, 3);
    ASSERT_TRUE(r.weight && r.solved);
    EXPECT_EQ(r.weight->diagonal, r.solved->diagonal);
    EXPECT_EQ(r.effective_pulses(), 126u);
    EXPECT_EQ(r.cube_c1.first_pulse, 2u);
    const auto want = synthesize_cross_echo(cc.c2, *r.solved, r.channel, wf, {2, 126});
    ASSERT_TRUE(r.cube_c1.components.cross.has_value());
    EXPECT_TRUE(*r.cube_c1.components.cross == want.samples);
}

TEST(CoordProtocol, DroppedExchangeFallsBackToBaseline) {
    const WaveformParams wf;
    const auto cc = codes(3);
    SideChannel drop;
    drop.drop_probability = 1.0;
    const auto col = run_cpi(reference_scene(), wf, CpiMode::Collaborative, drop, cc, 5);
    const auto base = run_cpi(reference_scene(), wf, CpiMode::Noncooperative, drop, cc, 5);
    EXPECT_TRUE(col.exchange_dropped);
    EXPECT_TRUE(col.cube_c1.samples == tail(base.cube_c1.samples, 2));
    EXPECT_EQ(col.schedule.pulse_assignments[5].c2_transmits, "c2");
    EXPECT_EQ(col.schedule.pulse_assignments[5].weight_status, "dropped");
}

TEST(CoordProtocol, Deterministic) {
    const WaveformParams wf;
    const auto cc = codes(4);
    SideChannel ch;
    ch.quantization_bits = 6;
    ch.drop_probability = 0.3;
    for (auto mode : {CpiMode::Noncooperative, CpiMode::Collaborative}) {
        const auto a = run_cpi(reference_scene(), wf, mode, ch, cc, 77);
        const auto b = run_cpi(reference_scene(), wf, mode, ch, cc, 77);
        EXPECT_TRUE(a.cube_c1.samples == b.cube_c1.samples);
        EXPECT_EQ(a.trace, b.trace);
        if (a.weight) EXPECT_EQ(a.weight->diagonal, b.weight->diagonal);
    }
}

TEST(CoordProtocol, PayloadAccounting) {
    const auto w = WeightMatrix::identity(256);
    EXPECT_EQ(channel_payload_size(w, {}), 2048u);
    SideChannel q;
    q.quantization_bits = 8;
    EXPECT_EQ(channel_payload_size(w, q), 512u);
    EXPECT_EQ(raw_cube_bytes(256, 128), 262144u);
    EXPECT_EQ(raw_cube_bytes(256, 128) / channel_payload_size(w, {}), 128u);
}

TEST(CoordProtocol, Validation) {
    const WaveformParams wf;
    const auto cc = codes();
    SideChannel bad;
    bad.drop_probability = 1.5;
    EXPECT_THROW(run_cpi(reference_scene(), wf, CpiMode::Collaborative, bad, cc, 1), ValidationError);
    bad.drop_probability = -0.1;
    EXPECT_THROW(run_cpi(reference_scene(), wf, CpiMode::Collaborative, bad, cc, 1), ValidationError);
    SideChannel bits;
    bits.quantization_bits = 1;
    EXPECT_THROW(validate(bits), ValidationError);
    const auto short_wf = make_waveform(77e9, 120e6, 256, 2);
    EXPECT_THROW(run_cpi(reference_scene(), short_wf, CpiMode::Collaborative, {}, cc, 1), ValidationError);
    EXPECT_NO_THROW(run_cpi(reference_scene(), short_wf, CpiMode::Noncooperative, {}, cc, 1));
    EXPECT_THROW(parse_cpi_mode("bilateral"), ValidationError);
    EXPECT_THROW(parse_solver_choice("cvx"), ValidationError);
}

TEST(CoordProtocol, QuantizationNeverHelps) {
    const WaveformParams wf;
    double mean4 = 0.0, mean8 = 0.0, mean12 = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto cc = codes(seed);
        const auto chan = absorb_phases(derive_channel(reference_scene(), wf), seed);
        const auto s = synthesize_self_echo(cc.c2, chan, wf, {0, 1});
        const auto x = synthesize_cross_echo(cc.c2, std::nullopt, chan, wf, {1, 1});
        std::vector<cd> ys(256), yc(256);
        for (std::size_t i = 0; i < 256; ++i) {
            ys[i] = s.samples(i, 0);
            yc[i] = x.samples(i, 0);
        }
        const auto p = make_problem(ys, yc, cc.c2, cross_paths_from_channel(chan, wf, 1));
        const auto exact = solve_alignment_closed_form(p);
        const double r0 = evaluate_alignment(p, exact).im_norm;
        const double r4 = evaluate_alignment(p, quantize_weight(exact, 4)).im_norm;
        const double r8 = evaluate_alignment(p, quantize_weight(exact, 8)).im_norm;
        const double r12 = evaluate_alignment(p, quantize_weight(exact, 12)).im_norm;
        EXPECT_GE(r4, r0);
        EXPECT_GE(r8, r0);
        EXPECT_GE(r12, r0);
        mean4 += r4;
        mean8 += r8;
        mean12 += r12;
    }
    EXPECT_GT(mean4, mean8);
    EXPECT_GT(mean8, mean12);
}

TEST(CoordProtocol, QuantizedWeightsStayUnimodular) {
    std::vector<cd> d{{0.6, 0.8}, {-1, 0}, {0.1, -0.995}};
    for (auto& z : d) z /= std::abs(z);
    const auto q = quantize_weight(WeightMatrix::from_diagonal(d), 3);
    for (const auto& z : q.diagonal) EXPECT_NEAR(std::abs(z), 1.0, 1e-12);
    EXPECT_THROW(quantize_weight(WeightMatrix::from_diagonal(d), 1), ValidationError);
}

TEST(CoordProtocol, LatencyDelaysTheWeight) {
    const WaveformParams wf;
    const auto cc = codes(6);
    SideChannel late;
    late.latency_pulses = 3;
    const auto r = run_cpi(reference_scene(), wf, CpiMode::Collaborative, late, cc, 8);
    const auto plain = synthesize_cross_echo(cc.c2, std::nullopt, r.channel, wf, {2, 126});
    const auto weighted = synthesize_cross_echo(cc.c2, *r.weight, r.channel, wf, {2, 126});
    const auto& cross = *r.cube_c1.components.cross;
    for (std::size_t n = 0; n < 256; ++n) {
        EXPECT_EQ(cross(n, 0), plain.samples(n, 0));
        EXPECT_EQ(cross(n, 2), plain.samples(n, 2));
        EXPECT_EQ(cross(n, 3), weighted.samples(n, 3));
    }
    EXPECT_EQ(r.schedule.pulse_assignments[4].weight_status, "pending");
    EXPECT_EQ(r.schedule.pulse_assignments[5].weight_status, "applied");
}

TEST(CoordProtocol, StaleKnowledgeChangesTheWeight) {
    const WaveformParams wf;
    const auto cc = codes(7);
    RunOptions stale;
    stale.staleness.range_offset_m = 3.0;
    const auto fresh = run_cpi(reference_scene(), wf, CpiMode::Collaborative, {}, cc, 2);
    const auto old = run_cpi(reference_scene(), wf, CpiMode::Collaborative, {}, cc, 2, stale);
    EXPECT_NE(fresh.solved->diagonal, old.solved->diagonal);
}

TEST(CoordProtocol, TraceHasOneLinePerPulse) {
    const auto wf = make_waveform(77e9, 120e6, 64, 5);
    const auto r = run_cpi(reference_scene(), wf, CpiMode::Collaborative, {}, make_codes(CodeSet::RandomBinary, 64, 1), 1);
    ASSERT_EQ(r.trace.size(), 5u);
    EXPECT_EQ(r.trace[0], "pulse=1 c1=c2 c2=- weight=none");
    EXPECT_EQ(r.trace[1], "pulse=2 c1=- c2=c2 weight=none");
    EXPECT_EQ(r.trace[2], "pulse=3 c1=c1 c2=W*c2 weight=applied");
}

TEST(CoordProtocol, ProcessFusesInCollaborativeMode) {
    const WaveformParams wf;
    const auto cc = codes(8);
    const auto r = run_cpi(reference_scene(), wf, CpiMode::Collaborative, {}, cc, 4);
    const auto p = process_cpi(r, cc, CpiMode::Collaborative);
    ASSERT_TRUE(p.cross_map.has_value());
    EXPECT_EQ(p.detection_map.doppler_bins(), 126u);
    EXPECT_DOUBLE_EQ(p.detection_map.magnitude(4, 1), p.self_map.magnitude(4, 1) + p.cross_map->magnitude(4, 1));
    EXPECT_EQ(p.detection_map.peak_list.front().range_bin, 4u);
}
