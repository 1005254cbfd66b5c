#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "cirad/error.hpp"
#include "cirad/experiment.hpp"

using namespace cirad;

namespace {

ExperimentConfig small_sweep() {
    ExperimentConfig c;
    c.snr_grid = {-6.0, 6.0};
    c.trials = 6;
    return c;
}

}  // namespace

TEST(Experiment, SweepIsIndependentOfWorkerCount) {
    auto c = small_sweep();
    const auto serial = run_hit_rate_sweep(c);
    c.max_workers = 3;
    const auto parallel = run_hit_rate_sweep(c);
    EXPECT_EQ(serial.hit_rate_baseline, parallel.hit_rate_baseline);
    EXPECT_EQ(serial.hit_rate_enhanced, parallel.hit_rate_enhanced);
    EXPECT_EQ(serial.snr_points_db, c.snr_grid);
    EXPECT_EQ(serial.trials, 6u);
    for (double r : serial.hit_rate_baseline) {
        EXPECT_GE(r, 0.0);
        EXPECT_LE(r, 1.0);
    }
}

TEST(Experiment, TrialScenesFollowTheConfig) {
    ExperimentConfig c;
    c.min_target_separation_m = 20.0;
    for (std::size_t t = 0; t < 50; ++t) {
        const Scene s = sweep_trial_scene(c, t);
        ASSERT_EQ(s.targets.size(), 2u);
        EXPECT_EQ(s.targets[0].reflectivity, cd(1.0, 0.0));
        EXPECT_GE(s.targets[1].reflectivity.real(), 0.2);
        EXPECT_LE(s.targets[1].reflectivity.real(), 0.5);
        for (const auto& tg : s.targets) {
            EXPECT_GE(tg.range_to_c1_m, 10.0);
            EXPECT_LE(tg.range_to_c1_m, 100.0);
            EXPECT_GE(tg.range_to_c2_m, 10.0);
            EXPECT_LE(tg.range_to_c2_m, 100.0);
            EXPECT_EQ(tg.velocity_mps, 10.0);
        }
        EXPECT_GE(std::abs(s.targets[0].range_to_c1_m - s.targets[1].range_to_c1_m), 20.0);
    }
}

namespace {

ExperimentConfig noiseless_orthogonal_config() {
    ExperimentConfig c;
    c.code_set = CodeSet::OrthogonalPair;
    c.snr_grid = {300.0};
    c.trials = 20;
    c.min_target_separation_m = 5.0;
    // no Doppler straddle sidelobes
    c.target_velocity_mps = 0.0;
    // the pair's autocorrelation repeats at lag N/2, beyond the scene
    c.peaks.max_range_m = 110.0;
    return c;
}

}  // namespace

TEST(Experiment, NoiselessCeilingBaseline) {
    EXPECT_DOUBLE_EQ(run_hit_rate_sweep(noiseless_orthogonal_config()).hit_rate_baseline[0], 1.0);
}

TEST(Experiment, NoiselessCeilingEnhanced) {
    EXPECT_DOUBLE_EQ(run_hit_rate_sweep(noiseless_orthogonal_config()).hit_rate_enhanced[0], 1.0);
}

TEST(Experiment, NoiseFloor) {
    ExperimentConfig c;
    c.snr_grid = {-300.0};
    c.trials = 30;
    const auto curve = run_hit_rate_sweep(c);
    EXPECT_GE(curve.hit_rate_enhanced[0], curve.hit_rate_baseline[0] - 2.0 / std::sqrt(30.0));
    // two detections among 256 range bins: chance of a hit is small
    EXPECT_LT(curve.hit_rate_baseline[0], 0.2);
}

TEST(Experiment, BinomialConsistency) {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        ExperimentConfig c;
        c.master_seed = seed;
        c.snr_grid = {0.0};
        c.trials = 15;
        const auto a = run_hit_rate_sweep(c);
        c.trials = 30;
        const auto b = run_hit_rate_sweep(c);
        for (auto rates : {std::pair{a.hit_rate_baseline[0], b.hit_rate_baseline[0]},
                           std::pair{a.hit_rate_enhanced[0], b.hit_rate_enhanced[0]}}) {
            const double p = rates.second;
            const double bound = 3.0 * std::sqrt(std::max(p * (1 - p), 0.01) / 15.0);
            EXPECT_LT(std::abs(rates.first - rates.second), bound);
        }
    }
}

TEST(Experiment, PslWithOrthogonalCodesNoiseFree) {
    ExperimentConfig c;
    c.code_set = CodeSet::OrthogonalPair;
    c.run.snr_db = 300.0;
    c.psl_seeds = 3;
    const auto r = run_psl_experiment(c);
    EXPECT_LE(r.psl_enhanced_db, r.psl_baseline_self_db + 1e-9);
    EXPECT_GT(r.peak_ratio, 1.0);
}

TEST(Experiment, CrossPathActsAsInterference) {
    const WaveformParams wf;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto codes = make_codes(CodeSet::RandomBinary, 256, seed);
        RunOptions clean;
        clean.cross_path_enabled = false;
        const Scene scene = ExperimentConfig::default_scene();
        const auto with = run_cpi(scene, wf, CpiMode::Noncooperative, {}, codes, seed);
        const auto without = run_cpi(scene, wf, CpiMode::Noncooperative, {}, codes, seed, clean);
        const auto mw = process_cpi(with, codes, CpiMode::Noncooperative).detection_map;
        const auto mo = process_cpi(without, codes, CpiMode::Noncooperative).detection_map;
        EXPECT_GE(cut_psl(range_cut(mw, 1), 1), cut_psl(range_cut(mo, 1), 1) - 1e-9) << "seed " << seed;
    }
}

TEST(Experiment, PslReportShape) {
    ExperimentConfig c;
    c.psl_seeds = 4;
    const auto r = run_psl_experiment(c);
    ASSERT_EQ(r.samples.size(), 4u);
    for (const auto& s : r.samples) {
        EXPECT_LE(s.enhanced_db, 0.0);
        EXPECT_LE(s.baseline_db, s.baseline_self_db);
    }
}

TEST(Experiment, CsvOutputs) {
    const auto dir = std::filesystem::temp_directory_path() / "cirad_experiment_test";
    HitRateCurve curve;
    curve.snr_points_db = {-3, 3};
    curve.hit_rate_baseline = {0.25, 0.5};
    curve.hit_rate_enhanced = {0.5, 0.75};
    curve.trials = 2;
    write_hit_rate_csv(curve, {"abc", 7, ""}, dir / "hit.csv");
    std::ifstream in(dir / "hit.csv");
    std::string all((std::istreambuf_iterator<char>(in)), {});
    EXPECT_NE(all.find("# config_hash=abc"), std::string::npos);
    EXPECT_NE(all.find("# master_seed=7"), std::string::npos);
    EXPECT_NE(all.find("snr_db,hit_rate_baseline,hit_rate_enhanced\n-3,0.25,0.5\n3,0.5,0.75\n"), std::string::npos);
    std::filesystem::remove_all(dir);
}

TEST(Experiment, ConfigValidation) {
    ExperimentConfig c;
    EXPECT_NO_THROW(validate(c));
    c.trials = 0;
    EXPECT_THROW(validate(c), ValidationError);
    c = ExperimentConfig{};
    c.range_min_m = 50;
    c.range_max_m = 40;
    EXPECT_THROW(validate(c), ValidationError);
    c = ExperimentConfig{};
    c.snr_grid.clear();
    EXPECT_THROW(validate(c), ValidationError);
    c = ExperimentConfig{};
    c.max_workers = 0;
    EXPECT_THROW(validate(c), ValidationError);
    EXPECT_THROW(parse_code_set("gold"), ValidationError);
}

TEST(Experiment, PolyphaseCodesDiffer) {
    const auto cc = make_codes(CodeSet::Polyphase, 64, 3);
    EXPECT_NE(cc.c1.samples, cc.c2.samples);
}
