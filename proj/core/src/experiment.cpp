#include "cirad/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <random>
#include <thread>

#include "cirad/error.hpp"
#include "cirad/rng.hpp"
#include "io_util.hpp"

#ifndef CIRAD_VERSION_STRING
#define CIRAD_VERSION_STRING "0.0.0"
#endif

namespace cirad {

std::string_view to_string(CodeSet set) {
    switch (set) {
        case CodeSet::RandomBinary: return "random-binary";
        case CodeSet::Polyphase: return "polyphase";
        case CodeSet::OrthogonalPair: return "orthogonal-pair";
    }
    return "random-binary";
}

CodeSet parse_code_set(std::string_view text) {
    if (text == "random-binary") return CodeSet::RandomBinary;
    if (text == "polyphase") return CodeSet::Polyphase;
    if (text == "orthogonal-pair") return CodeSet::OrthogonalPair;
    throw ValidationError("code_set: expected random-binary, polyphase or orthogonal-pair, got '" +
                          std::string(text) + "'");
}

CpiCodes make_codes(CodeSet set, std::size_t n, std::uint64_t seed) {
    switch (set) {
        case CodeSet::OrthogonalPair: {
            auto [a, b] = make_orthogonal_pair(n, seed);
            return {std::move(a), std::move(b)};
        }
        case CodeSet::Polyphase: {
            Code c1 = generate_code(CodeFamily::Polyphase, n, derive_seed(seed, Stream::CodeC1));
            // Distinct roots; a pair sharing a root would make c2 a copy of c1.
            for (std::uint64_t i = 0; i < 64; ++i) {
                Code c2 = generate_code(CodeFamily::Polyphase, n, derive_seed(seed, Stream::CodeC2, i));
                if (c2.samples != c1.samples || i == 63) return {std::move(c1), std::move(c2)};
            }
            break;
        }
        case CodeSet::RandomBinary: break;
    }
    return {generate_code(CodeFamily::RandomBinary, n, derive_seed(seed, Stream::CodeC1)),
            generate_code(CodeFamily::RandomBinary, n, derive_seed(seed, Stream::CodeC2))};
}

Scene ExperimentConfig::default_scene() {
    Scene scene;
    scene.targets.push_back(Target{});
    return scene;
}

std::vector<double> ExperimentConfig::default_snr_grid() {
    std::vector<double> grid;
    for (int i = 0; i <= 10; ++i) grid.push_back(-15.0 + 3.0 * i);
    return grid;
}

void validate(const ExperimentConfig& config) {
    validate(config.waveform);
    validate(config.scene);
    validate(config.side_channel);
    if (config.mode == CpiMode::Collaborative && config.waveform.pulses_per_cpi < 3) {
        throw ValidationError("pulses_per_cpi must be >= 3 in collaborative mode");
    }
    if (config.code_set == CodeSet::OrthogonalPair && (config.waveform.code_length % 2 != 0 ||
                                                       config.waveform.code_length < 4)) {
        throw ValidationError("code_length must be even and >= 4 for orthogonal-pair codes");
    }
    if (config.max_workers == 0) throw ValidationError("max_workers must be >= 1");
    if (config.trials == 0) throw ValidationError("trials must be >= 1");
    if (config.snr_grid.empty()) throw ValidationError("snr_grid must not be empty");
    for (double s : config.snr_grid) {
        if (!std::isfinite(s)) throw ValidationError("snr_grid entries must be finite");
    }
    if (!std::isfinite(config.run.snr_db)) throw ValidationError("snr_db must be finite");
    if (!(config.range_min_m > 0.0 && config.range_max_m >= config.range_min_m)) {
        throw ValidationError("range_min_m must be > 0 and <= range_max_m");
    }
    if (!(config.alpha2_min >= 0.0 && config.alpha2_max >= config.alpha2_min)) {
        throw ValidationError("alpha2_min must be >= 0 and <= alpha2_max");
    }
    if (!std::isfinite(config.target_velocity_mps)) throw ValidationError("target_velocity_mps must be finite");
    if (!(config.min_target_separation_m >= 0.0) ||
        config.min_target_separation_m > config.range_max_m - config.range_min_m) {
        throw ValidationError("min_target_separation_m must lie in [0, range_max_m - range_min_m]");
    }
    if (!(config.peaks.max_range_m >= 0.0)) throw ValidationError("detection_max_range_m must be >= 0");
    if (config.psl_seeds == 0) throw ValidationError("psl_seeds must be >= 1");
    if (2 * config.psl_exclusion_bins + 1 >= config.waveform.code_length) {
        throw ValidationError("psl_exclusion_bins covers the whole range cut");
    }
    if (config.run.iterative.max_iter == 0 || !(config.run.iterative.tol > 0.0) ||
        !(config.run.iterative.step > 0.0)) {
        throw ValidationError("solver_max_iter, solver_tol and solver_step must be positive");
    }
}

std::string_view library_version() { return CIRAD_VERSION_STRING; }

Scene sweep_trial_scene(const ExperimentConfig& config, std::size_t trial) {
    auto eng = derive_engine(config.master_seed, Stream::Scene, trial);
    std::uniform_real_distribution<double> range(config.range_min_m, config.range_max_m);
    std::uniform_real_distribution<double> alpha(config.alpha2_min, config.alpha2_max);

    Scene scene;
    scene.radars = config.scene.radars;
    Target t1;
    t1.range_to_c1_m = range(eng);
    t1.range_to_c2_m = range(eng);
    t1.velocity_mps = config.target_velocity_mps;
    t1.reflectivity = 1.0;
    Target t2 = t1;
    for (int attempt = 0; attempt < 10000; ++attempt) {
        t2.range_to_c1_m = range(eng);
        t2.range_to_c2_m = range(eng);
        if (std::abs(t2.range_to_c1_m - t1.range_to_c1_m) >= config.min_target_separation_m) break;
    }
    t2.reflectivity = alpha(eng);
    scene.targets = {t1, t2};
    return scene;
}

namespace {

template <typename Fn>
void parallel_for(std::size_t count, std::size_t workers, Fn&& fn) {
    workers = std::max<std::size_t>(1, std::min(workers, count));
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < count; i = next++) {
                    try {
                        fn(i);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                        next = count;
                    }
                }
            });
        }
    }
    if (failure) std::rethrow_exception(failure);
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

}  // namespace

HitRateCurve run_hit_rate_sweep(const ExperimentConfig& config) {
    validate(config);
    const std::size_t points = config.snr_grid.size();
    const std::size_t targets = 2;
    // hits[trial * points + point] = {baseline, enhanced}
    std::vector<std::pair<std::size_t, std::size_t>> hits(config.trials * points);

    parallel_for(config.trials, config.max_workers, [&](std::size_t trial) {
        const Scene scene = sweep_trial_scene(config, trial);
        const std::uint64_t trial_seed = derive_seed(config.master_seed, Stream::Scene, trial);
        const CpiCodes codes =
            make_codes(config.code_set, config.waveform.code_length, derive_seed(trial_seed, Stream::Generic, 1));
        const std::uint64_t cpi_seed = derive_seed(trial_seed, Stream::Generic, 2);
        RunOptions opts = config.run;
        for (std::size_t p = 0; p < points; ++p) {
            opts.snr_db = config.snr_grid[p];
            std::size_t counts[2];
            for (int arm = 0; arm < 2; ++arm) {
                const CpiMode mode = arm == 0 ? CpiMode::Noncooperative : CpiMode::Collaborative;
                const auto result = run_cpi(scene, config.waveform, mode, config.side_channel, codes, cpi_seed, opts);
                const auto maps = process_cpi(result, codes, mode);
                const auto dets = extract_peaks(maps.detection_map, targets, config.waveform, config.peaks);
                counts[arm] = score_hits(dets, scene.targets, config.waveform);
            }
            hits[trial * points + p] = {counts[0], counts[1]};
        }
    });

    HitRateCurve curve;
    curve.snr_points_db = config.snr_grid;
    curve.trials = config.trials;
    curve.seed = config.master_seed;
    const double denom = static_cast<double>(targets * config.trials);
    for (std::size_t p = 0; p < points; ++p) {
        std::size_t base = 0, enh = 0;
        for (std::size_t t = 0; t < config.trials; ++t) {
            base += hits[t * points + p].first;
            enh += hits[t * points + p].second;
        }
        curve.hit_rate_baseline.push_back(static_cast<double>(base) / denom);
        curve.hit_rate_enhanced.push_back(static_cast<double>(enh) / denom);
    }
    return curve;
}

namespace {

struct CutStats {
    std::vector<double> cut;
    double peak = 0.0;
};

// Range cut through the Doppler bin where the target's range row peaks.
CutStats target_cut(const RangeDopplerMap& map, std::size_t range_bin) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < map.doppler_bins(); ++c) {
        if (map.magnitude(range_bin, c) > map.magnitude(range_bin, best)) best = c;
    }
    CutStats s;
    s.cut = range_cut(map, best);
    s.peak = *std::max_element(s.cut.begin(), s.cut.end());
    return s;
}

}  // namespace

PslReport run_psl_experiment(const ExperimentConfig& config) {
    validate(config);
    if (config.scene.targets.empty()) throw ValidationError("psl experiment needs at least one target");
    const auto chan = derive_channel(config.scene, config.waveform);
    const std::size_t bin = chan.targets.front().self_chip_shift % config.waveform.code_length;

    PslReport report;
    report.samples.resize(config.psl_seeds);
    parallel_for(config.psl_seeds, config.max_workers, [&](std::size_t i) {
        const std::uint64_t seed = derive_seed(config.master_seed, Stream::Generic, i);
        const CpiCodes codes = make_codes(config.code_set, config.waveform.code_length, seed);
        RunOptions opts = config.run;
        const auto base = run_cpi(config.scene, config.waveform, CpiMode::Noncooperative, config.side_channel, codes,
                                  seed, opts);
        const auto enh = run_cpi(config.scene, config.waveform, CpiMode::Collaborative, config.side_channel, codes,
                                 seed, opts);
        const auto base_map = process_cpi(base, codes, CpiMode::Noncooperative).detection_map;
        const auto enh_map = process_cpi(enh, codes, CpiMode::Collaborative).detection_map;
        const CutStats b = target_cut(base_map, bin);
        const CutStats e = target_cut(enh_map, bin);
        PslSample s;
        s.code_seed = seed;
        s.baseline_db = cut_psl(b.cut, config.psl_exclusion_bins, e.peak);
        s.baseline_self_db = cut_psl(b.cut, config.psl_exclusion_bins);
        s.enhanced_db = cut_psl(e.cut, config.psl_exclusion_bins);
        s.peak_ratio = b.cut[bin] > 0.0 ? e.cut[bin] / b.cut[bin] : 0.0;
        report.samples[i] = s;
    });

    std::vector<double> base, self, enh, delta, ratio;
    for (const auto& s : report.samples) {
        base.push_back(s.baseline_db);
        self.push_back(s.baseline_self_db);
        enh.push_back(s.enhanced_db);
        delta.push_back(s.baseline_db - s.enhanced_db);
        ratio.push_back(s.peak_ratio);
    }
    report.psl_baseline_db = median(base);
    report.psl_baseline_self_db = median(self);
    report.psl_enhanced_db = median(enh);
    report.improvement_db = median(delta);
    report.peak_ratio = median(ratio);
    return report;
}

namespace {

void write_provenance(std::ostream& out, const Provenance& prov) {
    out << "# config_hash=" << prov.config_hash << '\n'
        << "# master_seed=" << prov.master_seed << '\n'
        << "# version=" << (prov.version.empty() ? std::string(library_version()) : prov.version) << '\n';
}

}  // namespace

void write_hit_rate_csv(const HitRateCurve& curve, const Provenance& prov, const std::filesystem::path& path) {
    auto out = detail::open_output(path);
    write_provenance(out, prov);
    out << "# trials=" << curve.trials << '\n';
    out << "snr_db,hit_rate_baseline,hit_rate_enhanced\n";
    for (std::size_t i = 0; i < curve.snr_points_db.size(); ++i) {
        out << detail::fmt_double(curve.snr_points_db[i]) << ',' << detail::fmt_double(curve.hit_rate_baseline[i])
            << ',' << detail::fmt_double(curve.hit_rate_enhanced[i]) << '\n';
    }
    if (!out) throw RuntimeError("write failed for '" + path.string() + "'");
}

void write_psl_csv(const PslReport& report, const Provenance& prov, const std::filesystem::path& path) {
    auto out = detail::open_output(path);
    write_provenance(out, prov);
    out << "# median_psl_baseline_db=" << detail::fmt_double(report.psl_baseline_db) << '\n'
        << "# median_psl_baseline_self_db=" << detail::fmt_double(report.psl_baseline_self_db) << '\n'
        << "# median_psl_enhanced_db=" << detail::fmt_double(report.psl_enhanced_db) << '\n'
        << "# median_improvement_db=" << detail::fmt_double(report.improvement_db) << '\n'
        << "# median_peak_ratio=" << detail::fmt_double(report.peak_ratio) << '\n';
    out << "code_seed,psl_baseline_db,psl_baseline_self_db,psl_enhanced_db,peak_ratio\n";
    for (const auto& s : report.samples) {
        out << s.code_seed << ',' << detail::fmt_double(s.baseline_db) << ','
            << detail::fmt_double(s.baseline_self_db) << ',' << detail::fmt_double(s.enhanced_db) << ','
            << detail::fmt_double(s.peak_ratio) << '\n';
    }
    if (!out) throw RuntimeError("write failed for '" + path.string() + "'");
}

}  // namespace cirad
