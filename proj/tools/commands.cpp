#include "commands.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>

#include "cirad/codebook.hpp"
#include "cirad/coord_protocol.hpp"
#include "cirad/error.hpp"
#include "cirad/rdproc.hpp"
#include "config.hpp"

namespace cirad::cli {

namespace fs = std::filesystem;

ExperimentConfig apply_overrides(ExperimentConfig config, const Overrides& overrides) {
    if (const char* env = std::getenv("CIRAD_OUTPUT_DIR"); env && *env) config.output_dir = env;
    if (overrides.output_dir) config.output_dir = *overrides.output_dir;
    if (overrides.seed) config.master_seed = *overrides.seed;
    if (overrides.trials) config.trials = *overrides.trials;
    validate(config);
    return config;
}

Manifest::Manifest(fs::path root, std::string command, std::string config_hash, std::uint64_t seed)
    : root_(std::move(root)), command_(std::move(command)), config_hash_(std::move(config_hash)), seed_(seed) {}

fs::path Manifest::path(const std::string& name) {
    files_.push_back(name);
    return root_ / name;
}

void Manifest::write() const {
    const fs::path p = root_ / "manifest.txt";
    std::ofstream out(p);
    if (!out) throw RuntimeError("cannot write '" + p.string() + "'");
    out << "# command=" << command_ << '\n'
        << "# config_hash=" << config_hash_ << '\n'
        << "# master_seed=" << seed_ << '\n'
        << "# version=" << library_version() << '\n'
        << "file,bytes\n";
    for (const auto& f : files_) out << f << ',' << fs::file_size(root_ / f) << '\n';
    if (!out) throw RuntimeError("write failed for '" + p.string() + "'");
}

namespace {

Provenance provenance(const ExperimentConfig& config) {
    return {config_hash(config), config.master_seed, std::string(library_version())};
}

void write_text(const fs::path& p, const std::string& text) {
    fs::create_directories(p.parent_path());
    std::ofstream out(p);
    out << text;
    if (!out) throw RuntimeError("write failed for '" + p.string() + "'");
}

void emit_map(const RangeDopplerMap& map, const std::string& stem, Manifest& manifest) {
    write_map_csv(map, manifest.path(stem + ".csv"));
    write_map_pgm(map, manifest.path(stem + ".pgm"));
    write_peaks_csv(map.peak_list, manifest.path(stem + "_peaks.csv"));
}

}  // namespace

void run_simulate(const ExperimentConfig& config, Manifest& manifest, std::ostream& out) {
    const auto& wf = config.waveform;
    const CpiCodes codes = make_codes(config.code_set, wf.code_length, config.master_seed);
    const auto base = run_cpi(config.scene, wf, CpiMode::Noncooperative, config.side_channel, codes,
                              config.master_seed, config.run);
    const auto base_self = process_cpi(base, codes, CpiMode::Noncooperative).self_map;
    const auto base_cross = doppler_dft(correlate_fast_time(base.cube_c1, codes.c2, CorrelationMode::Cyclic, "c2"));
    emit_map(base_self, "baseline_complex", manifest);
    emit_map(fuse_noncoherent(base_self, base_cross), "baseline_fused", manifest);

    write_code_csv(codes.c1, manifest.path("code_c1.csv"));
    write_code_csv(codes.c2, manifest.path("code_c2.csv"));
    write_text(manifest.path("config.resolved"), dump_config(config));

    out << "mode=noncooperative pulses=" << base.effective_pulses()
        << " psl_db=" << peak_sidelobe_level(base_self) << '\n';

    if (config.mode == CpiMode::Noncooperative) return;

    const auto enh = run_cpi(config.scene, wf, CpiMode::Collaborative, config.side_channel, codes,
                             config.master_seed, config.run);
    const auto maps = process_cpi(enh, codes, CpiMode::Collaborative);
    emit_map(maps.self_map, "enhanced_complex", manifest);
    emit_map(maps.detection_map, "enhanced_fused", manifest);
    write_weight_csv(*enh.weight, manifest.path("weight.csv"));
    {
        std::string trace;
        for (const auto& line : enh.trace) trace += line + '\n';
        write_text(manifest.path("trace.txt"), trace);
    }

    const auto& w = *enh.solved;
    const std::size_t payload = channel_payload_size(*enh.weight, config.side_channel);
    const std::size_t raw = raw_cube_bytes(wf.code_length, wf.pulses_per_cpi);
    out << "mode=collaborative pulses=" << enh.effective_pulses() << " psl_db=" << peak_sidelobe_level(maps.detection_map)
        << '\n'
        << "weight residual=" << w.objective_residual << " u_norm=" << w.u_norm << " iterations=" << w.solver_iterations
        << " converged=" << (w.converged ? "yes" : "no") << " flagged=" << w.flagged_elements
        << " dropped=" << (enh.exchange_dropped ? "yes" : "no") << '\n'
        << "payload_bytes=" << payload << " raw_cube_bytes=" << raw << '\n';
    const auto& bp = base_self.peak_list;
    const auto& ep = maps.detection_map.peak_list;
    if (!bp.empty() && !ep.empty()) {
        out << "peak baseline=(" << bp.front().range_bin << ',' << bp.front().doppler_bin << ") "
            << bp.front().magnitude << " enhanced=(" << ep.front().range_bin << ',' << ep.front().doppler_bin << ") "
            << ep.front().magnitude << '\n';
    }
}

void run_sweep(const ExperimentConfig& config, Manifest& manifest, std::ostream& out) {
    const auto curve = run_hit_rate_sweep(config);
    write_hit_rate_csv(curve, provenance(config), manifest.path("hit_rate.csv"));
    write_text(manifest.path("config.resolved"), dump_config(config));
    out << "snr_db  baseline  enhanced\n";
    for (std::size_t i = 0; i < curve.snr_points_db.size(); ++i) {
        out << std::setw(6) << curve.snr_points_db[i] << "  " << std::setw(8) << curve.hit_rate_baseline[i] << "  "
            << std::setw(8) << curve.hit_rate_enhanced[i] << '\n';
    }
}

void run_psl(const ExperimentConfig& config, Manifest& manifest, std::ostream& out) {
    const auto report = run_psl_experiment(config);
    write_psl_csv(report, provenance(config), manifest.path("psl.csv"));
    write_text(manifest.path("config.resolved"), dump_config(config));
    out << "seeds=" << report.samples.size() << '\n'
        << "psl_baseline_db=" << report.psl_baseline_db << " (own peak " << report.psl_baseline_self_db << ")\n"
        << "psl_enhanced_db=" << report.psl_enhanced_db << '\n'
        << "improvement_db=" << report.improvement_db << '\n'
        << "peak_ratio=" << report.peak_ratio << '\n';
}

void run_codes(const ExperimentConfig& config, Manifest& manifest, std::ostream& out) {
    const CpiCodes codes = make_codes(config.code_set, config.waveform.code_length, config.master_seed);
    const auto r12 = cross_correlate(codes.c1, codes.c2);
    const auto r21 = cross_correlate(codes.c2, codes.c1);
    write_code_csv(codes.c1, manifest.path("code_c1.csv"));
    write_code_csv(codes.c2, manifest.path("code_c2.csv"));
    {
        const fs::path p = manifest.path("correlation.csv");
        std::ofstream csv(p);
        if (!csv) throw RuntimeError("cannot write '" + p.string() + "'");
        csv << "# code_set=" << to_string(config.code_set) << " n=" << codes.c1.size()
            << " psl_c1_db=" << r12.psl_db << " psl_c2_db=" << r21.psl_db << " zcz_length=" << r12.zcz_length << '\n'
            << "lag,autocorr_c1,autocorr_c2,crosscorr\n";
        const auto n = static_cast<long long>(codes.c1.size());
        for (std::size_t i = 0; i < r12.autocorr.size(); ++i) {
            csv << static_cast<long long>(i) - (n - 1) << ',' << r12.autocorr[i] << ',' << r21.autocorr[i] << ','
                << r12.crosscorr[i] << '\n';
        }
        if (!csv) throw RuntimeError("write failed for '" + p.string() + "'");
    }
    write_text(manifest.path("config.resolved"), dump_config(config));
    out << "zero_lag c1=" << r12.autocorr[r12.zero_lag()] << " c2=" << r21.autocorr[r21.zero_lag()] << '\n'
        << "psl_db c1=" << r12.psl_db << " c2=" << r21.psl_db << '\n'
        << "zcz_length=" << r12.zcz_length << '\n';
}

int run_command(std::string_view command, const std::optional<fs::path>& config_path, const Overrides& overrides,
                std::ostream& out, std::ostream& err) {
    try {
        ExperimentConfig config = config_path ? load_config(*config_path) : parse_config("");
        config = apply_overrides(std::move(config), overrides);
        Manifest manifest(config.output_dir, std::string(command), config_hash(config), config.master_seed);
        fs::create_directories(config.output_dir);
        if (command == "simulate") {
            run_simulate(config, manifest, out);
        } else if (command == "sweep") {
            run_sweep(config, manifest, out);
        } else if (command == "psl") {
            run_psl(config, manifest, out);
        } else if (command == "codes") {
            run_codes(config, manifest, out);
        } else {
            throw ValidationError("unknown command '" + std::string(command) + "'");
        }
        manifest.write();
        out << "wrote " << manifest.files().size() + 1 << " files to " << config.output_dir << '\n';
        return 0;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << command << ": " << e.what() << '\n';
        return 2;
    }
}

}  // namespace cirad::cli
