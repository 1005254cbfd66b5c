#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "cirad/error.hpp"
#include "commands.hpp"
#include "config.hpp"

using namespace cirad;
using namespace cirad::cli;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

std::string validation_message(std::string_view text) {
    try {
        parse_config(text, "t.config");
    } catch (const ValidationError& e) {
        return e.what();
    }
    return {};
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) { fs::remove_all(path); }
    ~TempDir() { fs::remove_all(path); }
};

int run(std::string_view cmd, const std::optional<fs::path>& cfg, const Overrides& o, std::string* out = nullptr) {
    std::ostringstream os, es;
    const int rc = run_command(cmd, cfg, o, os, es);
    if (out) *out = os.str() + es.str();
    return rc;
}

}  // namespace

TEST(Config, EmptyFileGivesDefaults) {
    const auto c = parse_config("");
    EXPECT_EQ(c.waveform.code_length, 256u);
    EXPECT_EQ(c.waveform.carrier_hz, 77e9);
    EXPECT_EQ(c.waveform.bandwidth_hz, 120e6);
    EXPECT_EQ(c.waveform.pulses_per_cpi, 128u);
    EXPECT_EQ(c.run.snr_db, 10.0);
    EXPECT_EQ(c.snr_grid.size(), 11u);
    ASSERT_EQ(c.scene.targets.size(), 1u);
}

TEST(Config, BundledSingleTargetConfig) {
    const auto c = load_config(fs::path(CIRAD_SOURCE_DIR) / "configs" / "single_target.config");
    ASSERT_EQ(c.scene.targets.size(), 1u);
    EXPECT_EQ(c.scene.targets[0].range_to_c1_m, 5.0);
    EXPECT_EQ(c.scene.targets[0].range_to_c2_m, 10.0);
    EXPECT_EQ(c.scene.targets[0].velocity_mps, 10.0);
    EXPECT_EQ(c.mode, CpiMode::Collaborative);
    EXPECT_NO_THROW(load_config(fs::path(CIRAD_SOURCE_DIR) / "configs" / "hit_rate_sweep.config"));
}

TEST(Config, Errors) {
    EXPECT_NE(validation_message("bandwidth_hz = -120e6\n").find("bandwidth_hz"), std::string::npos);
    EXPECT_NE(validation_message("# ok\nwibble = 3\n").find("t.config:2"), std::string::npos);
    EXPECT_NE(validation_message("# ok\nwibble = 3\n").find("unknown key"), std::string::npos);
    EXPECT_NE(validation_message("\n\njust words\n").find("t.config:3"), std::string::npos);
    EXPECT_NE(validation_message("trials = 4\ntrials = 5\n").find("duplicate"), std::string::npos);
    EXPECT_NE(validation_message("trials = many\n").find("trials"), std::string::npos);
    EXPECT_NE(validation_message("drop_probability = 2\n").find("drop_probability"), std::string::npos);
    EXPECT_NE(validation_message("target = 5, 10\n").find("target"), std::string::npos);
    EXPECT_THROW(load_config("/nonexistent/x.config"), ValidationError);
}

TEST(Config, DumpRoundTrips) {
    const auto c = parse_config(
        "target = 5, 10, 10\ntarget = 20, 30, -4, 0.5\nquantization_bits = 6\nsnr_grid = -3, 0.5\nsolver = iterative\n");
    const auto again = parse_config(dump_config(c));
    EXPECT_EQ(dump_config(again), dump_config(c));
    EXPECT_EQ(config_hash(again), config_hash(c));
    EXPECT_EQ(again.scene.targets.size(), 2u);
    auto moved = c;
    moved.output_dir = "elsewhere";
    moved.max_workers = 8;
    EXPECT_EQ(config_hash(moved), config_hash(c));
    moved.master_seed = 99;
    EXPECT_NE(config_hash(moved), config_hash(c));
}

TEST(Cli, CodesAudit) {
    TempDir dir("cirad_cli_codes");
    std::string out;
    ASSERT_EQ(run("codes", std::nullopt, {std::nullopt, dir.path.string(), std::nullopt}, &out), 0) << out;
    std::ifstream csv(dir.path / "correlation.csv");
    std::string line;
    bool found = false;
    while (std::getline(csv, line)) {
        if (line.rfind("0,", 0) == 0) {
            EXPECT_EQ(line.substr(0, 10), "0,256,256,");
            found = true;
        }
    }
    EXPECT_TRUE(found);
}

TEST(Cli, ManifestListsEveryFile) {
    TempDir dir("cirad_cli_simulate");
    std::string out;
    ASSERT_EQ(run("simulate", fs::path(CIRAD_SOURCE_DIR) / "configs" / "single_target.config",
                  {std::nullopt, dir.path.string(), std::nullopt}, &out),
              0)
        << out;
    std::set<std::string> listed;
    std::ifstream manifest(dir.path / "manifest.txt");
    std::string line;
    while (std::getline(manifest, line)) {
        if (line.empty() || line[0] == '#' || line == "file,bytes") continue;
        listed.insert(line.substr(0, line.find(',')));
    }
    std::size_t heatmaps = 0;
    for (const auto& e : fs::directory_iterator(dir.path)) {
        const auto name = e.path().filename().string();
        if (name == "manifest.txt") continue;
        EXPECT_TRUE(listed.count(name)) << name;
        heatmaps += e.path().extension() == ".pgm";
    }
    EXPECT_EQ(heatmaps, 4u);
    EXPECT_NE(slurp(dir.path / "manifest.txt").find("# config_hash="), std::string::npos);
}

TEST(Cli, ReproducibleArtifacts) {
    TempDir a("cirad_cli_rep_a"), b("cirad_cli_rep_b");
    const auto cfg = fs::path(CIRAD_SOURCE_DIR) / "configs" / "single_target.config";
    ASSERT_EQ(run("simulate", cfg, {std::nullopt, a.path.string(), std::nullopt}), 0);
    ASSERT_EQ(run("simulate", cfg, {std::nullopt, b.path.string(), std::nullopt}), 0);
    std::size_t compared = 0;
    for (const auto& e : fs::directory_iterator(a.path)) {
        const auto ext = e.path().extension();
        if (ext != ".csv" && ext != ".pgm") continue;
        EXPECT_EQ(slurp(e.path()), slurp(b.path / e.path().filename())) << e.path().filename();
        ++compared;
    }
    EXPECT_GT(compared, 10u);
}

TEST(Cli, SmokeSweep) {
    TempDir dir("cirad_cli_sweep");
    std::string out;
    ASSERT_EQ(run("sweep", std::nullopt, {std::nullopt, dir.path.string(), 10}, &out), 0) << out;
    std::ifstream csv(dir.path / "hit_rate.csv");
    std::string line;
    std::size_t rows = 0;
    while (std::getline(csv, line)) rows += !line.empty() && line[0] != '#' && line[0] != 's';
    EXPECT_EQ(rows, 11u);
    EXPECT_NE(slurp(dir.path / "hit_rate.csv").find("# trials=10"), std::string::npos);
}

TEST(Cli, ExitCodes) {
    TempDir dir("cirad_cli_exit");
    fs::create_directories(dir.path);
    const auto bad = dir.path / "bad.config";
    std::ofstream(bad) << "bandwidth_hz = -1\n";
    std::string out;
    EXPECT_EQ(run("psl", bad, {}, &out), 1);
    EXPECT_NE(out.find("bandwidth_hz"), std::string::npos);
    EXPECT_EQ(run("launch", std::nullopt, {std::nullopt, (dir.path / "o").string(), std::nullopt}), 1);

    // output_dir below a regular file cannot be created
    const auto blocker = dir.path / "file";
    std::ofstream(blocker) << "x";
    EXPECT_EQ(run("codes", std::nullopt, {std::nullopt, (blocker / "sub").string(), std::nullopt}, &out), 2);
}

TEST(Cli, EnvironmentOverridesOutputDir) {
    TempDir env_dir("cirad_cli_env"), flag_dir("cirad_cli_flag");
    ::setenv("CIRAD_OUTPUT_DIR", env_dir.path.c_str(), 1);
    const auto c = apply_overrides(parse_config("output_dir = cfg\n"), {});
    EXPECT_EQ(c.output_dir, env_dir.path.string());
    const auto d = apply_overrides(parse_config("output_dir = cfg\n"), {7, flag_dir.path.string(), 3});
    EXPECT_EQ(d.output_dir, flag_dir.path.string());
    EXPECT_EQ(d.master_seed, 7u);
    EXPECT_EQ(d.trials, 3u);
    ::unsetenv("CIRAD_OUTPUT_DIR");
}
