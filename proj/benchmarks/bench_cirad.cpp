#include <benchmark/benchmark.h>

#include "cirad/ci_align.hpp"
#include "cirad/coord_protocol.hpp"
#include "cirad/experiment.hpp"
#include "cirad/rdproc.hpp"

using namespace cirad;

namespace {

Scene reference_scene() {
    Scene s;
    s.targets.push_back(Target{});
    return s;
}

AlignmentProblem reference_problem(const WaveformParams& wf) {
    const auto chan = absorb_phases(derive_channel(reference_scene(), wf), 1);
    const Code c2 = generate_code(CodeFamily::RandomBinary, wf.code_length, 2);
    const auto s = synthesize_self_echo(c2, chan, wf, {0, 1});
    const auto x = synthesize_cross_echo(c2, std::nullopt, chan, wf, {1, 1});
    std::vector<cd> ys(wf.code_length), yc(wf.code_length);
    for (std::size_t i = 0; i < wf.code_length; ++i) {
        ys[i] = s.samples(i, 0);
        yc[i] = x.samples(i, 0);
    }
    return make_problem(ys, yc, c2, cross_paths_from_channel(chan, wf, 1));
}

}  // namespace

static void BM_CorrelateFastTime(benchmark::State& state) {
    const auto wf = make_waveform(77e9, 120e6, static_cast<std::size_t>(state.range(0)), 128);
    const Code c = generate_code(CodeFamily::RandomBinary, wf.code_length, 1);
    const auto cube = synthesize_self_echo(c, derive_channel(reference_scene(), wf), wf);
    for (auto _ : state) benchmark::DoNotOptimize(correlate_fast_time(cube, c));
}
BENCHMARK(BM_CorrelateFastTime)->Arg(64)->Arg(256)->Arg(1024);

static void BM_DopplerDft(benchmark::State& state) {
    const auto wf = make_waveform(77e9, 120e6, 256, static_cast<std::size_t>(state.range(0)));
    const Code c = generate_code(CodeFamily::RandomBinary, wf.code_length, 1);
    const auto prof = correlate_fast_time(synthesize_self_echo(c, derive_channel(reference_scene(), wf), wf), c);
    for (auto _ : state) benchmark::DoNotOptimize(doppler_dft(prof));
}
BENCHMARK(BM_DopplerDft)->Arg(32)->Arg(128)->Arg(512);

static void BM_SolveClosedForm(benchmark::State& state) {
    const auto problem = reference_problem(WaveformParams{});
    for (auto _ : state) benchmark::DoNotOptimize(solve_alignment_closed_form(problem));
}
BENCHMARK(BM_SolveClosedForm);

static void BM_SolveIterative(benchmark::State& state) {
    const auto problem = reference_problem(WaveformParams{});
    for (auto _ : state) benchmark::DoNotOptimize(solve_alignment_iterative(problem));
}
BENCHMARK(BM_SolveIterative)->Unit(benchmark::kMillisecond);

static void BM_RunCpi(benchmark::State& state) {
    const WaveformParams wf;
    const auto mode = state.range(0) == 0 ? CpiMode::Noncooperative : CpiMode::Collaborative;
    const auto codes = make_codes(CodeSet::RandomBinary, wf.code_length, 1);
    std::uint64_t seed = 0;
    for (auto _ : state) {
        const auto r = run_cpi(reference_scene(), wf, mode, {}, codes, seed++);
        benchmark::DoNotOptimize(process_cpi(r, codes, mode));
    }
}
BENCHMARK(BM_RunCpi)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
