#include <benchmark/benchmark.h>

#include <random>

#include "movsep/localization.hpp"
#include "movsep/mnmf.hpp"
#include "movsep/spatial_model.hpp"
#include "movsep/stft.hpp"

using namespace movsep;

namespace {

struct Fixture {
  Spectrogram spec;
  DirectionGrid grid;
  DoaKernelSet kernels;
  SpatialWeightTensor weights;
  MixtureScmTensor mix;

  static Fixture make(std::size_t frames) {
    const std::size_t window = 512, hop = 256, M = 4;
    const double fs = 24000.0;
    AudioBuffer audio;
    audio.sample_rate = fs;
    std::mt19937_64 rng(7);
    std::normal_distribution<double> gauss(0.0, 0.1);
    const std::size_t T = frames * hop;
    audio.samples.assign(M, std::vector<double>(T));
    for (auto& ch : audio.samples)
      for (auto& x : ch) x = gauss(rng);

    Spectrogram spec = stft(audio, window, hop);
    DirectionGrid grid = DirectionGrid::uniform(72);
    DoaKernelSet kernels(default_geometry(), grid, spec.num_bins, window, fs);

    TrajectorySet traj;
    traj.num_frames = spec.num_frames;
    traj.frame_hop_s = hop / fs;
    SourceTrack t;
    t.id = 0;
    t.active.assign(spec.num_frames, 1);
    t.azimuth.assign(spec.num_frames, 0.0);
    t.state_var.assign(spec.num_frames, 0.05);
    for (std::size_t n = 0; n < spec.num_frames; ++n)
      t.azimuth[n] = wrap_angle(0.3 * double(n) * traj.frame_hop_s);
    traj.tracks.push_back(t);

    SpatialWeightTensor weights =
        add_background_source(restore_spatial_weights(traj, grid), 0.01);
    MixtureScmTensor mix = mixture_scm(spec);
    return {std::move(spec), std::move(grid), std::move(kernels), std::move(weights),
            std::move(mix)};
  }
};

void bm_srp_phat(benchmark::State& state, Exec exec) {
  auto fx = Fixture::make(std::size_t(state.range(0)));
  for (auto _ : state) {
    auto srp = srp_phat(fx.spec, fx.kernels, {}, exec);
    benchmark::DoNotOptimize(srp.energy.data());
  }
}

void bm_mnmf_setup(benchmark::State& state, Exec exec) {
  auto fx = Fixture::make(std::size_t(state.range(0)));
  for (auto _ : state) {
    MnmfProblem problem(fx.mix, fx.weights, fx.kernels, exec);
    benchmark::DoNotOptimize(&problem);
  }
}

void bm_mnmf_update(benchmark::State& state, Exec exec) {
  auto fx = Fixture::make(std::size_t(state.range(0)));
  MnmfProblem problem(fx.mix, fx.weights, fx.kernels, exec);
  MnmfParams params =
      init_params(fx.spec.num_bins, fx.spec.num_frames, 20, fx.weights.num_sources, 1);
  for (auto _ : state) {
    auto stats = problem.update(params, 1);
    benchmark::DoNotOptimize(stats.cost_trace.data());
  }
}

}  // namespace

BENCHMARK_CAPTURE(bm_srp_phat, serial, Exec::Serial)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(bm_srp_phat, parallel, Exec::Parallel)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(bm_mnmf_setup, serial, Exec::Serial)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(bm_mnmf_setup, parallel, Exec::Parallel)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(bm_mnmf_update, serial, Exec::Serial)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(bm_mnmf_update, parallel, Exec::Parallel)->Arg(32)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
