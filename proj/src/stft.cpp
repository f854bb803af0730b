#include "movsep/stft.hpp"

#include <fftw3.h>

#include <mutex>

namespace movsep {

namespace {

// FFTW plan creation is not thread-safe; execution with explicit arrays is.
std::mutex g_fftw_mutex;

struct FftwPlan {
  fftw_plan plan = nullptr;
  ~FftwPlan() {
    if (plan) {
      std::lock_guard<std::mutex> lock(g_fftw_mutex);
      fftw_destroy_plan(plan);
    }
  }
};

}  // namespace

std::vector<double> sqrt_hann_window(std::size_t length) {
  std::vector<double> w(length);
  for (std::size_t i = 0; i < length; ++i)
    w[i] = std::sqrt(0.5 * (1.0 - std::cos(kTwoPi * double(i) / double(length))));
  return w;
}

Spectrogram stft(const AudioBuffer& audio, std::size_t window_length, std::size_t hop) {
  audio.validate();
  if (window_length == 0 || window_length % 2 != 0)
    throw InvalidInput("stft: window_length must be even and nonzero");
  if (hop == 0 || window_length % hop != 0)
    throw InvalidInput("stft: hop must divide window_length");
  const std::size_t T = audio.num_samples();
  if (T < window_length) throw InvalidInput("stft: audio shorter than one window");

  const std::size_t M = audio.num_channels();
  const std::size_t F = window_length / 2 + 1;
  const std::size_t pad = window_length / 2;
  const std::size_t N = (T + hop - 1) / hop + 1;

  Spectrogram spec;
  spec.num_bins = F;
  spec.num_frames = N;
  spec.num_channels = M;
  spec.sample_rate = audio.sample_rate;
  spec.window_length = window_length;
  spec.hop = hop;
  spec.num_samples = T;
  spec.resize();

  const auto window = sqrt_hann_window(window_length);

  std::vector<double> in(window_length);
  std::vector<cplx> out(F);
  FftwPlan plan;
  {
    std::lock_guard<std::mutex> lock(g_fftw_mutex);
    plan.plan = fftw_plan_dft_r2c_1d(int(window_length), in.data(),
                                     reinterpret_cast<fftw_complex*>(out.data()), FFTW_ESTIMATE);
  }

  for (std::size_t m = 0; m < M; ++m) {
    const auto& ch = audio.samples[m];
    for (std::size_t n = 0; n < N; ++n) {
      const std::ptrdiff_t start = std::ptrdiff_t(n * hop) - std::ptrdiff_t(pad);
      for (std::size_t i = 0; i < window_length; ++i) {
        const std::ptrdiff_t t = start + std::ptrdiff_t(i);
        const double s = (t >= 0 && t < std::ptrdiff_t(T)) ? ch[std::size_t(t)] : 0.0;
        in[i] = s * window[i];
      }
      fftw_execute_dft_r2c(plan.plan, in.data(), reinterpret_cast<fftw_complex*>(out.data()));
      cplx* dst = spec.frame(n, m);
      for (std::size_t f = 0; f < F; ++f) dst[f] = out[f];
    }
  }
  return spec;
}

AudioBuffer istft(const Spectrogram& spec) {
  const std::size_t wl = spec.window_length;
  const std::size_t hop = spec.hop;
  if (wl == 0 || hop == 0 || wl % 2 != 0 || wl % hop != 0)
    throw InvalidInput("istft: inconsistent window/hop metadata");
  if (spec.num_bins != wl / 2 + 1)
    throw InvalidInput("istft: num_bins does not match window_length");

  const std::size_t M = spec.num_channels;
  const std::size_t N = spec.num_frames;
  const std::size_t pad = wl / 2;
  const std::size_t padded_len = (N - 1) * hop + wl;
  const auto window = sqrt_hann_window(wl);

  std::vector<cplx> in(spec.num_bins);
  std::vector<double> out(wl);
  FftwPlan plan;
  {
    std::lock_guard<std::mutex> lock(g_fftw_mutex);
    plan.plan = fftw_plan_dft_c2r_1d(int(wl), reinterpret_cast<fftw_complex*>(in.data()),
                                     out.data(), FFTW_ESTIMATE);
  }

  // Window-square overlap sum; equals 1 in the interior at 50% overlap.
  std::vector<double> wsum(padded_len, 0.0);
  for (std::size_t n = 0; n < N; ++n)
    for (std::size_t i = 0; i < wl; ++i) wsum[n * hop + i] += window[i] * window[i];

  AudioBuffer audio;
  audio.sample_rate = spec.sample_rate;
  audio.samples.assign(M, std::vector<double>(spec.num_samples, 0.0));

  std::vector<double> acc(padded_len);
  for (std::size_t m = 0; m < M; ++m) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (std::size_t n = 0; n < N; ++n) {
      const cplx* src = spec.frame(n, m);
      std::copy(src, src + spec.num_bins, in.begin());
      fftw_execute_dft_c2r(plan.plan, reinterpret_cast<fftw_complex*>(in.data()), out.data());
      for (std::size_t i = 0; i < wl; ++i)
        acc[n * hop + i] += out[i] / double(wl) * window[i];
    }
    for (std::size_t t = 0; t < spec.num_samples; ++t) {
      const double ws = wsum[t + pad];
      audio.samples[m][t] = ws > 1e-12 ? acc[t + pad] / ws : 0.0;
    }
  }
  return audio;
}

}  // namespace movsep
