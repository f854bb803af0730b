#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace movsep {

using cplx = std::complex<double>;

/// Thrown on malformed inputs (bad audio, bad config, dimension mismatch).
struct InvalidInput : std::runtime_error {
  explicit InvalidInput(const std::string& msg) : std::runtime_error(msg) {}
};

/// Multichannel time-domain audio, channel-major storage.
struct AudioBuffer {
  std::vector<std::vector<double>> samples;  // [channel][t]
  double sample_rate = 0.0;

  std::size_t num_channels() const { return samples.size(); }
  std::size_t num_samples() const { return samples.empty() ? 0 : samples[0].size(); }

  void validate() const {
    if (sample_rate <= 0.0) throw InvalidInput("AudioBuffer: sample_rate must be > 0");
    for (const auto& ch : samples)
      if (ch.size() != num_samples())
        throw InvalidInput("AudioBuffer: channels have unequal length");
  }
};

/// One-sided STFT of a multichannel signal. bin(f, n, m) with
/// f = 0..F-1, frame n = 0..N-1, channel m = 0..M-1. F = window_length/2 + 1.
/// Frame n is centered at original sample n*hop (half-window edge padding).
struct Spectrogram {
  std::size_t num_bins = 0;      // F
  std::size_t num_frames = 0;    // N
  std::size_t num_channels = 0;  // M
  double sample_rate = 0.0;
  std::size_t window_length = 0;
  std::size_t hop = 0;
  std::size_t num_samples = 0;  // original time-domain length, for istft
  std::vector<cplx> data;       // [m][n][f] flattened

  cplx& at(std::size_t f, std::size_t n, std::size_t m) {
    return data[(m * num_frames + n) * num_bins + f];
  }
  cplx at(std::size_t f, std::size_t n, std::size_t m) const {
    return data[(m * num_frames + n) * num_bins + f];
  }
  const cplx* frame(std::size_t n, std::size_t m) const {
    return data.data() + (m * num_frames + n) * num_bins;
  }
  cplx* frame(std::size_t n, std::size_t m) {
    return data.data() + (m * num_frames + n) * num_bins;
  }

  double frame_time(std::size_t n) const { return double(n) * hop / sample_rate; }
  double bin_freq_rad(std::size_t f) const {
    // omega_f = 2*pi*(f-1)*Fs/N in 1-based indexing
    return 2.0 * 3.14159265358979323846 * double(f) * sample_rate / double(window_length);
  }

  void resize() { data.assign(num_bins * num_frames * num_channels, cplx(0.0, 0.0)); }
};

/// Execution policy for kernels that ship both a serial reference and an
/// OpenMP-parallel implementation.
enum class Exec { Serial, Parallel };

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

/// Wrap an angle into [-pi, pi).
inline double wrap_angle(double a) {
  a = std::fmod(a + kPi, kTwoPi);
  if (a < 0) a += kTwoPi;
  return a - kPi;
}

}  // namespace movsep
