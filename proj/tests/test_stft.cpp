#include <doctest.h>

#include <cmath>
#include <random>

#include "movsep/stft.hpp"

using namespace movsep;

namespace {

AudioBuffer noise(std::size_t channels, std::size_t samples, std::uint64_t seed,
                  double fs = 24000.0) {
  AudioBuffer a;
  a.sample_rate = fs;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 0.25);
  a.samples.resize(channels);
  for (auto& ch : a.samples) {
    ch.resize(samples);
    for (auto& x : ch) x = g(rng);
  }
  return a;
}

double rel_rms_error(const std::vector<double>& a, const std::vector<double>& b) {
  double err = 0.0, ref = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    err += (a[i] - b[i]) * (a[i] - b[i]);
    ref += a[i] * a[i];
  }
  return std::sqrt(err / ref);
}

}  // namespace

TEST_CASE("zero signal gives all-zero spectrogram") {
  AudioBuffer a;
  a.sample_rate = 24000.0;
  a.samples.assign(2, std::vector<double>(4096, 0.0));
  Spectrogram s = stft(a, 512, 256);
  for (const auto& c : s.data) CHECK(std::abs(c) == 0.0);
}

TEST_CASE("bin-centered sinusoid concentrates energy, leakage below -30 dB") {
  const std::size_t wl = 512, hop = 256;
  const double fs = 24000.0;
  const std::size_t bin = 40;
  const double freq = double(bin) * fs / double(wl);
  AudioBuffer a;
  a.sample_rate = fs;
  a.samples.resize(1);
  a.samples[0].resize(8192);
  for (std::size_t t = 0; t < a.samples[0].size(); ++t)
    a.samples[0][t] = std::sin(kTwoPi * freq * double(t) / fs);
  Spectrogram s = stft(a, wl, hop);
  // interior frame, away from edge padding
  const std::size_t n = s.num_frames / 2;
  const double peak = std::abs(s.at(bin, n, 0));
  for (std::size_t f = 0; f < s.num_bins; ++f) {
    if (f + 3 >= bin && f <= bin + 3) continue;  // main lobe region
    CHECK(std::abs(s.at(f, n, 0)) < peak * std::pow(10.0, -30.0 / 20.0));
  }
}

TEST_CASE("stft-istft round trip on white noise under 1e-6 relative RMS") {
  AudioBuffer a = noise(3, 10000, 5);
  Spectrogram s = stft(a, 512, 256);
  AudioBuffer b = istft(s);
  REQUIRE(b.num_samples() == a.num_samples());
  for (std::size_t m = 0; m < 3; ++m) CHECK(rel_rms_error(a.samples[m], b.samples[m]) < 1e-6);
}

TEST_CASE("round trip at paper configuration: 24 kHz, 2048 window, 50% overlap") {
  AudioBuffer a;
  a.sample_rate = 24000.0;
  a.samples.resize(1);
  a.samples[0].resize(48000);
  // speech-like chirp sweeping 100 Hz .. 4 kHz
  for (std::size_t t = 0; t < a.samples[0].size(); ++t) {
    const double x = double(t) / 48000.0;
    a.samples[0][t] = 0.5 * std::sin(kTwoPi * (100.0 * x + 1950.0 * x * x) * 24000.0 / 24000.0);
  }
  Spectrogram s = stft(a, 2048, 1024);
  CHECK(s.num_bins == 1025);
  AudioBuffer b = istft(s);
  CHECK(rel_rms_error(a.samples[0], b.samples[0]) < 1e-6);
}

TEST_CASE("parseval per frame: windowed time energy equals spectrum energy") {
  const std::size_t wl = 256, hop = 128;
  AudioBuffer a = noise(1, 4000, 7);
  Spectrogram s = stft(a, wl, hop);
  const auto win = sqrt_hann_window(wl);

  // reconstruct the padded signal the stft saw
  std::vector<double> padded(wl / 2, 0.0);
  padded.insert(padded.end(), a.samples[0].begin(), a.samples[0].end());
  padded.resize(padded.size() + wl, 0.0);

  for (std::size_t n = 0; n < s.num_frames; n += 5) {
    double time_energy = 0.0;
    for (std::size_t i = 0; i < wl; ++i) {
      const double x = padded[n * hop + i] * win[i];
      time_energy += x * x;
    }
    double freq_energy = 0.0;
    for (std::size_t f = 0; f < s.num_bins; ++f) {
      const double w = (f == 0 || f == s.num_bins - 1) ? 1.0 : 2.0;  // one-sided
      freq_energy += w * std::norm(s.at(f, n, 0));
    }
    freq_energy /= double(wl);
    CHECK(time_energy == doctest::Approx(freq_energy).epsilon(1e-9));
  }
}

TEST_CASE("audio shorter than one window is rejected") {
  AudioBuffer a = noise(1, 100, 9);
  CHECK_THROWS_AS(stft(a, 512, 256), InvalidInput);
}

TEST_CASE("all-zero spectrogram inverts to silence") {
  AudioBuffer a = noise(1, 4000, 11);
  Spectrogram s = stft(a, 512, 256);
  for (auto& c : s.data) c = 0.0;
  AudioBuffer b = istft(s);
  for (double x : b.samples[0]) CHECK(x == 0.0);
}

TEST_CASE("sqrt-hann window satisfies COLA at 50% overlap") {
  const auto w = sqrt_hann_window(512);
  for (std::size_t i = 0; i < 256; ++i)
    CHECK(w[i] * w[i] + w[i + 256] * w[i + 256] == doctest::Approx(1.0).epsilon(1e-12));
}
