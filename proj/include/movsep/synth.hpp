#pragma once

#include <cstdint>
#include <string>

#include "movsep/eval.hpp"
#include "movsep/geometry.hpp"
#include "movsep/tracker.hpp"
#include "movsep/types.hpp"

namespace movsep {

enum class SourceSignal { NoiseBursts, ToneComplex, WavFile };

struct ActivitySegment {
  double start_s = 0.0;
  double end_s = 0.0;
};

struct SceneSource {
  SourceSignal signal = SourceSignal::NoiseBursts;
  std::string wav_path;              // when signal == WavFile
  double start_azimuth_rad = 0.0;
  double angular_velocity = 0.0;     // rad/s, sign gives CW/CCW
  double fundamental_hz = 220.0;     // tone complex only
  double gain = 1.0;
  std::vector<ActivitySegment> activity;  // empty = active throughout
};

struct SceneSpec {
  double duration_s = 10.0;
  double sample_rate = 24000.0;
  double noise_snr_db = 1e9;  // diffuse white noise; >= 1e9 disables
  std::uint64_t seed = 1;
  std::vector<SceneSource> sources;

  void validate(std::size_t window_length, std::size_t hop) const;
};

/// Scene file parsing: flat `key = value` text, `#` comments.
SceneSpec parse_scene(const std::string& text);
SceneSpec read_scene(const std::string& path);
void write_scene(const std::string& path, const SceneSpec& scene);

struct SynthResult {
  AudioBuffer mixture;                    // M channels
  std::vector<AudioBuffer> references;    // per source, channel-1 image
  TrajectorySet ground_truth;             // per-frame azimuth + activity
  VadFlags vad;
};

/// Anechoic moving-source renderer: per STFT frame each source's spectrum is
/// steered to its current direction (frame-wise frozen mixing), sources are
/// summed per channel and inverse-transformed. Deterministic per seed.
SynthResult synthesize(const SceneSpec& scene, const ArrayGeometry& geom,
                       std::size_t window_length, std::size_t hop);

}  // namespace movsep
