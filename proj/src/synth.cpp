#include "movsep/synth.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "movsep/stft.hpp"
#include "movsep/wav.hpp"

namespace movsep {

void SceneSpec::validate(std::size_t window_length, std::size_t /*hop*/) const {
  if (duration_s <= 0.0) throw InvalidInput("scene: duration must be > 0");
  if (sample_rate <= 0.0) throw InvalidInput("scene: sample_rate must be > 0");
  if (sources.empty()) throw InvalidInput("scene: need at least one source");
  const double frame_s = double(window_length) / sample_rate;
  for (const auto& s : sources)
    if (std::abs(s.angular_velocity) * frame_s >= kPi)
      throw InvalidInput("scene: angular velocity exceeds pi per frame");
}

namespace {

double deg2rad(double d) { return d * kPi / 180.0; }

std::vector<ActivitySegment> parse_segments(const std::string& value) {
  std::vector<ActivitySegment> segs;
  std::istringstream ss(value);
  std::string part;
  while (std::getline(ss, part, ',')) {
    auto colon = part.find(':');
    if (colon == std::string::npos) throw InvalidInput("scene: bad activity segment: " + part);
    segs.push_back({std::stod(part.substr(0, colon)), std::stod(part.substr(colon + 1))});
  }
  return segs;
}

}  // namespace

SceneSpec parse_scene(const std::string& text) {
  SceneSpec scene;
  std::map<int, SceneSource> sources;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    auto trim = [](std::string& s) {
      s.erase(0, s.find_first_not_of(" \t\r"));
      s.erase(s.find_last_not_of(" \t\r") + 1);
    };
    trim(key);
    trim(value);
    if (key.empty()) continue;
    if (key == "duration") scene.duration_s = std::stod(value);
    else if (key == "sample_rate") scene.sample_rate = std::stod(value);
    else if (key == "noise_snr_db") scene.noise_snr_db = std::stod(value);
    else if (key == "seed") scene.seed = std::stoull(value);
    else if (key.rfind("source.", 0) == 0) {
      auto dot = key.find('.', 7);
      if (dot == std::string::npos) throw InvalidInput("scene: bad source key: " + key);
      const int idx = std::stoi(key.substr(7, dot - 7));
      const std::string field = key.substr(dot + 1);
      auto& src = sources[idx];
      if (field == "signal") {
        if (value == "noise_bursts") src.signal = SourceSignal::NoiseBursts;
        else if (value == "tones") src.signal = SourceSignal::ToneComplex;
        else if (value.rfind("wav:", 0) == 0) {
          src.signal = SourceSignal::WavFile;
          src.wav_path = value.substr(4);
        } else throw InvalidInput("scene: unknown signal type: " + value);
      } else if (field == "start_deg") src.start_azimuth_rad = deg2rad(std::stod(value));
      else if (field == "velocity_dps") src.angular_velocity = deg2rad(std::stod(value));
      else if (field == "f0") src.fundamental_hz = std::stod(value);
      else if (field == "gain") src.gain = std::stod(value);
      else if (field == "active") src.activity = parse_segments(value);
      else throw InvalidInput("scene: unknown source field: " + field);
    } else {
      throw InvalidInput("scene: unknown key: " + key);
    }
  }
  for (auto& [idx, src] : sources) scene.sources.push_back(src);
  return scene;
}

SceneSpec read_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open scene file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scene(ss.str());
}

void write_scene(const std::string& path, const SceneSpec& scene) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write scene file: " + path);
  out.precision(12);
  out << "duration = " << scene.duration_s << "\n";
  out << "sample_rate = " << scene.sample_rate << "\n";
  if (scene.noise_snr_db < 1e9) out << "noise_snr_db = " << scene.noise_snr_db << "\n";
  out << "seed = " << scene.seed << "\n";
  for (std::size_t i = 0; i < scene.sources.size(); ++i) {
    const auto& s = scene.sources[i];
    const std::string prefix = "source." + std::to_string(i + 1) + ".";
    out << prefix << "signal = "
        << (s.signal == SourceSignal::NoiseBursts ? "noise_bursts"
            : s.signal == SourceSignal::ToneComplex ? "tones"
                                                    : "wav:" + s.wav_path)
        << "\n";
    out << prefix << "start_deg = " << s.start_azimuth_rad * 180.0 / kPi << "\n";
    out << prefix << "velocity_dps = " << s.angular_velocity * 180.0 / kPi << "\n";
    if (s.signal == SourceSignal::ToneComplex) out << prefix << "f0 = " << s.fundamental_hz << "\n";
    if (s.gain != 1.0) out << prefix << "gain = " << s.gain << "\n";
    if (!s.activity.empty()) {
      out << prefix << "active = ";
      for (std::size_t j = 0; j < s.activity.size(); ++j)
        out << (j ? "," : "") << s.activity[j].start_s << ":" << s.activity[j].end_s;
      out << "\n";
    }
  }
}

namespace {

std::vector<double> generate_signal(const SceneSource& src, double sample_rate, std::size_t length,
                                    std::uint64_t seed) {
  std::vector<double> sig(length, 0.0);
  std::mt19937_64 rng(seed);
  if (src.signal == SourceSignal::NoiseBursts) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> on_len(0.4, 0.8), off_len(0.08, 0.2);
    // speech-shaped noise via one-pole lowpass
    double state = 0.0;
    const double pole = 0.9;
    for (auto& x : sig) {
      state = pole * state + (1.0 - pole) * gauss(rng);
      x = state;
    }
    // burst envelope with 20 ms raised-cosine ramps
    const std::size_t ramp = std::size_t(0.02 * sample_rate);
    std::size_t pos = 0;
    bool on = true;
    while (pos < length) {
      const std::size_t seg = std::size_t((on ? on_len(rng) : off_len(rng)) * sample_rate);
      if (!on)
        for (std::size_t i = pos; i < std::min(pos + seg, length); ++i) sig[i] = 0.0;
      else {
        for (std::size_t i = 0; i < ramp && pos + i < length; ++i)
          sig[pos + i] *= 0.5 * (1.0 - std::cos(kPi * double(i) / double(ramp)));
        for (std::size_t i = 0; i < ramp && pos + seg > ramp + i && pos + seg - ramp + i < length;
             ++i)
          sig[pos + seg - ramp + i] *= 0.5 * (1.0 + std::cos(kPi * double(i) / double(ramp)));
      }
      pos += seg;
      on = !on;
    }
  } else if (src.signal == SourceSignal::ToneComplex) {
    std::uniform_real_distribution<double> phase(0.0, kTwoPi);
    for (int h = 1;; ++h) {
      const double ph = phase(rng);
      const double amp = 1.0 / double(h);
      const double w = kTwoPi * src.fundamental_hz * double(h) / sample_rate;
      if (w >= kPi) break;
      for (std::size_t i = 0; i < length; ++i) sig[i] += amp * std::sin(w * double(i) + ph);
    }
  } else {
    AudioBuffer wav = read_wav(src.wav_path);
    if (std::abs(wav.sample_rate - sample_rate) > 0.5)
      throw InvalidInput("scene: WAV sample rate mismatch (no resampling): " + src.wav_path);
    for (std::size_t i = 0; i < length && i < wav.num_samples(); ++i) sig[i] = wav.samples[0][i];
  }

  // activity gating with 10 ms ramps
  if (!src.activity.empty()) {
    std::vector<double> env(length, 0.0);
    const double ramp_s = 0.01;
    for (const auto& seg : src.activity) {
      for (std::size_t i = 0; i < length; ++i) {
        const double t = double(i) / sample_rate;
        double g = 0.0;
        if (t >= seg.start_s && t <= seg.end_s) {
          g = 1.0;
          if (t < seg.start_s + ramp_s) g = 0.5 * (1.0 - std::cos(kPi * (t - seg.start_s) / ramp_s));
          if (t > seg.end_s - ramp_s) g = std::min(g, 0.5 * (1.0 - std::cos(kPi * (seg.end_s - t) / ramp_s)));
        }
        env[i] = std::max(env[i], g);
      }
    }
    for (std::size_t i = 0; i < length; ++i) sig[i] *= env[i];
  }

  // normalize active RMS, then apply gain
  double energy = 0.0;
  std::size_t nonzero = 0;
  for (double x : sig) {
    energy += x * x;
    if (x != 0.0) ++nonzero;
  }
  if (nonzero > 0) {
    const double rms = std::sqrt(energy / double(nonzero));
    const double scale = rms > 0.0 ? 0.1 / rms : 0.0;
    for (auto& x : sig) x *= scale * src.gain;
  }
  return sig;
}

}  // namespace

SynthResult synthesize(const SceneSpec& scene, const ArrayGeometry& geom,
                       std::size_t window_length, std::size_t hop) {
  scene.validate(window_length, hop);
  geom.validate();
  const std::size_t T = std::size_t(scene.duration_s * scene.sample_rate);
  const std::size_t M = geom.num_mics();

  SynthResult result;
  Spectrogram mix_spec;
  std::vector<Spectrogram> ref_specs;
  std::vector<std::vector<double>> azimuths;  // [source][frame]

  for (std::size_t p = 0; p < scene.sources.size(); ++p) {
    const auto& src = scene.sources[p];
    AudioBuffer mono;
    mono.sample_rate = scene.sample_rate;
    mono.samples.push_back(generate_signal(src, scene.sample_rate, T, scene.seed + 1000 * p));
    Spectrogram s = stft(mono, window_length, hop);

    if (p == 0) {
      mix_spec = s;
      mix_spec.num_channels = M;
      mix_spec.resize();
    }

    Spectrogram ref = s;  // channel-1 image
    std::vector<double> az(s.num_frames);
    for (std::size_t n = 0; n < s.num_frames; ++n) {
      const double theta =
          wrap_angle(src.start_azimuth_rad + src.angular_velocity * s.frame_time(n));
      az[n] = theta;
      const Vec3 k = unit_vector(theta);
      const cplx* frame = s.frame(n, 0);
      for (std::size_t f = 0; f < s.num_bins; ++f) {
        const auto a = steering_vector(geom, k, s.bin_freq_rad(f));
        for (std::size_t m = 0; m < M; ++m) mix_spec.at(f, n, m) += frame[f] * a[m];
        ref.frame(n, 0)[f] = frame[f] * a[0];
      }
    }
    ref_specs.push_back(std::move(ref));
    azimuths.push_back(std::move(az));
  }

  result.mixture = istft(mix_spec);
  for (auto& rs : ref_specs) result.references.push_back(istft(rs));

  if (scene.noise_snr_db < 1e9) {
    std::mt19937_64 rng(scene.seed ^ 0x9e3779b97f4a7c15ull);
    std::normal_distribution<double> gauss(0.0, 1.0);
    double sig_energy = 0.0;
    for (const auto& ch : result.mixture.samples)
      for (double x : ch) sig_energy += x * x;
    const double sig_power = sig_energy / double(M * result.mixture.num_samples());
    const double noise_std = std::sqrt(sig_power * std::pow(10.0, -scene.noise_snr_db / 10.0));
    for (auto& ch : result.mixture.samples)
      for (double& x : ch) x += noise_std * gauss(rng);
  }

  // Ground truth trajectories and VAD.
  const std::size_t N = mix_spec.num_frames;
  result.ground_truth.num_frames = N;
  result.ground_truth.frame_hop_s = double(hop) / scene.sample_rate;
  result.vad.active.resize(scene.sources.size());
  for (std::size_t p = 0; p < scene.sources.size(); ++p) {
    const auto& src = scene.sources[p];
    SourceTrack track;
    track.id = int(p);
    track.active.assign(N, 0);
    track.azimuth = azimuths[p];
    track.state_var.assign(N, 0.025);  // annotations carry full certainty

    // frame-level VAD from reference frame energy
    auto& vad = result.vad.active[p];
    vad.assign(N, 0);
    double max_energy = 0.0;
    std::vector<double> frame_energy(N, 0.0);
    for (std::size_t n = 0; n < N; ++n) {
      double e = 0.0;
      const cplx* frame = ref_specs[p].frame(n, 0);
      for (std::size_t f = 0; f < ref_specs[p].num_bins; ++f) e += std::norm(frame[f]);
      frame_energy[n] = e;
      max_energy = std::max(max_energy, e);
    }
    for (std::size_t n = 0; n < N; ++n) {
      vad[n] = max_energy > 0.0 && frame_energy[n] > 1e-6 * max_energy ? 1 : 0;
      const double t = result.ground_truth.frame_hop_s * double(n);
      bool in_segment = src.activity.empty();
      for (const auto& seg : src.activity)
        if (t >= seg.start_s && t <= seg.end_s) in_segment = true;
      track.active[n] = in_segment ? 1 : 0;
    }
    result.ground_truth.tracks.push_back(std::move(track));
  }
  return result;
}

}  // namespace movsep
