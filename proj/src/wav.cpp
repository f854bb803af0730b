#include "movsep/wav.hpp"

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace movsep {

namespace {

uint32_t rd_u32(const uint8_t* p) {
  return uint32_t(p[0]) | uint32_t(p[1]) << 8 | uint32_t(p[2]) << 16 | uint32_t(p[3]) << 24;
}
uint16_t rd_u16(const uint8_t* p) { return uint16_t(p[0]) | uint16_t(p[1]) << 8; }

void wr_u32(std::vector<uint8_t>& b, uint32_t v) {
  b.push_back(v & 0xff);
  b.push_back((v >> 8) & 0xff);
  b.push_back((v >> 16) & 0xff);
  b.push_back((v >> 24) & 0xff);
}
void wr_u16(std::vector<uint8_t>& b, uint16_t v) {
  b.push_back(v & 0xff);
  b.push_back((v >> 8) & 0xff);
}

}  // namespace

AudioBuffer read_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open WAV file: " + path);
  std::vector<uint8_t> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (raw.size() < 44 || std::memcmp(raw.data(), "RIFF", 4) != 0 ||
      std::memcmp(raw.data() + 8, "WAVE", 4) != 0)
    throw InvalidInput("not a RIFF/WAVE file: " + path);

  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t sample_rate = 0;
  const uint8_t* data = nullptr;
  uint32_t data_size = 0;

  std::size_t pos = 12;
  while (pos + 8 <= raw.size()) {
    uint32_t chunk_size = rd_u32(raw.data() + pos + 4);
    const uint8_t* body = raw.data() + pos + 8;
    if (pos + 8 + chunk_size > raw.size()) chunk_size = uint32_t(raw.size() - pos - 8);
    if (std::memcmp(raw.data() + pos, "fmt ", 4) == 0 && chunk_size >= 16) {
      format = rd_u16(body);
      channels = rd_u16(body + 2);
      sample_rate = rd_u32(body + 4);
      bits = rd_u16(body + 14);
      if (format == 0xfffe && chunk_size >= 40) format = rd_u16(body + 24);  // extensible
    } else if (std::memcmp(raw.data() + pos, "data", 4) == 0) {
      data = body;
      data_size = chunk_size;
    }
    pos += 8 + chunk_size + (chunk_size & 1);
  }
  if (!data || channels == 0 || sample_rate == 0)
    throw InvalidInput("malformed WAV file: " + path);

  std::size_t bytes_per_sample = bits / 8;
  if (!((format == 1 && (bits == 16 || bits == 24)) || (format == 3 && bits == 32)))
    throw InvalidInput("unsupported WAV format (need PCM16/24 or float32): " + path);

  std::size_t num_frames = data_size / (bytes_per_sample * channels);
  AudioBuffer audio;
  audio.sample_rate = double(sample_rate);
  audio.samples.assign(channels, std::vector<double>(num_frames));
  for (std::size_t i = 0; i < num_frames; ++i) {
    for (std::size_t c = 0; c < channels; ++c) {
      const uint8_t* p = data + (i * channels + c) * bytes_per_sample;
      double v = 0.0;
      if (format == 1 && bits == 16) {
        int16_t s = int16_t(rd_u16(p));
        v = double(s) / 32768.0;
      } else if (format == 1 && bits == 24) {
        int32_t s = int32_t(uint32_t(p[0]) << 8 | uint32_t(p[1]) << 16 | uint32_t(p[2]) << 24) >> 8;
        v = double(s) / 8388608.0;
      } else {
        float f;
        std::memcpy(&f, p, 4);
        v = double(f);
      }
      audio.samples[c][i] = v;
    }
  }
  return audio;
}

void write_wav(const std::string& path, const AudioBuffer& audio, WavFormat format) {
  audio.validate();
  const std::size_t channels = audio.num_channels();
  const std::size_t num_frames = audio.num_samples();
  const std::size_t bps = format == WavFormat::Pcm16 ? 2 : format == WavFormat::Pcm24 ? 3 : 4;
  const uint16_t fmt_code = format == WavFormat::Float32 ? 3 : 1;

  std::vector<uint8_t> out;
  out.reserve(44 + num_frames * channels * bps);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  wr_u32(out, uint32_t(36 + num_frames * channels * bps));
  out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  wr_u32(out, 16);
  wr_u16(out, fmt_code);
  wr_u16(out, uint16_t(channels));
  wr_u32(out, uint32_t(audio.sample_rate));
  wr_u32(out, uint32_t(audio.sample_rate * channels * bps));
  wr_u16(out, uint16_t(channels * bps));
  wr_u16(out, uint16_t(bps * 8));
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  wr_u32(out, uint32_t(num_frames * channels * bps));

  for (std::size_t i = 0; i < num_frames; ++i) {
    for (std::size_t c = 0; c < channels; ++c) {
      double v = audio.samples[c][i];
      if (format == WavFormat::Pcm16) {
        double clipped = std::clamp(v, -1.0, 32767.0 / 32768.0);
        int16_t s = int16_t(std::lround(clipped * 32768.0));
        wr_u16(out, uint16_t(s));
      } else if (format == WavFormat::Pcm24) {
        double clipped = std::clamp(v, -1.0, 8388607.0 / 8388608.0);
        int32_t s = int32_t(std::lround(clipped * 8388608.0));
        out.push_back(s & 0xff);
        out.push_back((s >> 8) & 0xff);
        out.push_back((s >> 16) & 0xff);
      } else {
        float f = float(v);
        uint32_t u;
        std::memcpy(&u, &f, 4);
        wr_u32(out, u);
      }
    }
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InvalidInput("cannot write WAV file: " + path);
  os.write(reinterpret_cast<const char*>(out.data()), std::streamsize(out.size()));
}

}  // namespace movsep
