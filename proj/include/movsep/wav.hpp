#pragma once

#include <string>

#include "movsep/types.hpp"

namespace movsep {

enum class WavFormat { Pcm16, Pcm24, Float32 };

/// Reads a RIFF/WAVE file. Supports PCM 16/24-bit and IEEE float 32-bit.
AudioBuffer read_wav(const std::string& path);

/// Writes a RIFF/WAVE file. Float32 round-trips sample-exact.
void write_wav(const std::string& path, const AudioBuffer& audio,
               WavFormat format = WavFormat::Float32);

}  // namespace movsep
