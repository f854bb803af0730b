#pragma once

#include "movsep/types.hpp"

namespace movsep {

/// Forward STFT with a periodic square-root Hann window. One-sided spectra,
/// half-window zero padding at both edges so frame n is centered at sample
/// n*hop of the input.
Spectrogram stft(const AudioBuffer& audio, std::size_t window_length, std::size_t hop);

/// Inverse STFT: per-frame inverse DFT, square-root Hann synthesis window,
/// overlap-add. Round-trips stft() within 1e-6 relative RMS.
AudioBuffer istft(const Spectrogram& spec);

/// The analysis window used by stft()/istft().
std::vector<double> sqrt_hann_window(std::size_t length);

}  // namespace movsep
