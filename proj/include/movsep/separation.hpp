#pragma once

#include "movsep/geometry.hpp"
#include "movsep/mnmf.hpp"
#include "movsep/tracker.hpp"
#include "movsep/types.hpp"

namespace movsep {

/// Soft masks m_fnp in [0,1], layout [p][f][n]; masks sum to 1 over p
/// wherever the source magnitudes do not all vanish.
struct SeparationMasks {
  std::size_t num_bins = 0;
  std::size_t num_frames = 0;
  std::size_t num_sources = 0;
  std::vector<double> m;  // [p][f][n]

  double at(std::size_t f, std::size_t n, std::size_t p) const {
    return m[(p * num_bins + f) * num_frames + n];
  }
};

/// Generalized Wiener masks from source magnitude estimates (layout [p][f][n],
/// as produced by source_spectrograms). Where the summed magnitude underflows,
/// the mask is assigned to `fallback_source` (the background).
SeparationMasks wiener_masks(const std::vector<double>& shat, std::size_t num_bins,
                             std::size_t num_frames, std::size_t num_sources,
                             std::size_t fallback_source, double eps = 1e-12);

/// Per-source masked multichannel spectrogram: y_fnmp = m_fnp * x_fnm.
Spectrogram apply_mask(const Spectrogram& mixture, const SeparationMasks& masks, std::size_t p);

/// Delay-and-sum beamformer toward the tracked azimuth per frame:
/// out_fn = (a/M)^H y_fn. Frames where the track is inactive output zero.
/// With track == nullptr (background), plain channel averaging.
Spectrogram dsb(const Spectrogram& y, const SourceTrack* track, const ArrayGeometry& geom);

/// Oracle ideal-ratio masks from reference source signals (single channel
/// each), STFT'd with the mixture's analysis parameters.
SeparationMasks ideal_ratio_mask(const std::vector<AudioBuffer>& references,
                                 const Spectrogram& mixture);

}  // namespace movsep
