#include "movsep/separation.hpp"

#include <cmath>

#include "movsep/stft.hpp"

namespace movsep {

SeparationMasks wiener_masks(const std::vector<double>& shat, std::size_t num_bins,
                             std::size_t num_frames, std::size_t num_sources,
                             std::size_t fallback_source, double eps) {
  if (shat.size() != num_bins * num_frames * num_sources)
    throw InvalidInput("wiener_masks: shat size mismatch");
  SeparationMasks masks;
  masks.num_bins = num_bins;
  masks.num_frames = num_frames;
  masks.num_sources = num_sources;
  masks.m.assign(shat.size(), 0.0);
  for (std::size_t f = 0; f < num_bins; ++f)
    for (std::size_t n = 0; n < num_frames; ++n) {
      double denom = 0.0;
      for (std::size_t p = 0; p < num_sources; ++p)
        denom += shat[(p * num_bins + f) * num_frames + n];
      if (denom < eps) {
        masks.m[(fallback_source * num_bins + f) * num_frames + n] = 1.0;
      } else {
        for (std::size_t p = 0; p < num_sources; ++p)
          masks.m[(p * num_bins + f) * num_frames + n] =
              shat[(p * num_bins + f) * num_frames + n] / denom;
      }
    }
  return masks;
}

Spectrogram apply_mask(const Spectrogram& mixture, const SeparationMasks& masks, std::size_t p) {
  if (masks.num_bins != mixture.num_bins || masks.num_frames != mixture.num_frames)
    throw InvalidInput("apply_mask: dimension mismatch");
  Spectrogram out = mixture;
  for (std::size_t m = 0; m < mixture.num_channels; ++m)
    for (std::size_t n = 0; n < mixture.num_frames; ++n) {
      cplx* dst = out.frame(n, m);
      for (std::size_t f = 0; f < mixture.num_bins; ++f) dst[f] *= masks.at(f, n, p);
    }
  return out;
}

Spectrogram dsb(const Spectrogram& y, const SourceTrack* track, const ArrayGeometry& geom) {
  const std::size_t M = y.num_channels;
  Spectrogram out = y;
  out.num_channels = 1;
  out.resize();
  if (track && track->active.size() != y.num_frames)
    throw InvalidInput("dsb: trajectory/spectrogram frame count mismatch");

  for (std::size_t n = 0; n < y.num_frames; ++n) {
    cplx* dst = out.frame(n, 0);
    if (track && !track->active[n]) continue;  // inactive frames stay zero
    if (track) {
      const Vec3 k = unit_vector(track->azimuth[n]);
      for (std::size_t f = 0; f < y.num_bins; ++f) {
        const auto a = steering_vector(geom, k, y.bin_freq_rad(f));
        cplx acc(0.0, 0.0);
        for (std::size_t m = 0; m < M; ++m) acc += std::conj(a[m]) * y.at(f, n, m);
        dst[f] = acc / double(M);
      }
    } else {
      for (std::size_t f = 0; f < y.num_bins; ++f) {
        cplx acc(0.0, 0.0);
        for (std::size_t m = 0; m < M; ++m) acc += y.at(f, n, m);
        dst[f] = acc / double(M);
      }
    }
  }
  return out;
}

SeparationMasks ideal_ratio_mask(const std::vector<AudioBuffer>& references,
                                 const Spectrogram& mixture) {
  const std::size_t P = references.size();
  SeparationMasks masks;
  masks.num_bins = mixture.num_bins;
  masks.num_frames = mixture.num_frames;
  masks.num_sources = P;
  masks.m.assign(P * mixture.num_bins * mixture.num_frames, 0.0);

  std::vector<Spectrogram> specs;
  for (const auto& ref : references) {
    if (ref.num_samples() != mixture.num_samples)
      throw InvalidInput("ideal_ratio_mask: reference length mismatch");
    specs.push_back(stft(ref, mixture.window_length, mixture.hop));
  }
  for (std::size_t f = 0; f < mixture.num_bins; ++f)
    for (std::size_t n = 0; n < mixture.num_frames; ++n) {
      double denom = 0.0;
      for (std::size_t p = 0; p < P; ++p) denom += std::abs(specs[p].at(f, n, 0));
      if (denom <= 0.0) continue;
      for (std::size_t p = 0; p < P; ++p)
        masks.m[(p * mixture.num_bins + f) * mixture.num_frames + n] =
            std::abs(specs[p].at(f, n, 0)) / denom;
    }
  return masks;
}

}  // namespace movsep
