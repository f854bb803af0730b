#include "movsep/spatial_model.hpp"

#include <cmath>

#include "movsep/wgmm.hpp"

namespace movsep {

std::vector<cplx> MixtureScmTensor::dense(std::size_t f, std::size_t n) const {
  std::vector<cplx> x(num_channels * num_channels);
  const cplx* v = vec(f, n);
  for (std::size_t i = 0; i < num_channels; ++i)
    for (std::size_t j = 0; j < num_channels; ++j)
      x[i * num_channels + j] = v[i] * std::conj(v[j]);
  return x;
}

MixtureScmTensor mixture_scm(const Spectrogram& spec) {
  MixtureScmTensor scm;
  scm.num_bins = spec.num_bins;
  scm.num_frames = spec.num_frames;
  scm.num_channels = spec.num_channels;
  scm.sqrt_stft.resize(spec.num_bins * spec.num_frames * spec.num_channels);
  for (std::size_t n = 0; n < spec.num_frames; ++n)
    for (std::size_t m = 0; m < spec.num_channels; ++m) {
      const cplx* src = spec.frame(n, m);
      for (std::size_t f = 0; f < spec.num_bins; ++f) {
        const double mag = std::abs(src[f]);
        // |x|^(1/2) * sign(x); zero stays zero
        scm.vec(f, n)[m] = mag > 0.0 ? src[f] * (std::sqrt(mag) / mag) : cplx(0.0, 0.0);
      }
    }
  return scm;
}

SpatialWeightTensor restore_spatial_weights(const TrajectorySet& traj, const DirectionGrid& grid,
                                            const SpatialWeightOptions& opts) {
  if (opts.var_sum <= opts.var_max)
    throw InvalidInput("restore_spatial_weights: var_sum must exceed var_max");
  SpatialWeightTensor z;
  z.num_frames = traj.num_frames;
  z.num_directions = grid.size();
  z.num_sources = traj.tracks.size();
  z.has_background = false;
  z.z.assign(z.num_frames * z.num_sources * z.num_directions, 0.0);
  z.active.assign(z.num_frames * z.num_sources, 0);

  for (std::size_t p = 0; p < traj.tracks.size(); ++p) {
    const auto& track = traj.tracks[p];
    for (std::size_t n = 0; n < traj.num_frames; ++n) {
      if (!track.active[n]) continue;
      const double state_var = track.state_var[n];
      if (!std::isfinite(state_var))
        throw InvalidInput("restore_spatial_weights: non-finite trajectory variance");
      const double clamped = std::clamp(state_var, opts.var_min, opts.var_max);
      const double window_var = opts.var_sum - clamped;
      double sum = 0.0;
      for (std::size_t d = 0; d < grid.size(); ++d) {
        const double w = wrapped_gaussian_pdf(grid.azimuths[d], track.azimuth[n], window_var);
        z.at(n, d, p) = w;
        sum += w;
      }
      for (std::size_t d = 0; d < grid.size(); ++d) z.at(n, d, p) /= sum;
      z.active[n * z.num_sources + p] = 1;
    }
  }
  return z;
}

SpatialWeightTensor add_background_source(const SpatialWeightTensor& tracked, double threshold) {
  if (tracked.has_background)
    throw InvalidInput("add_background_source: background already present");
  SpatialWeightTensor z;
  z.num_frames = tracked.num_frames;
  z.num_directions = tracked.num_directions;
  z.num_sources = tracked.num_sources + 1;
  z.has_background = true;
  z.z.assign(z.num_frames * z.num_sources * z.num_directions, 0.0);
  z.active.assign(z.num_frames * z.num_sources, 0);

  const std::size_t bg = tracked.num_sources;
  for (std::size_t n = 0; n < z.num_frames; ++n) {
    for (std::size_t p = 0; p < tracked.num_sources; ++p) {
      for (std::size_t d = 0; d < z.num_directions; ++d)
        z.at(n, d, p) = tracked.at(n, d, p);
      z.active[n * z.num_sources + p] = tracked.active[n * tracked.num_sources + p];
    }
    std::size_t below = 0;
    for (std::size_t d = 0; d < z.num_directions; ++d) {
      double sum = 0.0;
      for (std::size_t p = 0; p < tracked.num_sources; ++p) sum += tracked.at(n, d, p);
      if (sum < threshold) {
        z.at(n, d, bg) = 1.0;
        ++below;
      }
    }
    if (below > 0) {
      for (std::size_t d = 0; d < z.num_directions; ++d) z.at(n, d, bg) /= double(below);
      z.active[n * z.num_sources + bg] = 1;
    }
  }
  return z;
}

std::vector<cplx> source_scm_dense(const SpatialWeightTensor& z, const DoaKernelSet& kernels,
                                   std::size_t f, std::size_t n, std::size_t p) {
  const std::size_t M = kernels.num_mics();
  std::vector<cplx> h(M * M, cplx(0.0, 0.0));
  for (std::size_t d = 0; d < z.num_directions; ++d) {
    const double w = z.at(n, d, p);
    if (w == 0.0) continue;
    const cplx* a = kernels.steering(f, d);
    for (std::size_t i = 0; i < M; ++i)
      for (std::size_t j = 0; j < M; ++j) h[i * M + j] += w * a[i] * std::conj(a[j]);
  }
  return h;
}

}  // namespace movsep
