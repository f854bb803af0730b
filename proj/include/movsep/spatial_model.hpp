#pragma once

#include "movsep/geometry.hpp"
#include "movsep/tracker.hpp"
#include "movsep/types.hpp"

namespace movsep {

/// Rank-1 mixture spatial covariance tensor, stored via its generating
/// square-root-magnitude vectors: X_fn = xhat_fn xhat_fn^H with
/// xhat_m = |x_m|^(1/2) sign(x_m). Diagonals of X equal the per-channel
/// magnitude spectrogram.
struct MixtureScmTensor {
  std::size_t num_bins = 0;
  std::size_t num_frames = 0;
  std::size_t num_channels = 0;
  std::vector<cplx> sqrt_stft;  // [n][f][m]

  const cplx* vec(std::size_t f, std::size_t n) const {
    return sqrt_stft.data() + (n * num_bins + f) * num_channels;
  }
  cplx* vec(std::size_t f, std::size_t n) {
    return sqrt_stft.data() + (n * num_bins + f) * num_channels;
  }
  /// Dense M x M SCM, row-major.
  std::vector<cplx> dense(std::size_t f, std::size_t n) const;
};

MixtureScmTensor mixture_scm(const Spectrogram& spec);

/// Nonnegative direction weights z over (frame, direction, source). The last
/// source index is the background once add_background_source() has run.
struct SpatialWeightTensor {
  std::size_t num_frames = 0;
  std::size_t num_directions = 0;
  std::size_t num_sources = 0;  // tracked sources (+1 background when added)
  bool has_background = false;
  std::vector<double> z;                    // [n][p][d]
  std::vector<std::uint8_t> active;         // [n][p]

  double& at(std::size_t n, std::size_t d, std::size_t p) {
    return z[(n * num_sources + p) * num_directions + d];
  }
  double at(std::size_t n, std::size_t d, std::size_t p) const {
    return z[(n * num_sources + p) * num_directions + d];
  }
  const double* row(std::size_t n, std::size_t p) const {
    return z.data() + (n * num_sources + p) * num_directions;
  }
  bool is_active(std::size_t n, std::size_t p) const { return active[n * num_sources + p] != 0; }
};

struct SpatialWeightOptions {
  double var_min = 0.025;
  double var_max = 0.3;
  double var_sum = 0.325;  // c = var_min + var_max; spatial window var = c - clamp(state var)
  double background_threshold = 0.01;  // T
};

/// Maps tracker trajectories to per-frame direction weights: the spatial
/// window narrows as tracker uncertainty grows (var_sum - clamped variance),
/// wrapped-Gaussian shaped, l1-normalized per active (frame, source).
SpatialWeightTensor restore_spatial_weights(const TrajectorySet& traj, const DirectionGrid& grid,
                                            const SpatialWeightOptions& opts = {});

/// Appends the background source: weight 1 where the tracked sources' summed
/// weight is below the threshold, zero otherwise, l1-normalized per frame.
SpatialWeightTensor add_background_source(const SpatialWeightTensor& tracked,
                                          double threshold = 0.01);

/// Dense source SCM H_fnp = sum_d W_fd z_ndp (row-major M x M). Used by tests
/// and tiny instances; the optimization path works from z and W directly.
std::vector<cplx> source_scm_dense(const SpatialWeightTensor& z, const DoaKernelSet& kernels,
                                   std::size_t f, std::size_t n, std::size_t p);

}  // namespace movsep
