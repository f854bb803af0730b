#pragma once

#include "movsep/geometry.hpp"
#include "movsep/types.hpp"
#include "movsep/wgmm.hpp"

namespace movsep {

/// SRP-PHAT spatial energy over (direction, frame). After rectification and
/// 3/2 exponentiation all entries are nonnegative.
struct SrpMap {
  std::size_t num_directions = 0;
  std::size_t num_frames = 0;
  std::vector<double> energy;  // [n][d]

  double& at(std::size_t d, std::size_t n) { return energy[n * num_directions + d]; }
  double at(std::size_t d, std::size_t n) const { return energy[n * num_directions + d]; }
  std::vector<double> frame(std::size_t n) const {
    return {energy.begin() + std::ptrdiff_t(n * num_directions),
            energy.begin() + std::ptrdiff_t((n + 1) * num_directions)};
  }
  std::size_t argmax(std::size_t n) const;
};

struct SrpOptions {
  double phat_guard = 1e-12;  // skip bins with cross-spectrum magnitude below this
  double exponent = 1.5;      // peak enhancement; negative SRP clipped to 0 first
};

/// Steered response power with PHAT weighting, rectified at zero and
/// exponentiated. Parallel over frames.
SrpMap srp_phat(const Spectrogram& spec, const DoaKernelSet& kernels,
                const SrpOptions& opts = {}, Exec exec = Exec::Parallel);

/// One surviving DOA measurement: wrapped mean, variance, mixture weight.
struct DoaMeasurement {
  double mean = 0.0;   // radians in [-pi, pi)
  double var = 0.0;    // radians^2
  double weight = 0.0;
};

/// Per-frame measurements after WGMM fitting and thresholded removal.
struct DoaMeasurementSet {
  std::vector<std::vector<DoaMeasurement>> frames;  // [n][k]
  double frame_hop_s = 0.0;
};

struct MeasurementOptions {
  std::size_t num_components = 5;   // K
  double sigma_max_rad = 0.6;       // discard if sqrt(var) > this
  double weight_min = 0.15;         // discard if weight < this
  double init_var = 0.25;           // first-frame initialization
  double silence_mass = 1e-9;       // histogram mass below this => silent frame
  int em_max_iter = 50;
  double em_tol = 1e-6;
};

/// Fits a WGMM per frame (warm-started from the previous frame) and discards
/// broad or weak components. Silent frames yield empty measurement lists.
DoaMeasurementSet extract_measurements(const SrpMap& srp, const DirectionGrid& grid,
                                       double frame_hop_s, const MeasurementOptions& opts = {});

}  // namespace movsep
