#pragma once

#include <array>
#include <string>

#include "movsep/types.hpp"

namespace movsep {

using Vec3 = std::array<double, 3>;

/// Microphone array layout. TDOAs depend only on position differences;
/// the coordinate origin acts as the beamforming phase center.
struct ArrayGeometry {
  std::vector<Vec3> mic_positions;  // meters
  double speed_of_sound = 343.0;

  std::size_t num_mics() const { return mic_positions.size(); }
  void validate() const;
};

/// Parses a plain-text geometry file: `mic.<i> = x y z` (meters) per line,
/// optional `speed_of_sound = <m/s>`, `#` comments.
ArrayGeometry read_geometry(const std::string& path);
ArrayGeometry parse_geometry(const std::string& text);
void write_geometry(const std::string& path, const ArrayGeometry& geom);

/// Compact four-mic diamond layout, mic 1 at the origin / phase center.
ArrayGeometry default_geometry();

/// Uniform azimuth grid on the zero-elevation plane, D directions over [0, 2pi).
struct DirectionGrid {
  std::vector<double> azimuths;  // radians, strictly increasing

  static DirectionGrid uniform(std::size_t count);
  std::size_t size() const { return azimuths.size(); }
  Vec3 direction(std::size_t d) const {
    return {std::cos(azimuths[d]), std::sin(azimuths[d]), 0.0};
  }
  /// Index of the grid azimuth closest to `theta` (wrapped).
  std::size_t nearest(double theta) const;
};

Vec3 unit_vector(double azimuth);

/// TDOA between mics m1 and m2 for a far-field source at unit direction k:
/// tau = -k.(p1 - p2) / v.
double tdoa(const ArrayGeometry& geom, const Vec3& k, std::size_t m1, std::size_t m2);

/// Arrival-phase steering vector at angular frequency omega (rad/s):
/// a_m = exp(j*omega*k.p_m/v). A plane wave from direction k observed by the
/// array has channel phases proportional to a, so W = a*a^H is that wave's
/// rank-1 spatial covariance signature.
std::vector<cplx> steering_vector(const ArrayGeometry& geom, const Vec3& k, double omega);

/// DOA kernels for all (f, d): rank-1 Hermitian unit-modulus matrices
/// W_fd = a_fd a_fd^H. Stored via the generating steering vectors.
class DoaKernelSet {
 public:
  DoaKernelSet(const ArrayGeometry& geom, const DirectionGrid& grid, std::size_t num_bins,
               std::size_t window_length, double sample_rate);

  std::size_t num_bins() const { return num_bins_; }
  std::size_t num_directions() const { return grid_.size(); }
  std::size_t num_mics() const { return num_mics_; }
  const DirectionGrid& grid() const { return grid_; }
  const ArrayGeometry& geometry() const { return geom_; }

  /// Steering vector a for (f, d); length M, contiguous.
  const cplx* steering(std::size_t f, std::size_t d) const {
    return steer_.data() + (f * grid_.size() + d) * num_mics_;
  }
  /// Kernel entry [W_fd]_{m1,m2} = a_m1 * conj(a_m2).
  cplx entry(std::size_t f, std::size_t d, std::size_t m1, std::size_t m2) const {
    const cplx* a = steering(f, d);
    return a[m1] * std::conj(a[m2]);
  }
  /// Dense M x M kernel, row-major.
  std::vector<cplx> dense(std::size_t f, std::size_t d) const;

 private:
  ArrayGeometry geom_;
  DirectionGrid grid_;
  std::size_t num_bins_;
  std::size_t num_mics_;
  std::vector<cplx> steer_;  // [f][d][m]
};

}  // namespace movsep
