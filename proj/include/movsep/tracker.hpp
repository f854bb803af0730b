#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>

#include "movsep/localization.hpp"
#include "movsep/types.hpp"

namespace movsep {

/// Unit-circle state [x, y, xdot, ydot] with covariance.
struct TargetState {
  Eigen::Vector4d mean = Eigen::Vector4d::Zero();
  Eigen::Matrix4d cov = Eigen::Matrix4d::Identity();

  double azimuth() const { return std::atan2(mean[1], mean[0]); }
  /// Trace of the positional covariance block.
  double position_var() const { return cov(0, 0) + cov(1, 1); }
};

/// Constant-velocity prediction: mean <- A s, cov <- A P A^T + q I.
TargetState kalman_predict(const TargetState& state, double dt, double process_noise_var);

struct KalmanUpdateResult {
  TargetState state;
  double likelihood = 0.0;  // predictive density of the measurement point
};

/// Rotating-vector measurement update: m = [cos mu, sin mu], noise
/// meas_var * I, Joseph-form covariance update. Returns the Gaussian
/// predictive density of m under the prior state.
KalmanUpdateResult kalman_update(const TargetState& state, double meas_angle, double meas_var);

/// Regularized lower incomplete gamma CDF with shape alpha and rate beta.
double gamma_cdf(double x, double alpha, double beta);

struct TrackerConfig {
  int num_particles = 100;
  double clutter_prior = 0.1;   // CP
  double birth_prior = 0.005;   // BP
  double assoc_prior = 0.895;   // mass on "existing target" associations
  double gamma_alpha = 3.0;     // target lifetime gamma shape
  double gamma_beta = 4.0;      // target lifetime gamma rate (1/s)
  double death_cdf_threshold = 0.95;
  double process_noise_var = 1.5e-4;
  std::array<double, 4> init_mean = {-1.0, 0.0, 0.1, 0.1};
  double init_cov = 0.5;
  double mean_meas_var = 0.25;  // measurement variances rescaled to this mean
  double min_track_s = 0.3;     // shorter tracks dropped as phantoms
  double merge_rad = 0.26;      // overlapping tracks within this merge (~15 deg)
  std::uint64_t seed = 1;
};

struct SourceTrack {
  int id = 0;
  std::vector<std::uint8_t> active;  // per frame
  std::vector<double> azimuth;       // radians, defined where active
  std::vector<double> state_var;     // positional covariance trace
  int first_active() const;
  int last_active() const;
};

struct TrajectorySet {
  std::size_t num_frames = 0;
  double frame_hop_s = 0.0;
  std::vector<SourceTrack> tracks;
};

/// Multi-target tracking: per-particle joint data association over each
/// frame (measurements to distinct targets, clutter, or births, sampled by
/// joint posterior), exact Kalman filtering per target,
/// gamma-lifetime deaths, systematic resampling at ESS < N/2. Trajectories
/// are read from the highest-weight particle. Deterministic per seed.
TrajectorySet track(const DoaMeasurementSet& measurements, const TrackerConfig& config = {});

}  // namespace movsep
