#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "movsep/localization.hpp"
#include "movsep/spatial_model.hpp"
#include "movsep/tracker.hpp"
#include "movsep/types.hpp"

namespace movsep {

/// Every tunable of the processing chain with its default. Loaded from flat
/// `key = value` text; unknown keys are rejected.
struct PipelineConfig {
  // spectral
  std::size_t window_length = 2048;
  std::size_t hop = 1024;
  double sample_rate = 24000.0;

  // localization
  std::size_t num_directions = 72;
  double srp_exponent = 1.5;
  double phat_guard = 1e-12;
  std::size_t wgmm_components = 5;
  double sigma_threshold = 0.6;   // rad, discard broader components
  double weight_threshold = 0.15;

  // tracker
  double mean_measurement_var = 0.25;
  double clutter_prior = 0.1;
  double birth_prior = 0.005;
  double gamma_alpha = 3.0;
  double gamma_beta = 4.0;
  std::array<double, 4> init_state = {-1.0, 0.0, 0.1, 0.1};
  int num_particles = 100;
  double process_noise_var = 1.5e-4;
  double min_track_s = 0.3;

  // spatial model
  double var_min = 0.025;
  double var_max = 0.3;
  double var_sum = 0.325;
  double background_threshold = 0.01;

  // factorization
  std::size_t nmf_components = 80;
  int nmf_iterations = 200;
  double epsilon = 1e-12;

  std::uint64_t seed = 1;

  void validate() const;

  SrpOptions srp_options() const;
  MeasurementOptions measurement_options() const;
  TrackerConfig tracker_config() const;
  SpatialWeightOptions spatial_options() const;
};

PipelineConfig parse_config(const std::string& text);
PipelineConfig read_config(const std::string& path);
void write_config(const std::string& path, const PipelineConfig& config);

}  // namespace movsep
