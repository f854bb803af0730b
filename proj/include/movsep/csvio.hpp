#pragma once

#include <cstdint>
#include <string>

#include "movsep/eval.hpp"
#include "movsep/localization.hpp"
#include "movsep/mnmf.hpp"
#include "movsep/spatial_model.hpp"
#include "movsep/tracker.hpp"

namespace movsep {

/// All writers emit a `# seed = <n>` comment header; readers skip `#` lines.

/// Schema: source_id,frame,time_s,azimuth_deg,state_variance,active
void write_trajectories(const std::string& path, const TrajectorySet& traj, std::uint64_t seed);
TrajectorySet read_trajectories(const std::string& path);

/// Schema: frame,time_s,azimuth_deg,sigma2,weight (one row per measurement)
void write_measurements(const std::string& path, const DoaMeasurementSet& meas,
                        std::uint64_t seed);

/// Schema: frame,time_s,azimuth_deg,energy (SRP argmax per frame)
void write_srp_peaks(const std::string& path, const SrpMap& srp, const DirectionGrid& grid,
                     double frame_hop_s, std::uint64_t seed);

/// Schema: frame,source,azimuth_deg,weight (nonzero weights only)
void write_spatial_weights(const std::string& path, const SpatialWeightTensor& z,
                           const DirectionGrid& grid, std::uint64_t seed);

/// Schema: iteration,cost
void write_cost_trace(const std::string& path, const std::vector<double>& trace,
                      std::uint64_t seed);
std::vector<double> read_cost_trace(const std::string& path);

/// Schema: source,frame,active
void write_vad(const std::string& path, const VadFlags& vad, std::uint64_t seed);
VadFlags read_vad(const std::string& path);

}  // namespace movsep
