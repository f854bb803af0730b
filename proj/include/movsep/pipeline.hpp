#pragma once

#include "movsep/config.hpp"
#include "movsep/eval.hpp"
#include "movsep/localization.hpp"
#include "movsep/mnmf.hpp"
#include "movsep/separation.hpp"
#include "movsep/synth.hpp"

namespace movsep {

/// spectral -> localization -> tracker.
struct TrackOutput {
  SrpMap srp;
  DoaMeasurementSet measurements;
  TrajectorySet trajectories;
};

TrackOutput run_track(const AudioBuffer& audio, const ArrayGeometry& geom,
                      const PipelineConfig& cfg, Exec exec = Exec::Parallel);

/// spatial_model -> mnmf -> separation. Output order: tracked sources in
/// trajectory order, then the background.
struct SeparateOutput {
  std::vector<AudioBuffer> sources;
  SpatialWeightTensor weights;
  MnmfUpdateStats stats;
};

SeparateOutput run_separate(const AudioBuffer& audio, const TrajectorySet& traj,
                            const ArrayGeometry& geom, const PipelineConfig& cfg,
                            Exec exec = Exec::Parallel);

/// Tracking metrics plus segmental SNR/SIR of separated signals matched to
/// annotated sources via the best permutation. `separated` and `references`
/// are mono; extra separated outputs (background) are ignored by matching.
EvalReport evaluate(const TrajectorySet& est, const TrajectorySet& ann, const VadFlags& vad,
                    const std::vector<AudioBuffer>& separated,
                    const std::vector<AudioBuffer>& references);

}  // namespace movsep
