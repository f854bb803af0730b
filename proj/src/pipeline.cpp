#include "movsep/pipeline.hpp"

#include <cmath>

#include "movsep/stft.hpp"

namespace movsep {

TrackOutput run_track(const AudioBuffer& audio, const ArrayGeometry& geom,
                      const PipelineConfig& cfg, Exec exec) {
  cfg.validate();
  geom.validate();
  audio.validate();
  if (audio.num_channels() != geom.num_mics())
    throw InvalidInput("run_track: channel count does not match geometry");

  const Spectrogram spec = stft(audio, cfg.window_length, cfg.hop);
  const DirectionGrid grid = DirectionGrid::uniform(cfg.num_directions);
  const DoaKernelSet kernels(geom, grid, spec.num_bins, cfg.window_length, cfg.sample_rate);

  TrackOutput out;
  out.srp = srp_phat(spec, kernels, cfg.srp_options(), exec);
  const double hop_s = double(cfg.hop) / cfg.sample_rate;
  out.measurements = extract_measurements(out.srp, grid, hop_s, cfg.measurement_options());
  out.trajectories = track(out.measurements, cfg.tracker_config());
  return out;
}

SeparateOutput run_separate(const AudioBuffer& audio, const TrajectorySet& traj,
                            const ArrayGeometry& geom, const PipelineConfig& cfg, Exec exec) {
  cfg.validate();
  geom.validate();
  audio.validate();
  if (audio.num_channels() != geom.num_mics())
    throw InvalidInput("run_separate: channel count does not match geometry");

  const Spectrogram spec = stft(audio, cfg.window_length, cfg.hop);
  if (traj.num_frames != spec.num_frames)
    throw InvalidInput("run_separate: trajectory/audio frame count mismatch");

  const DirectionGrid grid = DirectionGrid::uniform(cfg.num_directions);
  const DoaKernelSet kernels(geom, grid, spec.num_bins, cfg.window_length, cfg.sample_rate);

  SeparateOutput out;
  const SpatialWeightTensor tracked = restore_spatial_weights(traj, grid, cfg.spatial_options());
  out.weights = add_background_source(tracked, cfg.background_threshold);

  const MixtureScmTensor mix = mixture_scm(spec);
  const MnmfProblem problem(mix, out.weights, kernels, exec);
  MnmfParams params = init_params(spec.num_bins, spec.num_frames, cfg.nmf_components,
                                  out.weights.num_sources, cfg.seed, cfg.epsilon);
  out.stats = problem.update(params, cfg.nmf_iterations, cfg.epsilon);

  const std::vector<double> shat = source_spectrograms(params);
  const std::size_t P = out.weights.num_sources;
  const std::size_t background = P - 1;  // add_background_source appends it last
  const SeparationMasks masks =
      wiener_masks(shat, spec.num_bins, spec.num_frames, P, background, cfg.epsilon);

  for (std::size_t p = 0; p < P; ++p) {
    const Spectrogram masked = apply_mask(spec, masks, p);
    const SourceTrack* tr = p < traj.tracks.size() ? &traj.tracks[p] : nullptr;
    out.sources.push_back(istft(dsb(masked, tr, geom)));
  }
  return out;
}

EvalReport evaluate(const TrajectorySet& est, const TrajectorySet& ann, const VadFlags& vad,
                    const std::vector<AudioBuffer>& separated,
                    const std::vector<AudioBuffer>& references) {
  const PermutationResult perm = best_permutation(est, ann, vad);
  EvalReport report;
  report.mae_rad = perm.mae_rad;
  report.mae_deg = perm.mae_rad * 180.0 / kPi;
  report.maer = 1.0 - perm.mae_rad / kPi;
  report.recall = perm.recall_value;
  report.overall_accuracy = perm.overall_accuracy;
  report.permutation = perm.perm;

  if (references.empty()) return report;
  std::vector<std::vector<double>> refs;
  for (const auto& r : references) {
    if (r.num_channels() != 1) throw InvalidInput("evaluate: references must be mono");
    refs.push_back(r.samples[0]);
  }
  const double fs = references[0].sample_rate;

  report.seg_snr_db.assign(references.size(), 0.0);
  report.seg_sir_db.assign(references.size(), 0.0);
  for (std::size_t a = 0; a < references.size(); ++a) {
    int matched = -1;
    for (std::size_t i = 0; i < perm.perm.size(); ++i)
      if (perm.perm[i] == int(a)) matched = int(i);
    if (matched < 0 || std::size_t(matched) >= separated.size()) continue;
    const auto& sep = separated[std::size_t(matched)].samples[0];
    std::vector<double> sep_trim = sep, ref_trim = refs[a];
    const std::size_t L = std::min(sep_trim.size(), ref_trim.size());
    sep_trim.resize(L);
    ref_trim.resize(L);
    std::vector<std::vector<double>> refs_trim = refs;
    for (auto& r : refs_trim) r.resize(L);
    report.seg_snr_db[a] = segmental_snr(sep_trim, ref_trim, fs);
    report.seg_sir_db[a] = segmental_sir(sep_trim, refs_trim, a, fs);
  }
  return report;
}

}  // namespace movsep
