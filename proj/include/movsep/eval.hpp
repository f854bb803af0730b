#pragma once

#include <optional>

#include "movsep/tracker.hpp"
#include "movsep/types.hpp"

namespace movsep {

/// Frame-level ground-truth activity per source.
struct VadFlags {
  std::vector<std::vector<std::uint8_t>> active;  // [source][frame]
};

/// Injective mapping estimated -> annotated source; -1 marks an unmatched
/// estimated track.
using Permutation = std::vector<int>;

/// Mean absolute wrapped DOA error in radians, averaged per matched source
/// over frames where both tracks are active, then averaged over matched
/// sources. Empty when no matched pair overlaps.
std::optional<double> mae(const TrajectorySet& est, const TrajectorySet& ann,
                          const Permutation& perm);

/// Fraction of truly-active frames (VAD) covered by the matched track,
/// averaged over annotated sources. Unmatched annotated sources score 0.
double recall(const TrajectorySet& est, const TrajectorySet& ann, const VadFlags& vad,
              const Permutation& perm);

struct PermutationResult {
  Permutation perm;
  double overall_accuracy = 0.0;  // F = MAER + recall
  double mae_rad = kPi;
  double recall_value = 0.0;
};

/// Exhaustive search over injective mappings maximizing
/// F = (1 - MAE/pi) + recall. Track counts above 6 are rejected.
PermutationResult best_permutation(const TrajectorySet& est, const TrajectorySet& ann,
                                   const VadFlags& vad);

struct SegmentalOptions {
  double segment_s = 0.2;
  double guard_db = 60.0;  // degenerate segments clamp to +-guard
};

/// Segmental SNR: per 200 ms segment, optimal scalar gain g aligning the
/// separated signal to the reference, 10*log10(sum ref^2 / sum (ref-g*sep)^2),
/// averaged in the linear domain. Silent reference segments are skipped.
double segmental_snr(const std::vector<double>& separated, const std::vector<double>& reference,
                     double sample_rate, const SegmentalOptions& opts = {});

/// Segmental SIR: per segment the separated signal is least-squares projected
/// onto all references; ratio of target projection energy to interfering
/// projection energy.
double segmental_sir(const std::vector<double>& separated,
                     const std::vector<std::vector<double>>& references, std::size_t target,
                     double sample_rate, const SegmentalOptions& opts = {});

struct EvalReport {
  double mae_rad = 0.0;
  double mae_deg = 0.0;
  double maer = 0.0;
  double recall = 0.0;
  double overall_accuracy = 0.0;
  Permutation permutation;
  std::vector<double> seg_snr_db;  // per annotated source
  std::vector<double> seg_sir_db;
};

std::string format_report(const EvalReport& report);
void write_report_csv(const std::string& path, const EvalReport& report);

}  // namespace movsep
