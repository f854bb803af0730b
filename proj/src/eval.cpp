#include "movsep/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace movsep {

std::optional<double> mae(const TrajectorySet& est, const TrajectorySet& ann,
                          const Permutation& perm) {
  if (perm.size() != est.tracks.size()) throw InvalidInput("mae: permutation size mismatch");
  double total = 0.0;
  std::size_t matched = 0;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    if (perm[i] < 0) continue;
    const auto& e = est.tracks[i];
    const auto& a = ann.tracks[std::size_t(perm[i])];
    double sum = 0.0;
    std::size_t count = 0;
    const std::size_t N = std::min(e.active.size(), a.active.size());
    for (std::size_t n = 0; n < N; ++n) {
      if (!e.active[n] || !a.active[n]) continue;
      sum += std::abs(wrap_angle(a.azimuth[n] - e.azimuth[n]));
      ++count;
    }
    if (count == 0) continue;  // no overlap: metric undefined for this pair
    total += sum / double(count);
    ++matched;
  }
  if (matched == 0) return std::nullopt;
  return total / double(matched);
}

double recall(const TrajectorySet& est, const TrajectorySet& ann, const VadFlags& vad,
              const Permutation& perm) {
  if (vad.active.size() != ann.tracks.size())
    throw InvalidInput("recall: VAD/annotation source count mismatch");
  double total = 0.0;
  for (std::size_t a = 0; a < ann.tracks.size(); ++a) {
    int matched_est = -1;
    for (std::size_t i = 0; i < perm.size(); ++i)
      if (perm[i] == int(a)) matched_est = int(i);
    std::size_t truly_active = 0, covered = 0;
    const auto& flags = vad.active[a];
    for (std::size_t n = 0; n < flags.size(); ++n) {
      if (!flags[n]) continue;
      ++truly_active;
      if (matched_est >= 0 && n < est.tracks[std::size_t(matched_est)].active.size() &&
          est.tracks[std::size_t(matched_est)].active[n])
        ++covered;
    }
    if (truly_active > 0) total += double(covered) / double(truly_active);
  }
  return ann.tracks.empty() ? 0.0 : total / double(ann.tracks.size());
}

PermutationResult best_permutation(const TrajectorySet& est, const TrajectorySet& ann,
                                   const VadFlags& vad) {
  const std::size_t E = est.tracks.size();
  const std::size_t A = ann.tracks.size();
  if (E > 6 || A > 6) throw InvalidInput("best_permutation: more than 6 tracks");

  PermutationResult best;
  best.perm.assign(E, -1);
  best.overall_accuracy = -1.0;

  // Enumerate injective mappings est -> ann via permutations of padded slots.
  const std::size_t slots = std::max(E, A);
  std::vector<int> order(slots);
  std::iota(order.begin(), order.end(), 0);
  do {
    Permutation perm(E, -1);
    for (std::size_t i = 0; i < E; ++i)
      if (order[i] < int(A)) perm[i] = order[i];
    const auto m = mae(est, ann, perm);
    const double mae_val = m.value_or(kPi);
    const double maer = 1.0 - mae_val / kPi;
    const double rec = recall(est, ann, vad, perm);
    const double f = maer + rec;
    if (f > best.overall_accuracy) {
      best.overall_accuracy = f;
      best.perm = perm;
      best.mae_rad = mae_val;
      best.recall_value = rec;
    }
  } while (std::next_permutation(order.begin(), order.end()));
  return best;
}

namespace {

double clamp_db(double num, double den, double guard) {
  if (den <= 0.0) return guard;
  if (num <= 0.0) return -guard;
  return std::clamp(10.0 * std::log10(num / den), -guard, guard);
}

double linear_mean_db(const std::vector<double>& db_values) {
  if (db_values.empty()) return 0.0;
  double acc = 0.0;
  for (double db : db_values) acc += std::pow(10.0, db / 10.0);
  return 10.0 * std::log10(acc / double(db_values.size()));
}

}  // namespace

double segmental_snr(const std::vector<double>& separated, const std::vector<double>& reference,
                     double sample_rate, const SegmentalOptions& opts) {
  if (separated.size() != reference.size())
    throw InvalidInput("segmental_snr: length mismatch");
  const std::size_t seg = std::max<std::size_t>(1, std::size_t(opts.segment_s * sample_rate));
  std::vector<double> seg_db;
  for (std::size_t start = 0; start + seg <= separated.size(); start += seg) {
    double ref2 = 0.0, sep2 = 0.0, cross = 0.0;
    for (std::size_t i = start; i < start + seg; ++i) {
      ref2 += reference[i] * reference[i];
      sep2 += separated[i] * separated[i];
      cross += reference[i] * separated[i];
    }
    if (ref2 <= 1e-14) continue;  // silent reference segment
    const double gain = sep2 > 0.0 ? cross / sep2 : 0.0;
    double err2 = 0.0;
    for (std::size_t i = start; i < start + seg; ++i) {
      const double e = reference[i] - gain * separated[i];
      err2 += e * e;
    }
    seg_db.push_back(clamp_db(ref2, err2, opts.guard_db));
  }
  return linear_mean_db(seg_db);
}

double segmental_sir(const std::vector<double>& separated,
                     const std::vector<std::vector<double>>& references, std::size_t target,
                     double sample_rate, const SegmentalOptions& opts) {
  const std::size_t J = references.size();
  for (const auto& r : references)
    if (r.size() != separated.size()) throw InvalidInput("segmental_sir: length mismatch");
  const std::size_t seg = std::max<std::size_t>(1, std::size_t(opts.segment_s * sample_rate));
  std::vector<double> seg_db;
  for (std::size_t start = 0; start + seg <= separated.size(); start += seg) {
    // Least-squares fit separated ~ sum_j g_j ref_j via normal equations.
    std::vector<double> gram(J * J, 0.0), rhs(J, 0.0);
    double target_ref2 = 0.0;
    for (std::size_t i = start; i < start + seg; ++i)
      target_ref2 += references[target][i] * references[target][i];
    if (target_ref2 <= 1e-14) continue;
    for (std::size_t j = 0; j < J; ++j) {
      for (std::size_t k = j; k < J; ++k) {
        double acc = 0.0;
        for (std::size_t i = start; i < start + seg; ++i)
          acc += references[j][i] * references[k][i];
        gram[j * J + k] = gram[k * J + j] = acc;
      }
      double acc = 0.0;
      for (std::size_t i = start; i < start + seg; ++i) acc += references[j][i] * separated[i];
      rhs[j] = acc;
    }
    // Gaussian elimination with ridge for rank-deficient segments.
    for (std::size_t j = 0; j < J; ++j) gram[j * J + j] += 1e-12;
    std::vector<double> g = rhs;
    for (std::size_t col = 0; col < J; ++col) {
      std::size_t piv = col;
      for (std::size_t r = col + 1; r < J; ++r)
        if (std::abs(gram[r * J + col]) > std::abs(gram[piv * J + col])) piv = r;
      if (piv != col) {
        for (std::size_t c = 0; c < J; ++c) std::swap(gram[col * J + c], gram[piv * J + c]);
        std::swap(g[col], g[piv]);
      }
      const double d = gram[col * J + col];
      if (std::abs(d) < 1e-300) continue;
      for (std::size_t r = 0; r < J; ++r) {
        if (r == col) continue;
        const double factor = gram[r * J + col] / d;
        for (std::size_t c = 0; c < J; ++c) gram[r * J + c] -= factor * gram[col * J + c];
        g[r] -= factor * g[col];
      }
    }
    for (std::size_t j = 0; j < J; ++j)
      g[j] = std::abs(gram[j * J + j]) > 1e-300 ? g[j] / gram[j * J + j] : 0.0;

    double target_energy = 0.0, interf_energy = 0.0;
    for (std::size_t i = start; i < start + seg; ++i) {
      const double tgt = g[target] * references[target][i];
      double interf = 0.0;
      for (std::size_t j = 0; j < J; ++j)
        if (j != target) interf += g[j] * references[j][i];
      target_energy += tgt * tgt;
      interf_energy += interf * interf;
    }
    seg_db.push_back(clamp_db(target_energy, interf_energy, opts.guard_db));
  }
  return linear_mean_db(seg_db);
}

std::string format_report(const EvalReport& report) {
  std::ostringstream os;
  os << "tracking:\n";
  os << "  MAE      = " << report.mae_deg << " deg (" << report.mae_rad << " rad)\n";
  os << "  MAER     = " << report.maer << "\n";
  os << "  recall   = " << report.recall << "\n";
  os << "  accuracy = " << report.overall_accuracy << "\n";
  os << "  permutation =";
  for (int p : report.permutation) os << " " << p;
  os << "\nseparation:\n";
  for (std::size_t p = 0; p < report.seg_snr_db.size(); ++p) {
    os << "  source " << p << ": segSNR = " << report.seg_snr_db[p] << " dB";
    if (p < report.seg_sir_db.size()) os << ", segSIR = " << report.seg_sir_db[p] << " dB";
    os << "\n";
  }
  return os.str();
}

void write_report_csv(const std::string& path, const EvalReport& report) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write report: " + path);
  out << "metric,value\n";
  out << "mae_rad," << report.mae_rad << "\n";
  out << "mae_deg," << report.mae_deg << "\n";
  out << "maer," << report.maer << "\n";
  out << "recall," << report.recall << "\n";
  out << "overall_accuracy," << report.overall_accuracy << "\n";
  for (std::size_t p = 0; p < report.seg_snr_db.size(); ++p)
    out << "seg_snr_db." << p << "," << report.seg_snr_db[p] << "\n";
  for (std::size_t p = 0; p < report.seg_sir_db.size(); ++p)
    out << "seg_sir_db." << p << "," << report.seg_sir_db[p] << "\n";
}

}  // namespace movsep
