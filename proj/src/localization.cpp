#include "movsep/localization.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace movsep {

std::size_t SrpMap::argmax(std::size_t n) const {
  std::size_t best = 0;
  for (std::size_t d = 1; d < num_directions; ++d)
    if (at(d, n) > at(best, n)) best = d;
  return best;
}

namespace {

void srp_frame(const Spectrogram& spec, const DoaKernelSet& kernels, const SrpOptions& opts,
               std::size_t n, double* out) {
  const std::size_t F = spec.num_bins;
  const std::size_t M = spec.num_channels;
  const std::size_t D = kernels.num_directions();
  for (std::size_t d = 0; d < D; ++d) out[d] = 0.0;

  for (std::size_t m1 = 0; m1 + 1 < M; ++m1) {
    const cplx* x1 = spec.frame(n, m1);
    for (std::size_t m2 = m1 + 1; m2 < M; ++m2) {
      const cplx* x2 = spec.frame(n, m2);
      for (std::size_t f = 0; f < F; ++f) {
        const cplx cross = x1[f] * std::conj(x2[f]);
        const double mag = std::abs(cross);
        if (mag < opts.phat_guard) continue;
        const cplx c = cross / mag;
        const cplx* steer = kernels.steering(f, 0);
        const std::size_t stride = M;
        // alignment term conj(a_m1)*a_m2 == exp(j*omega*tau_d(m1,m2))
        for (std::size_t d = 0; d < D; ++d) {
          const cplx* a = steer + d * stride;
          const cplx align = std::conj(a[m1]) * a[m2];
          out[d] += c.real() * align.real() - c.imag() * align.imag();
        }
      }
    }
  }
  for (std::size_t d = 0; d < D; ++d) out[d] = std::pow(std::max(out[d], 0.0), opts.exponent);
}

}  // namespace

SrpMap srp_phat(const Spectrogram& spec, const DoaKernelSet& kernels, const SrpOptions& opts,
                Exec exec) {
  if (spec.num_channels < 2) throw InvalidInput("srp_phat: need at least 2 channels");
  if (spec.num_bins != kernels.num_bins() || spec.num_channels != kernels.num_mics())
    throw InvalidInput("srp_phat: spectrogram/kernel dimension mismatch");

  SrpMap srp;
  srp.num_directions = kernels.num_directions();
  srp.num_frames = spec.num_frames;
  srp.energy.assign(srp.num_directions * srp.num_frames, 0.0);

  const std::ptrdiff_t N = std::ptrdiff_t(spec.num_frames);
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 8)
    for (std::ptrdiff_t n = 0; n < N; ++n)
      srp_frame(spec, kernels, opts, std::size_t(n), srp.energy.data() + n * std::ptrdiff_t(srp.num_directions));
  } else {
    for (std::ptrdiff_t n = 0; n < N; ++n)
      srp_frame(spec, kernels, opts, std::size_t(n), srp.energy.data() + n * std::ptrdiff_t(srp.num_directions));
  }
  return srp;
}

DoaMeasurementSet extract_measurements(const SrpMap& srp, const DirectionGrid& grid,
                                       double frame_hop_s, const MeasurementOptions& opts) {
  if (grid.size() != srp.num_directions)
    throw InvalidInput("extract_measurements: grid/SRP dimension mismatch");

  DoaMeasurementSet set;
  set.frame_hop_s = frame_hop_s;
  set.frames.resize(srp.num_frames);

  const std::size_t K = opts.num_components;
  auto default_init = [&] {
    WgmmFrame init;
    init.components.resize(K);
    for (std::size_t k = 0; k < K; ++k) {
      init.components[k].mean = wrap_angle(kTwoPi * double(k) / double(K));
      init.components[k].var = opts.init_var;
      init.components[k].weight = 1.0 / double(K);
    }
    return init;
  };

  WgmmFrame warm = default_init();
  bool have_warm = false;

  // Warm-started EM on histograms has two absorbing failure modes: a
  // component can collapse onto a single grid bin (frozen point mass) or lose
  // all weight to a broad floor-absorbing component, after which it never
  // recovers. Degenerate components are therefore reseeded each frame onto
  // the strongest histogram peaks not already covered by a live component.
  constexpr double kVarFloor = 1e-3;      // ~ (half grid spacing)^2
  constexpr double kDeadWeight = 0.02;
  constexpr double kCoverRadius = 0.25;   // rad
  constexpr double kPeakFraction = 0.05;  // ignore floor bumps

  for (std::size_t n = 0; n < srp.num_frames; ++n) {
    auto hist = srp.frame(n);
    const double mass = std::accumulate(hist.begin(), hist.end(), 0.0);
    if (mass < opts.silence_mass) continue;  // silent frame: no measurements

    WgmmFrame init = have_warm ? warm : default_init();
    for (auto& c : init.components) {
      if (c.weight < 1e-6) c.weight = 1e-6;
      if (c.var < kVarFloor) c.var = kVarFloor;
    }

    // Circular local maxima of the histogram, strongest first.
    const std::size_t D = hist.size();
    std::vector<std::size_t> peaks;
    double peak_max = 0.0;
    for (std::size_t d = 0; d < D; ++d) {
      const double prev = hist[(d + D - 1) % D], next = hist[(d + 1) % D];
      if (hist[d] > prev && hist[d] >= next && hist[d] > 0.0) {
        peaks.push_back(d);
        peak_max = std::max(peak_max, hist[d]);
      }
    }
    std::sort(peaks.begin(), peaks.end(),
              [&](std::size_t a, std::size_t b) { return hist[a] > hist[b]; });

    for (std::size_t d : peaks) {
      if (hist[d] < kPeakFraction * peak_max) break;
      const double theta = grid.azimuths[d];
      bool covered = false;
      for (const auto& c : init.components)
        if (c.weight >= kDeadWeight && std::abs(wrap_angle(c.mean - theta)) < kCoverRadius)
          covered = true;
      if (covered) continue;
      // weakest component gets relocated to the uncovered peak
      auto weakest = std::min_element(
          init.components.begin(), init.components.end(),
          [](const WgmmComponent& a, const WgmmComponent& b) { return a.weight < b.weight; });
      if (weakest->weight >= opts.weight_min) break;  // nothing expendable
      weakest->mean = theta;
      weakest->var = opts.init_var;
      weakest->weight = opts.weight_min;
    }

    double wsum = 0.0;
    for (auto& c : init.components) wsum += c.weight;
    for (auto& c : init.components) c.weight /= wsum;

    WgmmFit fit = wgmm_em(hist, grid.azimuths, init, opts.em_max_iter, opts.em_tol);
    warm = fit.frame;
    have_warm = true;

    for (const auto& c : fit.frame.components) {
      if (std::sqrt(c.var) > opts.sigma_max_rad || c.weight < opts.weight_min) continue;
      set.frames[n].push_back({wrap_angle(c.mean), c.var, c.weight});
    }
  }
  return set;
}

}  // namespace movsep
