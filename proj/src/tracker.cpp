#include "movsep/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace movsep {

TargetState kalman_predict(const TargetState& state, double dt, double process_noise_var) {
  if (dt <= 0.0) throw InvalidInput("kalman_predict: dt must be > 0");
  Eigen::Matrix4d A = Eigen::Matrix4d::Identity();
  A(0, 2) = dt;
  A(1, 3) = dt;
  TargetState out;
  out.mean = A * state.mean;
  out.cov = A * state.cov * A.transpose() + process_noise_var * Eigen::Matrix4d::Identity();
  out.cov = 0.5 * (out.cov + out.cov.transpose().eval());
  return out;
}

KalmanUpdateResult kalman_update(const TargetState& state, double meas_angle, double meas_var) {
  if (meas_var <= 0.0) throw InvalidInput("kalman_update: meas_var must be > 0");
  Eigen::Matrix<double, 2, 4> B = Eigen::Matrix<double, 2, 4>::Zero();
  B(0, 0) = 1.0;
  B(1, 1) = 1.0;
  const Eigen::Vector2d m(std::cos(meas_angle), std::sin(meas_angle));

  const Eigen::Vector2d innov = m - B * state.mean;
  Eigen::Matrix2d S = B * state.cov * B.transpose() + meas_var * Eigen::Matrix2d::Identity();
  const double det = S.determinant();
  const Eigen::Matrix2d Sinv = S.inverse();
  const double maha = innov.dot(Sinv * innov);
  const double likelihood = std::exp(-0.5 * maha) / (kTwoPi * std::sqrt(det));

  const Eigen::Matrix<double, 4, 2> K = state.cov * B.transpose() * Sinv;
  KalmanUpdateResult res;
  res.state.mean = state.mean + K * innov;
  const Eigen::Matrix4d IKB = Eigen::Matrix4d::Identity() - K * B;
  res.state.cov = IKB * state.cov * IKB.transpose() + meas_var * K * K.transpose();
  res.state.cov = 0.5 * (res.state.cov + res.state.cov.transpose().eval());
  res.likelihood = likelihood;

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(res.state.cov);
  if (es.eigenvalues().minCoeff() < -1e-9)
    throw std::runtime_error("kalman_update: covariance lost positive semidefiniteness");
  return res;
}

double gamma_cdf(double x, double alpha, double beta) {
  if (x <= 0.0) return 0.0;
  const double a = alpha;
  const double z = x * beta;
  // Regularized lower incomplete gamma by series (z < a+1) or continued
  // fraction (otherwise).
  const double lg = std::lgamma(a);
  if (z < a + 1.0) {
    double sum = 1.0 / a, term = sum;
    for (int i = 1; i < 200; ++i) {
      term *= z / (a + i);
      sum += term;
      if (std::abs(term) < std::abs(sum) * 1e-14) break;
    }
    return sum * std::exp(-z + a * std::log(z) - lg);
  }
  double b = z + 1.0 - a, c = 1e300, d = 1.0 / b, h = d;
  for (int i = 1; i < 200; ++i) {
    const double an = -double(i) * (double(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < 1e-300) d = 1e-300;
    c = b + an / c;
    if (std::abs(c) < 1e-300) c = 1e-300;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-14) break;
  }
  return 1.0 - std::exp(-z + a * std::log(z) - lg) * h;
}

int SourceTrack::first_active() const {
  for (std::size_t n = 0; n < active.size(); ++n)
    if (active[n]) return int(n);
  return -1;
}
int SourceTrack::last_active() const {
  for (std::size_t n = active.size(); n > 0; --n)
    if (active[n - 1]) return int(n - 1);
  return -1;
}

namespace {

struct ParticleTarget {
  int id = 0;
  TargetState state;
  int birth_frame = 0;
  int last_assoc_frame = 0;
  std::vector<double> az_hist;   // one entry per frame since birth
  std::vector<double> var_hist;
};

struct Particle {
  double weight = 1.0;
  std::vector<ParticleTarget> alive;
  std::vector<ParticleTarget> dead;
};

void record_states(Particle& particle) {
  for (auto& t : particle.alive) {
    t.az_hist.push_back(t.state.azimuth());
    t.var_hist.push_back(t.state.position_var());
  }
}

}  // namespace

TrajectorySet track(const DoaMeasurementSet& measurements, const TrackerConfig& config) {
  const std::size_t N = measurements.frames.size();
  TrajectorySet out;
  out.num_frames = N;
  out.frame_hop_s = measurements.frame_hop_s;
  if (N == 0) return out;
  const double dt = measurements.frame_hop_s;
  if (dt <= 0.0) throw InvalidInput("track: frame_hop_s must be > 0");

  // Rescale measurement variances so the signal-wide mean equals
  // config.mean_meas_var.
  double var_sum = 0.0;
  std::size_t var_count = 0;
  for (const auto& frame : measurements.frames)
    for (const auto& m : frame) {
      var_sum += m.var;
      ++var_count;
    }
  const double var_scale =
      var_count > 0 && var_sum > 0.0 ? config.mean_meas_var * double(var_count) / var_sum : 1.0;

  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  TargetState init_state;
  init_state.mean = Eigen::Vector4d(config.init_mean[0], config.init_mean[1],
                                    config.init_mean[2], config.init_mean[3]);
  init_state.cov = config.init_cov * Eigen::Matrix4d::Identity();

  std::vector<Particle> particles(std::size_t(config.num_particles));
  for (auto& particle : particles) particle.weight = 1.0 / double(config.num_particles);
  int next_id = 0;

  const double clutter_density = config.clutter_prior / kTwoPi;

  for (std::size_t n = 0; n < N; ++n) {
    for (auto& particle : particles) {
      // Predict and kill stale targets.
      for (auto& t : particle.alive)
        if (n > std::size_t(t.birth_frame))
          t.state = kalman_predict(t.state, dt, config.process_noise_var);
      for (std::size_t i = 0; i < particle.alive.size();) {
        auto& t = particle.alive[i];
        const double elapsed = double(int(n) - t.last_assoc_frame) * dt;
        if (gamma_cdf(elapsed, config.gamma_alpha, config.gamma_beta) >
            config.death_cdf_threshold) {
          particle.dead.push_back(std::move(t));
          particle.alive.erase(particle.alive.begin() + std::ptrdiff_t(i));
        } else {
          ++i;
        }
      }

      // Joint data association over the frame: every measurement goes to a
      // distinct target, clutter, or a birth; events are sampled by their
      // joint posterior so target-swap and no-swap hypotheses at crossings
      // compete as wholes rather than greedily measurement by measurement.
      const auto& frame_meas = measurements.frames[n];
      const std::size_t K = frame_meas.size();
      const std::size_t T = particle.alive.size();
      if (K > 0) {
        // Association mass is split across targets so particles carrying
        // phantom duplicates are not rewarded with larger marginals.
        const double per_target = T > 0 ? config.assoc_prior / double(T) : 0.0;
        std::vector<KalmanUpdateResult> updates(K * T);
        std::vector<KalmanUpdateResult> births(K);
        // per-measurement factors: [k][j] target j, then clutter, then birth
        std::vector<double> factor(K * (T + 2));
        for (std::size_t k = 0; k < K; ++k) {
          const double meas_var = frame_meas[k].var * var_scale;
          for (std::size_t j = 0; j < T; ++j) {
            updates[k * T + j] =
                kalman_update(particle.alive[j].state, frame_meas[k].mean, meas_var);
            factor[k * (T + 2) + j] = per_target * updates[k * T + j].likelihood;
          }
          births[k] = kalman_update(init_state, frame_meas[k].mean, meas_var);
          factor[k * (T + 2) + T] = clutter_density;
          factor[k * (T + 2) + T + 1] = config.birth_prior * births[k].likelihood;
        }

        // Enumerate events depth-first; assignment[k] in [0,T) target, T
        // clutter, T+1 birth. Targets are exclusive, clutter/birth are not.
        std::vector<std::size_t> assignment(K), chosen(K, T);
        double total = 0.0;
        double u = -1.0;  // set after the first pass measures the total
        auto enumerate = [&](auto&& self, std::size_t k, std::uint64_t used,
                             double product) -> bool {
          if (k == K) {
            if (u < 0.0) {
              total += product;
            } else {
              u -= product;
              if (u <= 0.0) {
                chosen = assignment;
                return true;
              }
            }
            return false;
          }
          for (std::size_t c = 0; c < T + 2; ++c) {
            if (c < T && (used >> c & 1)) continue;
            const double f = factor[k * (T + 2) + c];
            if (f <= 0.0) continue;
            assignment[k] = c;
            if (self(self, k + 1, c < T ? used | (std::uint64_t(1) << c) : used, product * f))
              return true;
          }
          return false;
        };
        enumerate(enumerate, 0, 0, 1.0);
        particle.weight *= total;
        if (total > 0.0) {
          u = unif(rng) * total;
          enumerate(enumerate, 0, 0, 1.0);
          for (std::size_t k = 0; k < K; ++k) {
            if (chosen[k] < T) {
              particle.alive[chosen[k]].state = updates[k * T + chosen[k]].state;
              particle.alive[chosen[k]].last_assoc_frame = int(n);
            } else if (chosen[k] == T + 1) {
              ParticleTarget t;
              t.id = next_id++;
              t.state = births[k].state;
              t.birth_frame = int(n);
              t.last_assoc_frame = int(n);
              particle.alive.push_back(std::move(t));
            }
            // clutter: nothing to do
          }
        }
      }
      record_states(particle);
    }

    // Normalize weights; resample when the effective sample size collapses.
    double wsum = 0.0;
    for (const auto& particle : particles) wsum += particle.weight;
    if (!(wsum > 0.0)) {
      for (auto& particle : particles) particle.weight = 1.0 / double(particles.size());
      wsum = 1.0;
    } else {
      for (auto& particle : particles) particle.weight /= wsum;
    }
    double ess_inv = 0.0;
    for (const auto& particle : particles) ess_inv += particle.weight * particle.weight;
    if (1.0 / ess_inv < 0.5 * double(particles.size())) {
      std::vector<Particle> resampled;
      resampled.reserve(particles.size());
      const double step = 1.0 / double(particles.size());
      double u = unif(rng) * step;
      double cum = 0.0;
      std::size_t i = 0;
      for (std::size_t j = 0; j < particles.size(); ++j) {
        const double target = u + double(j) * step;
        while (cum + particles[i].weight < target && i + 1 < particles.size())
          cum += particles[i++].weight;
        resampled.push_back(particles[i]);
        resampled.back().weight = step;
      }
      particles = std::move(resampled);
    }
  }

  // Read trajectories from the highest-weight particle.
  const auto best = std::max_element(
      particles.begin(), particles.end(),
      [](const Particle& a, const Particle& b) { return a.weight < b.weight; });
  std::vector<ParticleTarget> all = best->dead;
  all.insert(all.end(), best->alive.begin(), best->alive.end());
  std::sort(all.begin(), all.end(),
            [](const ParticleTarget& a, const ParticleTarget& b) {
              return a.birth_frame < b.birth_frame;
            });

  for (const auto& t : all) {
    const int last = t.last_assoc_frame;
    if (double(last - t.birth_frame + 1) * dt < config.min_track_s) continue;
    SourceTrack st;
    st.id = int(out.tracks.size());
    st.active.assign(N, 0);
    st.azimuth.assign(N, 0.0);
    st.state_var.assign(N, 0.0);
    for (int f = t.birth_frame; f <= last && f < int(N); ++f) {
      const std::size_t h = std::size_t(f - t.birth_frame);
      if (h >= t.az_hist.size()) break;
      st.active[std::size_t(f)] = 1;
      st.azimuth[std::size_t(f)] = t.az_hist[h];
      st.state_var[std::size_t(f)] = t.var_hist[h];
    }
    out.tracks.push_back(std::move(st));
  }

  // Duplicate targets shadowing one source alternate in claiming its
  // measurements, so neither starves long enough to die. Merge tracks that
  // overlap in time and agree in azimuth; the longer one absorbs the other.
  auto track_length = [](const SourceTrack& t) {
    std::size_t len = 0;
    for (auto a : t.active) len += a;
    return len;
  };
  bool merged = true;
  while (merged) {
    merged = false;
    for (std::size_t i = 0; i < out.tracks.size() && !merged; ++i)
      for (std::size_t j = i + 1; j < out.tracks.size() && !merged; ++j) {
        auto& a = out.tracks[i];
        auto& b = out.tracks[j];
        double diff = 0.0;
        std::size_t overlap = 0;
        for (std::size_t f = 0; f < N; ++f)
          if (a.active[f] && b.active[f]) {
            diff += std::abs(wrap_angle(a.azimuth[f] - b.azimuth[f]));
            ++overlap;
          }
        if (overlap == 0 || diff / double(overlap) > config.merge_rad) continue;
        auto& keep = track_length(a) >= track_length(b) ? a : b;
        auto& drop = track_length(a) >= track_length(b) ? b : a;
        for (std::size_t f = 0; f < N; ++f)
          if (drop.active[f] && !keep.active[f]) {
            keep.active[f] = 1;
            keep.azimuth[f] = drop.azimuth[f];
            keep.state_var[f] = drop.state_var[f];
          }
        out.tracks.erase(out.tracks.begin() + std::ptrdiff_t(&drop == &b ? j : i));
        merged = true;
      }
  }
  for (std::size_t i = 0; i < out.tracks.size(); ++i) out.tracks[i].id = int(i);
  return out;
}

}  // namespace movsep
