#include "movsep/mnmf.hpp"

#include <cmath>
#include <random>

namespace movsep {

MnmfParams init_params(std::size_t num_bins, std::size_t num_frames, std::size_t num_components,
                       std::size_t num_sources, std::uint64_t seed, double floor) {
  if (num_components < 1 || num_sources < 1)
    throw InvalidInput("init_params: need at least one component and one source");
  MnmfParams p;
  p.num_bins = num_bins;
  p.num_frames = num_frames;
  p.num_components = num_components;
  p.num_sources = num_sources;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(floor, 1.0);
  p.t.resize(num_bins * num_components);
  for (auto& x : p.t) x = unif(rng);
  p.v.resize(num_components * num_frames);
  for (auto& x : p.v) x = unif(rng);
  // components shared across sources a priori
  p.b.assign(num_components * num_sources, 1.0 / double(num_sources));
  return p;
}

std::vector<double> source_spectrograms(const MnmfParams& params) {
  const std::size_t F = params.num_bins, N = params.num_frames, Q = params.num_components,
                    P = params.num_sources;
  std::vector<double> shat(P * F * N, 0.0);
  for (std::size_t p = 0; p < P; ++p) {
    double* sp = shat.data() + p * F * N;
#pragma omp parallel for
    for (std::ptrdiff_t f = 0; f < std::ptrdiff_t(F); ++f) {
      double* row = sp + std::size_t(f) * N;
      for (std::size_t q = 0; q < Q; ++q) {
        const double c = params.b_at(q, p) * params.t_at(std::size_t(f), q);
        const double* vq = params.v.data() + q * N;
        for (std::size_t n = 0; n < N; ++n) row[n] += c * vq[n];
      }
    }
  }
  return shat;
}

namespace {

constexpr double kZEps = 1e-14;

struct Support {
  std::vector<std::size_t> dirs;
  std::vector<double> weights;
};

}  // namespace

MnmfProblem::MnmfProblem(const MixtureScmTensor& mix, const SpatialWeightTensor& z,
                         const DoaKernelSet& kernels, Exec exec) {
  if (mix.num_bins != kernels.num_bins() || mix.num_channels != kernels.num_mics() ||
      mix.num_frames != z.num_frames || z.num_directions != kernels.num_directions())
    throw InvalidInput("MnmfProblem: dimension mismatch");
  F_ = mix.num_bins;
  N_ = mix.num_frames;
  P_ = z.num_sources;
  const std::size_t D = kernels.num_directions();
  const std::size_t M = mix.num_channels;

  active_.assign(N_ * P_, 0);
  std::vector<std::vector<Support>> supp(N_, std::vector<Support>(P_));
  std::vector<std::vector<std::size_t>> union_supp(N_);
  for (std::size_t n = 0; n < N_; ++n) {
    std::vector<std::uint8_t> in_union(D, 0);
    for (std::size_t p = 0; p < P_; ++p) {
      for (std::size_t d = 0; d < D; ++d) {
        const double w = z.at(n, d, p);
        if (w > kZEps) {
          supp[n][p].dirs.push_back(d);
          supp[n][p].weights.push_back(w);
          in_union[d] = 1;
        }
      }
      active_[n * P_ + p] = supp[n][p].dirs.empty() ? 0 : 1;
    }
    for (std::size_t d = 0; d < D; ++d)
      if (in_union[d]) union_supp[n].push_back(d);
  }

  G_.assign(P_ * F_ * N_, 0.0);
  Gamma_.assign(F_ * N_ * P_ * P_, 0.0);
  xnorm2_.assign(F_ * N_, 0.0);

  auto per_bin = [&](std::size_t f) {
    // Kernel-pair traces tr(W_fd W_fd') = |a_d^H a_d'|^2 (symmetric in d, d').
    std::vector<double> E(D * D);
    for (std::size_t d = 0; d < D; ++d) {
      const cplx* ad = kernels.steering(f, d);
      for (std::size_t d2 = d; d2 < D; ++d2) {
        const cplx* ad2 = kernels.steering(f, d2);
        cplx dot(0.0, 0.0);
        for (std::size_t m = 0; m < M; ++m) dot += std::conj(ad[m]) * ad2[m];
        const double val = std::norm(dot);
        E[d * D + d2] = val;
        E[d2 * D + d] = val;
      }
    }

    std::vector<double> cvec(D, 0.0);
    std::vector<double> y(D);
    for (std::size_t n = 0; n < N_; ++n) {
      const cplx* x = mix.vec(f, n);
      double mag_sum = 0.0;
      for (std::size_t m = 0; m < M; ++m) mag_sum += std::norm(x[m]);
      xnorm2_[f * N_ + n] = mag_sum * mag_sum;

      for (std::size_t d : union_supp[n]) {
        const cplx* a = kernels.steering(f, d);
        cplx dot(0.0, 0.0);
        for (std::size_t m = 0; m < M; ++m) dot += std::conj(a[m]) * x[m];
        cvec[d] = std::norm(dot);
      }

      for (std::size_t p = 0; p < P_; ++p) {
        const auto& sp = supp[n][p];
        double g = 0.0;
        for (std::size_t i = 0; i < sp.dirs.size(); ++i) g += sp.weights[i] * cvec[sp.dirs[i]];
        G_[(p * F_ + f) * N_ + n] = g;
      }

      double* gamma = Gamma_.data() + (f * N_ + n) * P_ * P_;
      for (std::size_t p = 0; p < P_; ++p) {
        const auto& sp = supp[n][p];
        if (sp.dirs.empty()) continue;
        std::fill(y.begin(), y.end(), 0.0);
        for (std::size_t i = 0; i < sp.dirs.size(); ++i) {
          const double w = sp.weights[i];
          const double* erow = E.data() + sp.dirs[i] * D;
          for (std::size_t d2 = 0; d2 < D; ++d2) y[d2] += w * erow[d2];
        }
        for (std::size_t p2 = p; p2 < P_; ++p2) {
          const auto& sp2 = supp[n][p2];
          double acc = 0.0;
          for (std::size_t i = 0; i < sp2.dirs.size(); ++i)
            acc += sp2.weights[i] * y[sp2.dirs[i]];
          gamma[p * P_ + p2] = acc;
          gamma[p2 * P_ + p] = acc;
        }
      }
    }
  };

  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t f = 0; f < std::ptrdiff_t(F_); ++f) per_bin(std::size_t(f));
  } else {
    for (std::size_t f = 0; f < F_; ++f) per_bin(f);
  }
}

void MnmfProblem::refresh_model(const MnmfParams& params, std::vector<double>& shat,
                                std::vector<double>& ghat) const {
  const std::size_t F = F_, N = N_, P = P_, Q = params.num_components;
  shat.assign(P * F * N, 0.0);
  for (std::size_t p = 0; p < P; ++p) {
    double* sp = shat.data() + p * F * N;
#pragma omp parallel for
    for (std::ptrdiff_t f = 0; f < std::ptrdiff_t(F); ++f) {
      double* row = sp + std::size_t(f) * N;
      for (std::size_t q = 0; q < Q; ++q) {
        const double c = params.b_at(q, p) * params.t_at(std::size_t(f), q);
        const double* vq = params.v.data() + q * N;
        for (std::size_t n = 0; n < N; ++n) row[n] += c * vq[n];
      }
    }
  }
  ghat.assign(P * F * N, 0.0);
#pragma omp parallel for
  for (std::ptrdiff_t f = 0; f < std::ptrdiff_t(F); ++f) {
    for (std::size_t n = 0; n < N; ++n) {
      const double* gamma = Gamma_.data() + (std::size_t(f) * N + n) * P * P;
      for (std::size_t p = 0; p < P; ++p) {
        double acc = 0.0;
        for (std::size_t p2 = 0; p2 < P; ++p2)
          acc += gamma[p * P + p2] * shat[(p2 * F + std::size_t(f)) * N + n];
        ghat[(p * F + std::size_t(f)) * N + n] = acc;
      }
    }
  }
}

double MnmfProblem::cost_from(const std::vector<double>& shat,
                              const std::vector<double>& ghat) const {
  // ||X - Xhat||^2 = ||X||^2 - 2 sum_p shat_p tr(X H_p) + sum_p shat_p tr(Xhat H_p)
  std::vector<double> partial(F_, 0.0);
#pragma omp parallel for
  for (std::ptrdiff_t f = 0; f < std::ptrdiff_t(F_); ++f) {
    double acc = 0.0;
    for (std::size_t n = 0; n < N_; ++n) {
      acc += xnorm2_[std::size_t(f) * N_ + n];
      for (std::size_t p = 0; p < P_; ++p) {
        const std::size_t idx = (p * F_ + std::size_t(f)) * N_ + n;
        acc += shat[idx] * (ghat[idx] - 2.0 * G_[idx]);
      }
    }
    partial[std::size_t(f)] = acc;
  }
  double total = 0.0;
  for (double x : partial) total += x;
  return total;
}

double MnmfProblem::cost(const MnmfParams& params) const {
  std::vector<double> shat, ghat;
  refresh_model(params, shat, ghat);
  return cost_from(shat, ghat);
}

namespace {

// C[f][q] = sum_n A_p[f][n] * v[q][n]
void frames_by_activations(const double* a, const double* v, std::size_t F, std::size_t N,
                           std::size_t Q, double* c) {
#pragma omp parallel for
  for (std::ptrdiff_t f = 0; f < std::ptrdiff_t(F); ++f) {
    const double* row = a + std::size_t(f) * N;
    double* out = c + std::size_t(f) * Q;
    for (std::size_t q = 0; q < Q; ++q) {
      const double* vq = v + q * N;
      double acc = 0.0;
      for (std::size_t n = 0; n < N; ++n) acc += row[n] * vq[n];
      out[q] = acc;
    }
  }
}

// C[q][n] = sum_f t[f][q] * A_p[f][n]
void bins_by_spectra(const double* a, const double* t, std::size_t F, std::size_t N, std::size_t Q,
                     double* c) {
#pragma omp parallel for
  for (std::ptrdiff_t q = 0; q < std::ptrdiff_t(Q); ++q) {
    double* out = c + std::size_t(q) * N;
    std::fill(out, out + N, 0.0);
    for (std::size_t f = 0; f < F; ++f) {
      const double coeff = t[f * Q + std::size_t(q)];
      const double* row = a + f * N;
      for (std::size_t n = 0; n < N; ++n) out[n] += coeff * row[n];
    }
  }
}

}  // namespace

MnmfUpdateStats MnmfProblem::update(MnmfParams& params, int iterations, double floor) const {
  const std::size_t F = F_, N = N_, P = P_, Q = params.num_components;
  if (params.num_bins != F || params.num_frames != N || params.num_sources != P)
    throw InvalidInput("MnmfProblem::update: parameter dimension mismatch");

  MnmfUpdateStats stats;
  std::vector<double> shat, ghat;
  refresh_model(params, shat, ghat);

  std::vector<double> mp(P * F * Q);       // G_p V^T, fixed within an iteration
  std::vector<double> mhat(F * Q);         // Xhat-side counterpart, per source
  std::vector<double> np(Q * N), nhat(Q * N);
  std::vector<double> num(Q * P), den(Q * P);

  auto apply_ratio = [&](double& x, double numer, double denom) {
    if (denom < floor) {
      ++stats.guarded_ratios;
      return;
    }
    x = std::max(x * (numer / denom), floor);
  };

  for (int it = 0; it < iterations; ++it) {
    // --- b ---
    for (std::size_t p = 0; p < P; ++p)
      frames_by_activations(G_.data() + p * F * N, params.v.data(), F, N, Q,
                            mp.data() + p * F * Q);
    std::fill(num.begin(), num.end(), 0.0);
    std::fill(den.begin(), den.end(), 0.0);
    for (std::size_t p = 0; p < P; ++p) {
      frames_by_activations(ghat.data() + p * F * N, params.v.data(), F, N, Q, mhat.data());
      for (std::size_t f = 0; f < F; ++f)
        for (std::size_t q = 0; q < Q; ++q) {
          const double tq = params.t_at(f, q);
          num[q * P + p] += tq * mp[(p * F + f) * Q + q];
          den[q * P + p] += tq * mhat[f * Q + q];
        }
    }
    for (std::size_t q = 0; q < Q; ++q)
      for (std::size_t p = 0; p < P; ++p)
        apply_ratio(params.b_at(q, p), num[q * P + p], den[q * P + p]);
    refresh_model(params, shat, ghat);

    // --- t ---
    std::vector<double> numt(F * Q, 0.0), dent(F * Q, 0.0);
    for (std::size_t p = 0; p < P; ++p) {
      frames_by_activations(ghat.data() + p * F * N, params.v.data(), F, N, Q, mhat.data());
      for (std::size_t f = 0; f < F; ++f)
        for (std::size_t q = 0; q < Q; ++q) {
          const double bq = params.b_at(q, p);
          numt[f * Q + q] += bq * mp[(p * F + f) * Q + q];
          dent[f * Q + q] += bq * mhat[f * Q + q];
        }
    }
    for (std::size_t f = 0; f < F; ++f)
      for (std::size_t q = 0; q < Q; ++q)
        apply_ratio(params.t_at(f, q), numt[f * Q + q], dent[f * Q + q]);
    refresh_model(params, shat, ghat);

    // --- v ---
    std::vector<double> numv(Q * N, 0.0), denv(Q * N, 0.0);
    for (std::size_t p = 0; p < P; ++p) {
      bins_by_spectra(G_.data() + p * F * N, params.t.data(), F, N, Q, np.data());
      bins_by_spectra(ghat.data() + p * F * N, params.t.data(), F, N, Q, nhat.data());
      for (std::size_t q = 0; q < Q; ++q) {
        const double bq = params.b_at(q, p);
        for (std::size_t n = 0; n < N; ++n) {
          numv[q * N + n] += bq * np[q * N + n];
          denv[q * N + n] += bq * nhat[q * N + n];
        }
      }
    }
    for (std::size_t q = 0; q < Q; ++q)
      for (std::size_t n = 0; n < N; ++n)
        apply_ratio(params.v_at(q, n), numv[q * N + n], denv[q * N + n]);
    refresh_model(params, shat, ghat);

    stats.cost_trace.push_back(cost_from(shat, ghat));
  }
  for (double x : params.b) stats.max_b = std::max(stats.max_b, x);
  return stats;
}

double mnmf_cost_dense(const MixtureScmTensor& mix, const SpatialWeightTensor& z,
                       const DoaKernelSet& kernels, const MnmfParams& params) {
  const std::size_t M = mix.num_channels;
  const auto shat = source_spectrograms(params);
  double cost = 0.0;
  for (std::size_t f = 0; f < mix.num_bins; ++f)
    for (std::size_t n = 0; n < mix.num_frames; ++n) {
      auto x = mix.dense(f, n);
      std::vector<cplx> model(M * M, cplx(0.0, 0.0));
      for (std::size_t p = 0; p < params.num_sources; ++p) {
        const auto h = source_scm_dense(z, kernels, f, n, p);
        const double s = shat[(p * mix.num_bins + f) * mix.num_frames + n];
        for (std::size_t i = 0; i < M * M; ++i) model[i] += s * h[i];
      }
      for (std::size_t i = 0; i < M * M; ++i) cost += std::norm(x[i] - model[i]);
    }
  return cost;
}

}  // namespace movsep
