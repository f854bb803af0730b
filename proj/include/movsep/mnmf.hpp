#pragma once

#include <cstdint>

#include "movsep/spatial_model.hpp"
#include "movsep/types.hpp"

namespace movsep {

constexpr double kNmfFloor = 1e-12;

/// Nonnegative factors of the source magnitude model
/// shat_fnp = sum_q b_qp t_fq v_qn.
struct MnmfParams {
  std::size_t num_bins = 0;     // F
  std::size_t num_frames = 0;   // N
  std::size_t num_components = 0;  // Q
  std::size_t num_sources = 0;  // P (tracked + background)
  std::vector<double> b;  // [q][p]
  std::vector<double> t;  // [f][q]
  std::vector<double> v;  // [q][n]

  double& b_at(std::size_t q, std::size_t p) { return b[q * num_sources + p]; }
  double b_at(std::size_t q, std::size_t p) const { return b[q * num_sources + p]; }
  double& t_at(std::size_t f, std::size_t q) { return t[f * num_components + q]; }
  double t_at(std::size_t f, std::size_t q) const { return t[f * num_components + q]; }
  double& v_at(std::size_t q, std::size_t n) { return v[q * num_frames + n]; }
  double v_at(std::size_t q, std::size_t n) const { return v[q * num_frames + n]; }
};

/// Random initialization: t, v ~ U(floor, 1), b uniform across sources so
/// components are shared a priori. Deterministic per seed.
MnmfParams init_params(std::size_t num_bins, std::size_t num_frames, std::size_t num_components,
                       std::size_t num_sources, std::uint64_t seed, double floor = kNmfFloor);

/// shat_fnp = sum_q b_qp t_fq v_qn, layout [p][f][n].
std::vector<double> source_spectrograms(const MnmfParams& params);

struct MnmfUpdateStats {
  std::vector<double> cost_trace;  // cost after each iteration
  std::size_t guarded_ratios = 0;  // entries whose denominator hit the floor
  double max_b = 0.0;
};

/// Squared-Frobenius multichannel NMF with fixed time-varying SCMs.
/// Precomputes, once, the traces the cost and multiplicative updates need:
///   G_fnp      = tr(X_fn H_fnp)      (rank-1 X: |a_d^H xhat|^2 combined by z)
///   Gamma_fnpp' = tr(H_fnp H_fnp')
/// so iterations never materialize an M x M matrix.
class MnmfProblem {
 public:
  MnmfProblem(const MixtureScmTensor& mix, const SpatialWeightTensor& z,
              const DoaKernelSet& kernels, Exec exec = Exec::Parallel);

  std::size_t num_bins() const { return F_; }
  std::size_t num_frames() const { return N_; }
  std::size_t num_sources() const { return P_; }

  /// sum_fn ||X_fn - sum_p H_fnp shat_fnp||_F^2
  double cost(const MnmfParams& params) const;

  /// Multiplicative updates in the order b, t, v, with the model estimate
  /// refreshed between blocks. Entries are floored after every rule; ratios
  /// whose denominator underflows the floor are left unchanged and counted.
  MnmfUpdateStats update(MnmfParams& params, int iterations, double floor = kNmfFloor) const;

  double trace_xh(std::size_t f, std::size_t n, std::size_t p) const {
    return G_[(p * F_ + f) * N_ + n];
  }
  double trace_hh(std::size_t f, std::size_t n, std::size_t p, std::size_t p2) const {
    return Gamma_[((f * N_ + n) * P_ + p) * P_ + p2];
  }
  bool source_active(std::size_t n, std::size_t p) const { return active_[n * P_ + p] != 0; }

 private:
  void refresh_model(const MnmfParams& params, std::vector<double>& shat,
                     std::vector<double>& ghat) const;
  double cost_from(const std::vector<double>& shat, const std::vector<double>& ghat) const;

  std::size_t F_ = 0, N_ = 0, P_ = 0;
  std::vector<double> G_;      // [p][f][n]
  std::vector<double> Gamma_;  // [f][n][p][p']
  std::vector<double> xnorm2_; // [f][n]: ||X_fn||_F^2
  std::vector<std::uint8_t> active_;  // [n][p]
};

/// Dense reference for the cost: materializes every SCM and residual.
/// Serial; for small instances and cross-checking the trace path.
double mnmf_cost_dense(const MixtureScmTensor& mix, const SpatialWeightTensor& z,
                       const DoaKernelSet& kernels, const MnmfParams& params);

}  // namespace movsep
