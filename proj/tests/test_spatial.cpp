#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "movsep/spatial_model.hpp"
#include "movsep/wgmm.hpp"

using namespace movsep;

namespace {

Spectrogram random_spec(std::size_t bins, std::size_t frames, std::size_t channels,
                        std::size_t window_length, std::uint64_t seed) {
  Spectrogram s;
  s.num_bins = bins;
  s.num_frames = frames;
  s.num_channels = channels;
  s.window_length = window_length;
  s.hop = window_length / 2;
  s.sample_rate = 24000.0;
  s.resize();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  for (auto& c : s.data) c = cplx(g(rng), g(rng));
  return s;
}

TrajectorySet one_track(std::size_t frames, double azimuth, double state_var) {
  TrajectorySet traj;
  traj.num_frames = frames;
  traj.frame_hop_s = 0.04;
  SourceTrack t;
  t.id = 0;
  t.active.assign(frames, 1);
  t.azimuth.assign(frames, azimuth);
  t.state_var.assign(frames, state_var);
  traj.tracks.push_back(t);
  return traj;
}

}  // namespace

TEST_CASE("single channel scm equals the magnitude") {
  Spectrogram s = random_spec(1, 1, 1, 4, 1);
  s.at(0, 0, 0) = cplx(4.0, 0.0);
  MixtureScmTensor x = mixture_scm(s);
  auto X = x.dense(0, 0);
  CHECK(X[0].real() == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(X[0].imag() == doctest::Approx(0.0));
}

TEST_CASE("scm diagonal equals the channel magnitudes") {
  Spectrogram s = random_spec(6, 4, 3, 12, 2);
  MixtureScmTensor x = mixture_scm(s);
  for (std::size_t f = 0; f < 6; ++f)
    for (std::size_t n = 0; n < 4; ++n) {
      auto X = x.dense(f, n);
      for (std::size_t m = 0; m < 3; ++m) {
        CHECK(X[m * 3 + m].real() == doctest::Approx(std::abs(s.at(f, n, m))).epsilon(1e-12));
        CHECK(std::abs(X[m * 3 + m].imag()) < 1e-12);
      }
    }
}

TEST_CASE("scm is rank one with trace equal to the summed magnitudes") {
  Spectrogram s = random_spec(3, 2, 4, 6, 3);
  MixtureScmTensor x = mixture_scm(s);
  for (std::size_t f = 0; f < 3; ++f)
    for (std::size_t n = 0; n < 2; ++n) {
      auto X = x.dense(f, n);
      Eigen::Matrix4cd Xm;
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) Xm(i, j) = X[std::size_t(i) * 4 + std::size_t(j)];
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(Xm);
      double mag_sum = 0.0;
      for (std::size_t m = 0; m < 4; ++m) mag_sum += std::abs(s.at(f, n, m));
      CHECK(es.eigenvalues()(3) == doctest::Approx(mag_sum).epsilon(1e-9));
      for (int i = 0; i < 3; ++i) CHECK(std::abs(es.eigenvalues()(i)) < 1e-9);
    }
}

TEST_CASE("max tracker variance gives the narrowest spatial window") {
  DirectionGrid grid = DirectionGrid::uniform(72);
  SpatialWeightTensor narrow = restore_spatial_weights(one_track(1, 0.0, 0.3), grid);
  SpatialWeightTensor wide = restore_spatial_weights(one_track(1, 0.0, 0.025), grid);
  // compare against the expected wrapped Gaussian shapes sigma2 = 0.025 / 0.3
  auto expect = [&](double sigma2, std::size_t d) {
    double norm = 0.0;
    for (std::size_t i = 0; i < 72; ++i)
      norm += wrapped_gaussian_pdf(grid.azimuths[i], 0.0, sigma2);
    return wrapped_gaussian_pdf(grid.azimuths[d], 0.0, sigma2) / norm;
  };
  for (std::size_t d = 0; d < 72; d += 5) {
    CHECK(narrow.at(0, d, 0) == doctest::Approx(expect(0.025, d)).epsilon(1e-9));
    CHECK(wide.at(0, d, 0) == doctest::Approx(expect(0.3, d)).epsilon(1e-9));
  }
  // the narrow window concentrates more mass at the peak
  CHECK(narrow.at(0, 0, 0) > wide.at(0, 0, 0));
}

TEST_CASE("tracker variance is clamped into its bounds") {
  DirectionGrid grid = DirectionGrid::uniform(36);
  SpatialWeightTensor a = restore_spatial_weights(one_track(1, 1.0, 5.0), grid);
  SpatialWeightTensor b = restore_spatial_weights(one_track(1, 1.0, 0.3), grid);
  for (std::size_t d = 0; d < 36; ++d) CHECK(a.at(0, d, 0) == doctest::Approx(b.at(0, d, 0)).epsilon(1e-12));
}

TEST_CASE("active frames have unit l1 norm, inactive frames are all-zero") {
  DirectionGrid grid = DirectionGrid::uniform(72);
  TrajectorySet traj = one_track(10, 0.7, 0.1);
  for (std::size_t n = 5; n < 10; ++n) traj.tracks[0].active[n] = 0;
  SpatialWeightTensor z = restore_spatial_weights(traj, grid);
  for (std::size_t n = 0; n < 10; ++n) {
    double sum = 0.0;
    for (std::size_t d = 0; d < 72; ++d) sum += z.at(n, d, 0);
    if (n < 5) CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    else CHECK(sum == 0.0);
  }
}

TEST_CASE("invalid window arithmetic is rejected") {
  DirectionGrid grid = DirectionGrid::uniform(12);
  SpatialWeightOptions opts;
  opts.var_sum = 0.3;  // c <= var_max would give nonpositive window variance
  CHECK_THROWS_AS(restore_spatial_weights(one_track(1, 0.0, 0.1), grid, opts), InvalidInput);
}

TEST_CASE("background is uniform when no tracked source is active") {
  DirectionGrid grid = DirectionGrid::uniform(72);
  TrajectorySet traj = one_track(2, 0.0, 0.1);
  traj.tracks[0].active.assign(2, 0);
  SpatialWeightTensor z = add_background_source(restore_spatial_weights(traj, grid), 0.01);
  REQUIRE(z.num_sources == 2);
  CHECK(z.has_background);
  for (std::size_t n = 0; n < 2; ++n)
    for (std::size_t d = 0; d < 72; ++d)
      CHECK(z.at(n, d, 1) == doctest::Approx(1.0 / 72.0).epsilon(1e-12));
}

TEST_CASE("background covers the complement of roughly +-30 degrees at minimum window") {
  DirectionGrid grid = DirectionGrid::uniform(72);
  // state variance at maximum -> narrowest window sigma2 = 0.025
  SpatialWeightTensor z = add_background_source(restore_spatial_weights(one_track(1, 0.0, 0.3), grid), 0.01);
  double excluded_min = kPi, excluded_max = -kPi;
  for (std::size_t d = 0; d < 72; ++d) {
    if (z.at(0, d, 1) == 0.0) {
      const double a = wrap_angle(grid.azimuths[d]);
      excluded_min = std::min(excluded_min, a);
      excluded_max = std::max(excluded_max, a);
    }
  }
  // exclusive window on the order of +-30 degrees around the source
  CHECK(excluded_max >= 15.0 * kPi / 180.0);
  CHECK(excluded_max < 45.0 * kPi / 180.0);
  CHECK(excluded_min <= -15.0 * kPi / 180.0);
  CHECK(excluded_min > -45.0 * kPi / 180.0);
  // and the background itself is l1-normalized
  double sum = 0.0;
  for (std::size_t d = 0; d < 72; ++d) sum += z.at(0, d, 1);
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("every direction is covered by some source") {
  DirectionGrid grid = DirectionGrid::uniform(72);
  SpatialWeightTensor z = add_background_source(restore_spatial_weights(one_track(4, 2.0, 0.2), grid), 0.01);
  for (std::size_t n = 0; n < 4; ++n)
    for (std::size_t d = 0; d < 72; ++d) {
      double any = 0.0;
      for (std::size_t p = 0; p < z.num_sources; ++p) any += z.at(n, d, p);
      CHECK(any > 0.0);
    }
}

TEST_CASE("one-hot z reproduces the kernel; zero frequency gives the all-ones scm") {
  DirectionGrid grid = DirectionGrid::uniform(24);
  const std::size_t F = 9;
  DoaKernelSet kernels(default_geometry(), grid, F, 16, 24000.0);
  SpatialWeightTensor z;
  z.num_frames = 1;
  z.num_directions = 24;
  z.num_sources = 1;
  z.z.assign(24, 0.0);
  z.active.assign(1, 1);
  z.at(0, 7, 0) = 1.0;

  auto H = source_scm_dense(z, kernels, 5, 0, 0);
  auto W = kernels.dense(5, 7);
  for (std::size_t i = 0; i < H.size(); ++i) CHECK(std::abs(H[i] - W[i]) < 1e-12);

  auto H0 = source_scm_dense(z, kernels, 0, 0, 0);
  for (const auto& h : H0) CHECK(std::abs(h - cplx(1.0, 0.0)) < 1e-12);
}

TEST_CASE("diffuse field shrinks off-diagonal scm entries") {
  ArrayGeometry g;
  g.mic_positions = {{-0.05, 0.0, 0.0}, {0.05, 0.0, 0.0}};
  DirectionGrid grid = DirectionGrid::uniform(72);
  const std::size_t F = 129;
  DoaKernelSet kernels(g, grid, F, 256, 24000.0);
  SpatialWeightTensor z;
  z.num_frames = 1;
  z.num_directions = 72;
  z.num_sources = 1;
  z.z.assign(72, 1.0 / 72.0);
  z.active.assign(1, 1);
  for (std::size_t f = 20; f < F; f += 20) {
    auto H = source_scm_dense(z, kernels, f, 0, 0);
    CHECK(std::abs(H[1]) < H[0].real());
  }
}

TEST_CASE("trace of mixture scm against source scm is nonnegative") {
  DirectionGrid grid = DirectionGrid::uniform(36);
  const std::size_t F = 17;
  DoaKernelSet kernels(default_geometry(), grid, F, 32, 24000.0);
  Spectrogram s = random_spec(F, 3, 4, 32, 9);
  MixtureScmTensor x = mixture_scm(s);
  SpatialWeightTensor z =
      add_background_source(restore_spatial_weights(one_track(3, -1.0, 0.15), grid), 0.01);
  for (std::size_t f = 0; f < F; ++f)
    for (std::size_t n = 0; n < 3; ++n)
      for (std::size_t p = 0; p < z.num_sources; ++p) {
        auto X = x.dense(f, n);
        auto H = source_scm_dense(z, kernels, f, n, p);
        cplx tr(0.0, 0.0);
        const std::size_t M = 4;
        for (std::size_t i = 0; i < M; ++i)
          for (std::size_t k = 0; k < M; ++k) tr += X[i * M + k] * H[k * M + i];
        CHECK(std::abs(tr.imag()) < 1e-9);
        CHECK(tr.real() > -1e-9);
      }
}
