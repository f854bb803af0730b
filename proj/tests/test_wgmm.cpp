#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "movsep/wgmm.hpp"

using namespace movsep;

namespace {

std::vector<double> uniform_grid(std::size_t count) {
  std::vector<double> g(count);
  for (std::size_t d = 0; d < count; ++d)
    g[d] = wrap_angle(kTwoPi * double(d) / double(count));
  return g;
}

WgmmFrame uniform_init(std::size_t K, double var = 0.25) {
  WgmmFrame init;
  init.components.resize(K);
  for (std::size_t k = 0; k < K; ++k) {
    init.components[k].mean = wrap_angle(kTwoPi * double(k) / double(K));
    init.components[k].var = var;
    init.components[k].weight = 1.0 / double(K);
  }
  return init;
}

}  // namespace

TEST_CASE("wrapped gaussian at its mean, var 0.1") {
  // wrap terms beyond l=0 are < 1e-20 here
  CHECK(wrapped_gaussian_pdf(0.3, 0.3, 0.1) ==
        doctest::Approx(1.0 / std::sqrt(kTwoPi * 0.1)).epsilon(1e-6));
  CHECK(wrapped_gaussian_pdf(0.3, 0.3, 0.1) == doctest::Approx(1.2616).epsilon(1e-3));
}

TEST_CASE("wrapped gaussian is 2pi periodic") {
  for (double theta : {-2.0, -0.4, 0.0, 1.7, 3.0})
    CHECK(wrapped_gaussian_pdf(theta, 0.8, 0.3) ==
          doctest::Approx(wrapped_gaussian_pdf(theta + kTwoPi, 0.8, 0.3)).epsilon(1e-12));
}

TEST_CASE("wrapped gaussian integrates to one over the circle") {
  // trapezoid quadrature oracle on a fine grid
  for (double var : {0.05, 0.3, 1.0}) {
    const std::size_t Q = 20000;
    double integral = 0.0;
    for (std::size_t i = 0; i < Q; ++i) {
      const double theta = -kPi + kTwoPi * double(i) / double(Q);
      integral += wrapped_gaussian_pdf(theta, 0.7, var) * kTwoPi / double(Q);
    }
    CHECK(integral == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("non-positive variance is rejected") {
  CHECK_THROWS_AS(wrapped_gaussian_pdf(0.0, 0.0, 0.0), InvalidInput);
  CHECK_THROWS_AS(wrapped_gaussian_pdf(0.0, 0.0, -0.1), InvalidInput);
}

TEST_CASE("single-component EM recovers a wrapped gaussian histogram") {
  const auto grid = uniform_grid(72);
  std::vector<double> hist(72);
  for (std::size_t d = 0; d < 72; ++d) hist[d] = wrapped_gaussian_pdf(grid[d], kPi / 4.0, 0.1);

  WgmmFrame init = uniform_init(1);
  init.components[0].mean = 0.0;
  WgmmFit fit = wgmm_em(hist, grid, init, 200, 1e-9);
  REQUIRE(fit.frame.components.size() == 1);
  CHECK(std::abs(wrap_angle(fit.frame.components[0].mean - kPi / 4.0)) < 0.01);
  CHECK(fit.frame.components[0].var == doctest::Approx(0.1).epsilon(0.10));
  CHECK(fit.frame.components[0].weight == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("weights sum to one after EM for any K") {
  const auto grid = uniform_grid(36);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t K : {1u, 2u, 5u}) {
    std::vector<double> hist(36);
    for (auto& h : hist) h = u(rng);
    WgmmFit fit = wgmm_em(hist, grid, uniform_init(K), 30, 1e-6);
    double sum = 0.0;
    for (const auto& c : fit.frame.components) {
      sum += c.weight;
      CHECK(c.weight >= 0.0);
      CHECK(c.var > 0.0);
      CHECK(c.mean >= -kPi);
      CHECK(c.mean < kPi);
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("two well-separated peaks recovered with K=2") {
  const auto grid = uniform_grid(72);
  std::vector<double> hist(72);
  for (std::size_t d = 0; d < 72; ++d)
    hist[d] = 0.5 * wrapped_gaussian_pdf(grid[d], 0.0, 0.05) +
              0.5 * wrapped_gaussian_pdf(grid[d], kPi, 0.05);

  WgmmFrame init = uniform_init(2);
  init.components[0].mean = -0.5;
  init.components[1].mean = kPi - 0.5;
  WgmmFit fit = wgmm_em(hist, grid, init, 300, 1e-10);
  std::vector<WgmmComponent> comps = fit.frame.components;
  std::sort(comps.begin(), comps.end(),
            [](const WgmmComponent& a, const WgmmComponent& b) {
              return std::abs(wrap_angle(a.mean)) < std::abs(wrap_angle(b.mean));
            });
  CHECK(std::abs(wrap_angle(comps[0].mean - 0.0)) < 0.05);
  CHECK(std::abs(wrap_angle(comps[1].mean - kPi)) < 0.05);
  CHECK(comps[0].weight == doctest::Approx(0.5).epsilon(0.1));
  CHECK(comps[1].weight == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("weighted log-likelihood is non-decreasing across EM iterations") {
  const auto grid = uniform_grid(48);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> hist(48);
    for (auto& h : hist) h = u(rng);

    WgmmFrame frame = uniform_init(3);
    double prev = wgmm_log_likelihood(hist, grid, frame);
    for (int it = 0; it < 25; ++it) {
      WgmmFit fit = wgmm_em(hist, grid, frame, 1, 0.0);  // one EM step at a time
      frame = fit.frame;
      const double ll = wgmm_log_likelihood(hist, grid, frame);
      CHECK(ll >= prev - 1e-8);
      prev = ll;
    }
  }
}

TEST_CASE("all-zero histogram is rejected") {
  const auto grid = uniform_grid(12);
  std::vector<double> hist(12, 0.0);
  CHECK_THROWS_AS(wgmm_em(hist, grid, uniform_init(2), 10, 1e-6), InvalidInput);
}
