#pragma once

#include "movsep/types.hpp"

namespace movsep {

/// Wrap-sum truncation order. For sigma^2 <= 1 rad^2 the omitted terms are
/// below 1e-12.
constexpr int kWrapOrder = 3;

/// Wrapped Gaussian density: sum_{l=-L..L} N(theta; mu + 2*pi*l, sigma2).
double wrapped_gaussian_pdf(double theta, double mu, double sigma2, int wrap_order = kWrapOrder);

/// One mixture component on the circle.
struct WgmmComponent {
  double mean = 0.0;    // radians, wrapped to [-pi, pi)
  double var = 0.25;    // radians^2
  double weight = 0.0;  // nonnegative, components sum to 1
};

struct WgmmFrame {
  std::vector<WgmmComponent> components;
  int frame = 0;
};

struct WgmmFit {
  WgmmFrame frame;
  double log_likelihood = 0.0;  // weighted by histogram mass
  int iterations = 0;
};

/// Histogram EM for a wrapped Gaussian mixture: responsibilities over
/// (component, wrap index) weighted by histogram bin mass. Iterates until the
/// max responsibility change drops below `tol` or `max_iter` is reached.
/// The weighted log-likelihood is non-decreasing across iterations.
WgmmFit wgmm_em(const std::vector<double>& histogram, const std::vector<double>& bin_angles,
                const WgmmFrame& init, int max_iter = 50, double tol = 1e-6);

/// Weighted WGMM log-likelihood of a histogram.
double wgmm_log_likelihood(const std::vector<double>& histogram,
                           const std::vector<double>& bin_angles, const WgmmFrame& frame);

}  // namespace movsep
