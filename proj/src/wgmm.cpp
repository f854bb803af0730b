#include "movsep/wgmm.hpp"

#include <cmath>
#include <numeric>

namespace movsep {

namespace {

double gaussian_pdf(double x, double mu, double sigma2) {
  const double d = x - mu;
  return std::exp(-0.5 * d * d / sigma2) / std::sqrt(kTwoPi * sigma2);
}

constexpr double kVarFloor = 1e-6;

}  // namespace

double wrapped_gaussian_pdf(double theta, double mu, double sigma2, int wrap_order) {
  if (sigma2 <= 0.0) throw InvalidInput("wrapped_gaussian_pdf: sigma2 must be > 0");
  double sum = 0.0;
  for (int l = -wrap_order; l <= wrap_order; ++l)
    sum += gaussian_pdf(theta, mu + kTwoPi * double(l), sigma2);
  return sum;
}

double wgmm_log_likelihood(const std::vector<double>& histogram,
                           const std::vector<double>& bin_angles, const WgmmFrame& frame) {
  double ll = 0.0;
  for (std::size_t d = 0; d < histogram.size(); ++d) {
    if (histogram[d] <= 0.0) continue;
    double p = 0.0;
    for (const auto& c : frame.components)
      p += c.weight * wrapped_gaussian_pdf(bin_angles[d], c.mean, c.var);
    ll += histogram[d] * std::log(std::max(p, 1e-300));
  }
  return ll;
}

WgmmFit wgmm_em(const std::vector<double>& histogram, const std::vector<double>& bin_angles,
                const WgmmFrame& init, int max_iter, double tol) {
  const std::size_t D = histogram.size();
  if (bin_angles.size() != D) throw InvalidInput("wgmm_em: histogram/angle size mismatch");
  const double total_mass = std::accumulate(histogram.begin(), histogram.end(), 0.0);
  if (!(total_mass > 0.0)) throw InvalidInput("wgmm_em: histogram has no mass");
  if (init.components.empty()) throw InvalidInput("wgmm_em: need at least one component");

  const std::size_t K = init.components.size();
  const int L = kWrapOrder;
  const std::size_t W = std::size_t(2 * L + 1);

  WgmmFit fit;
  fit.frame = init;
  auto& comps = fit.frame.components;
  for (auto& c : comps) {
    if (c.var <= 0.0) throw InvalidInput("wgmm_em: component variance must be > 0");
    c.mean = wrap_angle(c.mean);
  }

  std::vector<double> resp(D * K * W, 0.0);
  std::vector<double> prev_resp;

  int it = 0;
  for (; it < max_iter; ++it) {
    // E-step
    for (std::size_t d = 0; d < D; ++d) {
      double denom = 0.0;
      for (std::size_t k = 0; k < K; ++k)
        for (std::size_t w = 0; w < W; ++w) {
          const double l = double(int(w) - L);
          const double p =
              gaussian_pdf(bin_angles[d], comps[k].mean + kTwoPi * l, comps[k].var) *
              comps[k].weight;
          resp[(d * K + k) * W + w] = p;
          denom += p;
        }
      const double inv = denom > 0.0 ? 1.0 / denom : 0.0;
      for (std::size_t k = 0; k < K; ++k)
        for (std::size_t w = 0; w < W; ++w) resp[(d * K + k) * W + w] *= inv;
    }

    double max_change = 0.0;
    if (!prev_resp.empty())
      for (std::size_t i = 0; i < resp.size(); ++i)
        max_change = std::max(max_change, std::abs(resp[i] - prev_resp[i]));

    // M-step
    for (std::size_t k = 0; k < K; ++k) {
      double mass = 0.0, mean_num = 0.0;
      for (std::size_t d = 0; d < D; ++d) {
        if (histogram[d] <= 0.0) continue;
        for (std::size_t w = 0; w < W; ++w) {
          const double l = double(int(w) - L);
          const double r = resp[(d * K + k) * W + w] * histogram[d];
          mass += r;
          mean_num += (bin_angles[d] - kTwoPi * l) * r;
        }
      }
      if (mass > 1e-300) {
        comps[k].mean = mean_num / mass;
        double var_num = 0.0;
        for (std::size_t d = 0; d < D; ++d) {
          if (histogram[d] <= 0.0) continue;
          for (std::size_t w = 0; w < W; ++w) {
            const double l = double(int(w) - L);
            const double diff = bin_angles[d] - comps[k].mean - kTwoPi * l;
            var_num += diff * diff * resp[(d * K + k) * W + w] * histogram[d];
          }
        }
        comps[k].var = std::max(var_num / mass, kVarFloor);
        comps[k].mean = wrap_angle(comps[k].mean);
      }
      comps[k].weight = mass / total_mass;
    }

    if (it > 0 && max_change < tol) {
      ++it;
      break;
    }
    prev_resp = resp;
  }

  fit.iterations = it;
  fit.log_likelihood = wgmm_log_likelihood(histogram, bin_angles, fit.frame);
  return fit;
}

}  // namespace movsep
