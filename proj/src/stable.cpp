#include "ecglab/stable.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

namespace ecglab {

void StableParams::validate() const {
  if (!(alpha > 0.0 && alpha < 2.0)) throw std::invalid_argument(fmt::format("alpha = {} outside (0, 2)", alpha));
  if (!(scale > 0.0)) throw std::invalid_argument(fmt::format("scale = {} must be positive", scale));
}

double c_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 2.0)) throw std::invalid_argument(fmt::format("alpha = {} outside (0, 2)", alpha));
  // Removable singularity at 1; the ratio is smooth and equals 2/pi there.
  if (std::abs(alpha - 1.0) < 1e-7) return 2.0 / std::numbers::pi;
  return (1.0 - alpha) / (std::tgamma(2.0 - alpha) * std::cos(std::numbers::pi * alpha / 2.0));
}

double sample_sas(const StableParams& params, Rng& rng) {
  const double alpha = params.alpha;
  const double v = std::numbers::pi * (rng.uniform() - 0.5);
  if (alpha == 1.0) return params.scale * std::tan(v);
  const double w = rng.exponential();
  const double x = std::sin(alpha * v) / std::pow(std::cos(v), 1.0 / alpha) *
                   std::pow(std::cos(v - alpha * v) / w, (1.0 - alpha) / alpha);
  return params.scale * x;
}

double frechet_cdf(double lambda, double alpha) {
  if (lambda <= 0.0) return 0.0;
  return std::exp(-c_alpha(alpha) * std::pow(lambda, -alpha));
}

double frechet_quantile(double p, double alpha) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("quantile level outside (0, 1)");
  return std::pow(c_alpha(alpha) / -std::log(p), 1.0 / alpha);
}

double sample_frechet(double alpha, Rng& rng) { return frechet_quantile(rng.uniform(), alpha); }

std::complex<double> empirical_cf(std::span<const double> sample, double theta) {
  double re = 0, im = 0;
  for (double x : sample) {
    re += std::cos(theta * x);
    im += std::sin(theta * x);
  }
  const double n = static_cast<double>(sample.size());
  return {re / n, im / n};
}

double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw std::invalid_argument("KS statistic of an empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double ks_two_sample(std::vector<double> x, std::vector<double> y) {
  if (x.empty() || y.empty()) throw std::invalid_argument("KS statistic of an empty sample");
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double nx = static_cast<double>(x.size()), ny = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0;
  while (i < x.size() && j < y.size()) {
    const double t = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == t) ++i;
    while (j < y.size() && y[j] == t) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
  }
  return d;
}

double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw std::invalid_argument("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

double median(std::vector<double> values) { return quantile(std::move(values), 0.5); }

}  // namespace ecglab
