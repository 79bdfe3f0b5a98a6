#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "ecglab/rng.hpp"

namespace ecglab {

struct StableParams {
  double alpha = 1.5;
  double scale = 1.0;

  /// Throws std::invalid_argument unless 0 < alpha < 2 and scale > 0.
  void validate() const;
};

/// Tail constant: lim lambda^alpha P(|Y| > lambda) for a standard SaS law,
/// (1 - alpha) / (Gamma(2 - alpha) cos(pi alpha / 2)), and 2/pi at alpha = 1.
double c_alpha(double alpha);

/// One SaS(scale) draw by the Chambers-Mallows-Stuck transform.
double sample_sas(const StableParams& params, Rng& rng);

/// Frechet law exp(-c_alpha lambda^-alpha) for lambda > 0.
double frechet_cdf(double lambda, double alpha);
double frechet_quantile(double p, double alpha);
double sample_frechet(double alpha, Rng& rng);

/// (1/N) sum exp(i theta x).
std::complex<double> empirical_cf(std::span<const double> sample, double theta);

/// sup |F_n - F| against a continuous CDF.
double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf);
/// sup |F_n - G_m| between two empirical CDFs.
double ks_two_sample(std::vector<double> x, std::vector<double> y);

/// Empirical p-quantile by linear interpolation (type 7).
double quantile(std::vector<double> values, double p);
double median(std::vector<double> values);

}  // namespace ecglab
