#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "ecglab/ecg.hpp"
#include "ecglab/stable.hpp"

namespace ecglab {

/// b_n = abar_n^(1/alpha).
double b_n(double abar, double alpha);

struct TiltedDraw {
  BoundaryPoint point{CirclePoint{}};
  double log_ratio = 0.0;  // log(A_n(U) / V_n)
  std::size_t proposals = 0;
};

/// Rejection sampler for the law proportional to A_n(xi) mu(dxi): propose
/// xi ~ mu and accept with probability A_n(xi) / V_n <= 1. Throws
/// SamplerCollapse after 10^5 proposals without an acceptance.
TiltedDraw sample_tilted_boundary(const Model& model, int n, Rng& rng);

/// One term eps_j Gamma_j^(-1/alpha) of the series with its boundary point.
struct SeriesTerm {
  double weight = 0.0;  // eps_j Gamma_j^(-1/alpha)
  double gamma = 0.0;   // Gamma_j
  BoundaryPoint point{CirclePoint{}};
  double log_ratio = 0.0;  // log(A_n(U_j) / V_n)
};

/// The randomness behind one realization of {Y_g : g in B_n}:
/// Y_g = scale sum_j weight_j (D_g(U_j) / A_n(U_j))^(1/alpha) with
/// scale = b_n c_alpha^(1/alpha).
struct SeriesRealization {
  int n = 0;
  double alpha = 1.5;
  double b_n = 1.0;
  double scale = 1.0;
  std::vector<SeriesTerm> terms;
  std::size_t proposals = 0;

  double acceptance_rate() const {
    return proposals ? static_cast<double>(terms.size()) / static_cast<double>(proposals) : 0.0;
  }
};

/// Draws J terms. Gamma_j are partial sums of unit exponentials, eps_j fair
/// signs, U_j i.i.d. tilted draws. Throws SamplerCollapse when the running
/// acceptance rate is below 1e-3 after 10^4 proposals.
SeriesRealization draw_series(const Model& model, int n, double alpha, double abar, std::size_t truncation, Rng& rng);

/// Y_g using the first `terms` terms (all when terms == 0).
double field_value(const Model& model, const SeriesRealization& series, const GroupElement& g, std::size_t terms = 0);

struct FieldSample {
  std::vector<GroupElement> elements;
  std::vector<double> values;
};

/// Evaluates Y_g for every g in B_n directly; cost |B_n| J.
FieldSample simulate_field(const Model& model, const SeriesRealization& series);

/// max |Y_g| over the sample.
double partial_maxima(const FieldSample& field);
double partial_maxima(std::span<const double> values);

/// M = max over g in B_radius of |Y_g| for the field of `series`
/// (radius <= series.n), using the first `terms` terms (0: all). Trees walk
/// a prefix trie of the U_j, so the cost is O(J n) instead of O(|B_n| J).
double field_maximum(const Model& model, const SeriesRealization& series, int radius, std::size_t terms = 0);

struct MaximaSample {
  int n = 0;
  double alpha = 1.5;
  double v_n_root = 1.0;  // V_n^(1/alpha)
  double b_n = 1.0;
  std::vector<double> maxima;
  double acceptance_rate = 0.0;

  std::vector<double> over_volume() const;
  std::vector<double> over_b_n() const;
};

struct SeriesOptions {
  std::size_t truncation = 1000;
  std::size_t replicates = 400;
  std::uint64_t seed = kDefaultSeed;
  int threads = 1;
  std::size_t abar_samples = 4000;  // Monte Carlo samples for abar_n when not exact
};

/// R replicates of M_n; replicate r uses RNG stream (seed, n, r).
MaximaSample sample_maxima(const Model& model, int n, double alpha, const SeriesOptions& options);

/// abar_n: exact V_n for the full tree, Monte Carlo otherwise.
double estimate_abar(const Model& model, int n, const SeriesOptions& options);

struct FrechetFit {
  double kappa = 0.0;
  double ks = 0.0;
};

/// kappa = median(M / b_n) / (c_alpha / log 2)^(1/alpha); KS distance of
/// M / (b_n kappa) to exp(-c_alpha lambda^-alpha). Needs >= 100 replicates.
FrechetFit frechet_test(const MaximaSample& sample);
FrechetFit frechet_test(std::span<const double> normalized, double alpha);

struct DichotomyRow {
  int n = 0;
  double median = 0.0;  // of M_n / V_n^(1/alpha)
  double q1 = 0.0;
  double q3 = 0.0;
  double median_over_b = 0.0;
  double acceptance_rate = 0.0;
  bool fitted = false;  // kappa and ks need >= 100 replicates
  double kappa = 0.0;
  double ks = 0.0;
};

struct DichotomyReport {
  std::string model;
  double alpha = 1.5;
  std::vector<DichotomyRow> rows;
  std::vector<MaximaSample> samples;
  std::string verdict;  // iid-like | degenerate | inconclusive
  double spread = 0.0;  // max median / min median
  double decay = 0.0;   // median(first) / median(last)

  void write_csv(std::ostream& out) const;
  nlohmann::json summary() const;
};

/// Verdict: degenerate when median(first) / median(last) >= degenerate_factor;
/// iid-like when all medians lie within iid_band of each other and above
/// floor_fraction times the first; inconclusive otherwise or with R = 1.
struct DichotomyOptions {
  double degenerate_factor = 2.0;
  double iid_band = 2.0;
  double floor_fraction = 0.1;
};
DichotomyReport dichotomy_experiment(const Model& model, const std::vector<int>& radii, double alpha,
                                     const SeriesOptions& options, const DichotomyOptions& verdict = {});

struct TruncationDiagnostics {
  std::size_t truncation = 0;
  double median_j = 0.0;
  double median_2j = 0.0;
  double relative_change = 0.0;
  double tail_proxy = 0.0;   // sum_{j > J} j^(-1/alpha)
  double gamma_ratio = 0.0;  // Gamma_J / J in the first replicate
  bool gamma_flag = false;   // |Gamma_J / J - 1| >= 0.2
};

/// Doubles J on common random numbers: the first J terms of each 2J series
/// are exactly the J-term series.
TruncationDiagnostics truncation_check(const Model& model, int n, double alpha, const SeriesOptions& options);

/// sum_{j > J} j^(-s) for s = 1/alpha > 1, by Euler-Maclaurin; +inf for s <= 1.
double series_tail_proxy(std::size_t truncation, double alpha);

}  // namespace ecglab
