#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "vrp/core_model.hpp"
#include "vrp/proxies.hpp"
#include "vrp/vicinal.hpp"

namespace vrp::stats {

struct CorrelationReport {
  double pearson = 0.0;
  double spearman = 0.0;
  std::size_t n_points = 0;
};

// Product-moment correlation. Throws DimensionError on length mismatch or
// fewer than two points, DegenerateInputError on zero variance.
double pearson(std::span<const double> xs, std::span<const double> ys);

// Average ranks (1-based); tied values share the mean of their ranks.
std::vector<double> average_ranks(std::span<const double> xs);

// Pearson of average-rank transforms.
double spearman(std::span<const double> xs, std::span<const double> ys);

CorrelationReport correlate(std::span<const double> xs, std::span<const double> ys);

inline constexpr std::size_t kOverlapGridPoints = 2048;
inline constexpr double kBandwidthFloor = 1e-3;

// Scott's rule n^(-1/5) * sample standard deviation, floored at kBandwidthFloor.
double scott_bandwidth(std::span<const double> xs);

// Overlap coefficient of two Gaussian KDEs: the integral of min(f_a, f_b)
// over a uniform grid covering both samples +-3 bandwidths, clamped to [0, 1].
// A given bandwidth applies to both sets; otherwise each set uses Scott's rule.
// Throws InsufficientDataError when either set has fewer than two points.
double kde_overlap(std::span<const double> a, std::span<const double> b,
                   std::optional<double> bandwidth = std::nullopt);

struct OverlapReport {
  std::vector<std::size_t> samples;  // test samples that met the two-per-side rule
  std::vector<double> per_sample;    // overlap coefficient for each of `samples`
  double mean = 0.0;
  std::size_t excluded = 0;
};

// Per-sample score matrix: scores[m][i] for model m and sample i.
using ScoreMatrix = std::vector<std::vector<double>>;

// For each sample, splits models by whether they predict it correctly and
// compares the two score distributions. Samples with fewer than two models on
// either side are excluded. Throws ConfigurationError without labels and
// InsufficientDataError when no sample qualifies.
OverlapReport mean_overlap(const Bench& bench, const ScoreMatrix& scores,
                           unsigned threads = 1);

// Convenience form computing the scores: empirical when cfg is empty,
// vicinal otherwise. contexts[m] belongs to bench.models[m].
OverlapReport mean_overlap(const Bench& bench, ProxyKind kind,
                           std::span<const ProxyContext> contexts,
                           const std::optional<VicinalConfig>& cfg, unsigned threads = 1);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t iterations = 0;
};

inline constexpr double kHuberTuning = 1.345;

// Huber M-estimate by iteratively reweighted least squares with a MAD scale.
// Throws DimensionError for fewer than three points, DegenerateInputError for
// constant xs.
LinearFit huber_fit(std::span<const double> xs, std::span<const double> ys);

struct FitBand {
  double slope = 0.0;
  double intercept = 0.0;
  double confidence = 0.95;
  std::vector<double> x;
  std::vector<double> lower;
  std::vector<double> upper;
};

// Point fit plus a pointwise percentile band over n_boot resampled Huber fits,
// evaluated on `grid_points` evenly spaced x values spanning the data.
// Replicate b draws from its own counter-based substream of seed.
FitBand bootstrap_linear_fit(std::span<const double> xs, std::span<const double> ys,
                             std::size_t n_boot = 1000, double confidence = 0.95,
                             std::uint64_t seed = 0, std::size_t grid_points = 64);

// Regularized incomplete beta I_x(a, b) by continued fraction.
double incomplete_beta(double a, double b, double x);

// Student-t CDF with df degrees of freedom.
double student_t_cdf(double t, double df);

struct WelchResult {
  double t = 0.0;
  double df = 0.0;
  double p_value = 1.0;
};

// Two-sided Welch t-test. Throws InsufficientDataError for fewer than two
// observations in either sample.
WelchResult welch_t_test(std::span<const double> a, std::span<const double> b);

}  // namespace vrp::stats
