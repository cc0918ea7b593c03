#include "vrp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "vrp/error.hpp"
#include "vrp/parallel.hpp"
#include "vrp/random.hpp"
#include "vrp/summation.hpp"

namespace vrp::stats {

namespace {

void require_pairs(std::span<const double> xs, std::span<const double> ys, std::size_t min,
                   const char* what) {
  if (xs.size() != ys.size()) {
    throw DimensionError(std::string(what) + ": x and y differ in length");
  }
  if (xs.size() < min) {
    throw DimensionError(std::string(what) + ": needs at least " + std::to_string(min) +
                         " points");
  }
}

double sample_variance(std::span<const double> xs) {
  const double m = ordered_mean(xs);
  std::vector<double> sq(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) sq[i] = (xs[i] - m) * (xs[i] - m);
  return pairwise_sum(sq) / static_cast<double>(xs.size() - 1);
}

}  // namespace

double pearson(std::span<const double> xs, std::span<const double> ys) {
  require_pairs(xs, ys, 2, "pearson");
  const double mx = ordered_mean(xs);
  const double my = ordered_mean(ys);
  std::vector<double> sxy(xs.size()), sxx(xs.size()), syy(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxy[i] = dx * dy;
    sxx[i] = dx * dx;
    syy[i] = dy * dy;
  }
  const double vx = pairwise_sum(sxx);
  const double vy = pairwise_sum(syy);
  if (!(vx > 0.0) || !(vy > 0.0)) throw DegenerateInputError("pearson: zero variance");
  const double r = pairwise_sum(sxy) / std::sqrt(vx * vy);
  return std::clamp(r, -1.0, 1.0);
}

std::vector<double> average_ranks(std::span<const double> xs) {
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<double> ranks(xs.size());
  std::size_t start = 0;
  while (start < order.size()) {
    std::size_t end = start + 1;
    while (end < order.size() && xs[order[end]] == xs[order[start]]) ++end;
    // positions start..end-1 hold ranks start+1..end
    const double rank = 0.5 * static_cast<double>(start + 1 + end);
    for (std::size_t k = start; k < end; ++k) ranks[order[k]] = rank;
    start = end;
  }
  return ranks;
}

double spearman(std::span<const double> xs, std::span<const double> ys) {
  require_pairs(xs, ys, 2, "spearman");
  const auto rx = average_ranks(xs);
  const auto ry = average_ranks(ys);
  return pearson(rx, ry);
}

CorrelationReport correlate(std::span<const double> xs, std::span<const double> ys) {
  return {pearson(xs, ys), spearman(xs, ys), xs.size()};
}

double scott_bandwidth(std::span<const double> xs) {
  if (xs.size() < 2) throw InsufficientDataError("bandwidth needs at least two points");
  const double sd = std::sqrt(sample_variance(xs));
  const double h = std::pow(static_cast<double>(xs.size()), -0.2) * sd;
  return std::max(h, kBandwidthFloor);
}

namespace {

// Adds the Gaussian KDE of xs (bandwidth h) evaluated on the grid lo + k*dx.
// Kernels are propagated from the nearest grid point with the exact
// multiplicative recurrence of exp(-z^2/2) on a uniform lattice.
void accumulate_kde(std::span<const double> xs, double h, double lo, double dx,
                    std::vector<double>& density) {
  constexpr double kNegligible = 1e-18;
  const std::size_t G = density.size();
  const double d = dx / h;
  const double q = std::exp(-d * d);
  const double norm = 1.0 / (static_cast<double>(xs.size()) * h * std::sqrt(2.0 * std::numbers::pi));

  for (double x : xs) {
    const double pos = (x - lo) / dx;
    const auto k0 = static_cast<std::size_t>(
        std::clamp(std::llround(pos), 0LL, static_cast<long long>(G - 1)));
    const double z0 = (lo + static_cast<double>(k0) * dx - x) / h;
    const double e0 = std::exp(-0.5 * z0 * z0);
    density[k0] += norm * e0;

    double e = e0;
    double r = std::exp(-z0 * d - 0.5 * d * d);
    for (std::size_t k = k0 + 1; k < G; ++k) {
      e *= r;
      r *= q;
      density[k] += norm * e;
      if (e < kNegligible && z0 + static_cast<double>(k - k0) * d > 0.0) break;
    }
    e = e0;
    r = std::exp(z0 * d - 0.5 * d * d);
    for (std::size_t k = k0; k-- > 0;) {
      e *= r;
      r *= q;
      density[k] += norm * e;
      if (e < kNegligible && z0 - static_cast<double>(k0 - k) * d < 0.0) break;
    }
  }
}

}  // namespace

double kde_overlap(std::span<const double> a, std::span<const double> b,
                   std::optional<double> bandwidth) {
  if (a.size() < 2 || b.size() < 2) {
    throw InsufficientDataError("kde_overlap needs at least two points per set");
  }
  if (bandwidth && !(*bandwidth > 0.0)) throw ConfigurationError("bandwidth must be positive");
  const double ha = bandwidth ? *bandwidth : scott_bandwidth(a);
  const double hb = bandwidth ? *bandwidth : scott_bandwidth(b);
  const double h = std::max(ha, hb);

  const auto [amin, amax] = std::minmax_element(a.begin(), a.end());
  const auto [bmin, bmax] = std::minmax_element(b.begin(), b.end());
  const double lo = std::min(*amin, *bmin) - 3.0 * h;
  const double hi = std::max(*amax, *bmax) + 3.0 * h;
  const std::size_t G = kOverlapGridPoints;
  const double dx = (hi - lo) / static_cast<double>(G - 1);

  std::vector<double> fa(G, 0.0), fb(G, 0.0);
  accumulate_kde(a, ha, lo, dx, fa);
  accumulate_kde(b, hb, lo, dx, fb);

  std::vector<double> m(G);
  for (std::size_t k = 0; k < G; ++k) m[k] = std::min(fa[k], fb[k]);
  m.front() *= 0.5;
  m.back() *= 0.5;
  return std::clamp(pairwise_sum(m) * dx, 0.0, 1.0);
}

OverlapReport mean_overlap(const Bench& bench, const ScoreMatrix& scores, unsigned threads) {
  if (!bench.labels) throw ConfigurationError("overlap analysis needs ground-truth labels");
  if (scores.size() != bench.models.size()) {
    throw DimensionError("overlap: one score vector per model required");
  }
  for (const auto& s : scores) {
    if (s.size() != bench.n) throw DimensionError("overlap: score vector length differs from n");
  }
  const LabelVector& y = *bench.labels;
  std::vector<double> per(bench.n, 0.0);
  std::vector<std::uint8_t> used(bench.n, 0);

  parallel_for(bench.n, threads, [&](std::size_t begin, std::size_t end) {
    std::vector<double> right, wrong;
    for (std::size_t i = begin; i < end; ++i) {
      right.clear();
      wrong.clear();
      for (std::size_t m = 0; m < bench.models.size(); ++m) {
        const bool correct = bench.models[m].original.predicted(i) == y[i];
        (correct ? right : wrong).push_back(scores[m][i]);
      }
      if (right.size() < 2 || wrong.size() < 2) continue;
      per[i] = kde_overlap(right, wrong);
      used[i] = 1;
    }
  });

  OverlapReport report;
  for (std::size_t i = 0; i < bench.n; ++i) {
    if (used[i]) {
      report.samples.push_back(i);
      report.per_sample.push_back(per[i]);
    } else {
      ++report.excluded;
    }
  }
  if (report.samples.empty()) {
    throw InsufficientDataError("no sample has two correct and two incorrect models");
  }
  report.mean = ordered_mean(report.per_sample);
  return report;
}

OverlapReport mean_overlap(const Bench& bench, ProxyKind kind,
                           std::span<const ProxyContext> contexts,
                           const std::optional<VicinalConfig>& cfg, unsigned threads) {
  if (!bench.labels) throw ConfigurationError("overlap analysis needs ground-truth labels");
  if (contexts.size() != bench.models.size()) {
    throw DimensionError("overlap: one proxy context per model required");
  }
  ScoreMatrix scores(bench.models.size());
  parallel_for(bench.models.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t m = begin; m < end; ++m) {
      auto s = per_sample_scores(kind, bench.models[m], contexts[m]);
      scores[m] = cfg ? vicinal_scores(s, bench.models[m], *cfg).expectations : std::move(s);
    }
  });
  return mean_overlap(bench, scores, threads);
}

namespace {

struct WeightedLine {
  double slope;
  double intercept;
};

WeightedLine weighted_least_squares(std::span<const double> xs, std::span<const double> ys,
                                    std::span<const double> w) {
  double sw = 0.0, sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sw += w[i];
    sx += w[i] * xs[i];
    sy += w[i] * ys[i];
  }
  const double mx = sx / sw;
  const double my = sy / sw;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    sxx += w[i] * dx * dx;
    sxy += w[i] * dx * (ys[i] - my);
  }
  if (!(sxx > 0.0)) throw DegenerateInputError("linear fit: x has zero variance");
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

double median_of(std::vector<double> v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

// Linear-interpolation quantile of sorted data.
double quantile_sorted(std::span<const double> sorted, double p) {
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

LinearFit huber_fit(std::span<const double> xs, std::span<const double> ys) {
  require_pairs(xs, ys, 3, "huber_fit");
  constexpr std::size_t kMaxIterations = 50;
  constexpr double kTolerance = 1e-10;
  constexpr double kMadToSigma = 0.6744897501960817;

  std::vector<double> w(xs.size(), 1.0);
  WeightedLine line = weighted_least_squares(xs, ys, w);
  std::vector<double> abs_resid(xs.size());
  LinearFit fit{line.slope, line.intercept, 0};

  for (std::size_t iter = 1; iter <= kMaxIterations; ++iter) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
      abs_resid[i] = std::abs(ys[i] - (line.intercept + line.slope * xs[i]));
    }
    const double scale = median_of(abs_resid) / kMadToSigma;
    if (!(scale > 0.0)) break;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double u = abs_resid[i] / scale;
      w[i] = u <= kHuberTuning ? 1.0 : kHuberTuning / u;
    }
    const WeightedLine next = weighted_least_squares(xs, ys, w);
    const double change =
        std::max(std::abs(next.slope - line.slope), std::abs(next.intercept - line.intercept));
    line = next;
    fit = {line.slope, line.intercept, iter};
    if (change < kTolerance * (1.0 + std::abs(line.slope) + std::abs(line.intercept))) break;
  }
  return fit;
}

FitBand bootstrap_linear_fit(std::span<const double> xs, std::span<const double> ys,
                             std::size_t n_boot, double confidence, std::uint64_t seed,
                             std::size_t grid_points) {
  require_pairs(xs, ys, 3, "bootstrap_linear_fit");
  if (n_boot < 1) throw ConfigurationError("bootstrap needs at least one replicate");
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw ConfigurationError("confidence must lie in (0, 1)");
  }
  if (grid_points < 2) throw ConfigurationError("band needs at least two grid points");

  const LinearFit point = huber_fit(xs, ys);
  const std::size_t n = xs.size();

  std::vector<LinearFit> fits;
  fits.reserve(n_boot);
  std::vector<double> bx(n), by(n);
  for (std::size_t b = 0; b < n_boot; ++b) {
    // Redraw a replicate whose xs collapse to a single value.
    for (std::uint64_t attempt = 0;; ++attempt) {
      for (std::size_t t = 0; t < n; ++t) {
        const std::uint64_t h = hash_combine(seed, b, attempt * n + t);
        const std::size_t idx = static_cast<std::size_t>(h % n);
        bx[t] = xs[idx];
        by[t] = ys[idx];
      }
      const auto [mn, mx] = std::minmax_element(bx.begin(), bx.end());
      if (*mn < *mx) break;
      if (attempt > 64) {
        throw DegenerateInputError("bootstrap: x has zero variance");
      }
    }
    fits.push_back(huber_fit(bx, by));
  }

  FitBand band;
  band.slope = point.slope;
  band.intercept = point.intercept;
  band.confidence = confidence;
  const auto [mn, mx] = std::minmax_element(xs.begin(), xs.end());
  const double alpha = 0.5 * (1.0 - confidence);
  std::vector<double> at_x(n_boot);
  for (std::size_t g = 0; g < grid_points; ++g) {
    const double x = *mn + (*mx - *mn) * static_cast<double>(g) /
                               static_cast<double>(grid_points - 1);
    for (std::size_t b = 0; b < n_boot; ++b) at_x[b] = fits[b].intercept + fits[b].slope * x;
    std::sort(at_x.begin(), at_x.end());
    band.x.push_back(x);
    band.lower.push_back(quantile_sorted(at_x, alpha));
    band.upper.push_back(quantile_sorted(at_x, 1.0 - alpha));
  }
  return band;
}

namespace {

// Continued fraction for the incomplete beta function (modified Lentz).
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIterations = 300;
  constexpr double kEps = 1e-15;
  constexpr double kTiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw ConfigurationError("incomplete beta needs a, b > 0");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_cdf(double t, double df) {
  if (!(df > 0.0)) throw ConfigurationError("student t needs df > 0");
  if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
  const double x = df / (df + t * t);
  const double tail = 0.5 * incomplete_beta(0.5 * df, 0.5, x);
  return t > 0.0 ? 1.0 - tail : tail;
}

WelchResult welch_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) {
    throw InsufficientDataError("welch t-test needs at least two observations per sample");
  }
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double ma = ordered_mean(a);
  const double mb = ordered_mean(b);
  const double va = sample_variance(a) / na;
  const double vb = sample_variance(b) / nb;
  const double se2 = va + vb;

  WelchResult r;
  if (!(se2 > 0.0)) {
    r.df = na + nb - 2.0;
    if (ma == mb) {
      r.t = 0.0;
      r.p_value = 1.0;
    } else {
      r.t = ma > mb ? std::numeric_limits<double>::infinity()
                    : -std::numeric_limits<double>::infinity();
      r.p_value = 0.0;
    }
    return r;
  }
  r.t = (ma - mb) / std::sqrt(se2);
  r.df = se2 * se2 / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
  r.p_value = std::clamp(incomplete_beta(0.5 * r.df, 0.5, r.df / (r.df + r.t * r.t)), 0.0, 1.0);
  return r;
}

}  // namespace vrp::stats
