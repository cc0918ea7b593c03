#include "vrp/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <boost/random/beta_distribution.hpp>
#include <boost/random/exponential_distribution.hpp>
#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>
#include <boost/random/uniform_int_distribution.hpp>

#include "vrp/error.hpp"
#include "vrp/random.hpp"

namespace vrp::synth {

namespace {

using Engine = boost::random::mt19937_64;

// Stream tags.
constexpr std::uint64_t kSetupStream = 0;
constexpr std::uint64_t kModelStream = 1;
constexpr std::uint64_t kValidationStream = 2;
constexpr std::uint64_t kValidationLabelStream = 3;
constexpr std::uint64_t kInjectStream = 4;
constexpr std::uint64_t kLabelStream = 5;

constexpr double kTransformJitter = 0.05;
constexpr double kSpuriousAgreement = 0.5;

Engine stream(std::uint64_t seed, std::uint64_t tag, std::uint64_t index = 0) {
  return Engine(hash_combine(seed, tag, index));
}

double uniform(Engine& rng, double lo, double hi) {
  return lo + (hi - lo) * boost::random::uniform_01<double>()(rng);
}

std::size_t uniform_index(Engine& rng, std::size_t n) {
  return boost::random::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

// A uniformly chosen class other than cls.
std::size_t other_class(Engine& rng, std::size_t classes, std::size_t cls) {
  const std::size_t pick = uniform_index(rng, classes - 1);
  return pick >= cls ? pick + 1 : pick;
}

// Smallest peak that keeps the peak class the unique argmax.
double peak_floor(std::size_t classes) { return 1.0 / static_cast<double>(classes) + 0.01; }

double low_inverted_peak(Engine& rng, double floor) {
  return uniform(rng, floor, std::max(0.3, floor + 0.05));
}

double high_inverted_peak(Engine& rng) { return uniform(rng, 0.95, 1.0); }

double diffuse_peak(Engine& rng, double floor) {
  return uniform(rng, floor, std::max(0.5, floor + 0.05));
}

// Row with mass `peak` on cls and the rest spread by a flat Dirichlet draw.
void fill_row(Engine& rng, std::size_t cls, double peak, std::span<double> out) {
  const std::size_t C = out.size();
  boost::random::exponential_distribution<double> expo(1.0);
  double total = 0.0;
  for (std::size_t c = 0; c < C; ++c) {
    out[c] = c == cls ? 0.0 : expo(rng);
    total += out[c];
  }
  const double rest = 1.0 - peak;
  double largest = 0.0;
  for (std::size_t c = 0; c < C; ++c) {
    if (c == cls) continue;
    out[c] = total > 0.0 ? rest * out[c] / total : rest / static_cast<double>(C - 1);
    largest = std::max(largest, out[c]);
  }
  if (largest >= peak) {
    for (std::size_t c = 0; c < C; ++c) out[c] = rest / static_cast<double>(C - 1);
  }
  out[cls] = peak;
}

struct Calibration {
  double beta_mean;     // mean of the unit Beta before scaling
  double correct_shift; // added to the peak to get P(correct)
};

Calibration calibration_for(double target, double floor) {
  const double mu = std::clamp((target - floor) / (1.0 - floor), 1e-3, 1.0 - 1e-3);
  const double mean_peak = floor + (1.0 - floor) * mu;
  return {mu, target - mean_peak};
}

double draw_peak(Engine& rng, const Calibration& cal, double sharpness, double floor) {
  boost::random::beta_distribution<double> beta(cal.beta_mean * sharpness,
                                                (1.0 - cal.beta_mean) * sharpness);
  return std::clamp(floor + (1.0 - floor) * beta(rng), floor, 1.0);
}

// Systematic sampling of correctness: each entry is correct with its own
// probability and the running count never drifts from the expected count by
// more than one.
class SystematicSampler {
 public:
  explicit SystematicSampler(Engine& rng) : level_(boost::random::uniform_01<double>()(rng)) {}

  bool draw(double p) {
    const double before = std::floor(level_);
    level_ += std::clamp(p, 0.0, 1.0);
    return std::floor(level_) > before;
  }

 private:
  double level_;
};

std::vector<std::uint8_t> choose_exactly(Engine& rng, std::size_t population, std::size_t count) {
  std::vector<std::size_t> order(population);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + uniform_index(rng, population - i);
    std::swap(order[i], order[j]);
  }
  std::vector<std::uint8_t> chosen(population, 0);
  for (std::size_t i = 0; i < count; ++i) chosen[order[i]] = 1;
  return chosen;
}

std::string model_id(std::size_t m) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "model_%03zu", m);
  return buf;
}

}  // namespace

void ZooSpec::validate() const {
  if (n_samples < 1) throw ConfigurationError("zoo needs at least one sample");
  if (n_classes < 2) throw ConfigurationError("zoo needs at least two classes");
  if (n_models < 2) throw ConfigurationError("zoo needs at least two models");
  if (!(accuracy_lo >= 0.0 && accuracy_lo <= accuracy_hi && accuracy_hi <= 1.0)) {
    throw ConfigurationError("accuracy range must satisfy 0 <= lo <= hi <= 1");
  }
  if (!(spurious_rate >= 0.0 && spurious_rate <= 1.0)) {
    throw ConfigurationError("spurious rate must lie in [0, 1]");
  }
  if (!(confidence_sharpness > 0.0) || !std::isfinite(confidence_sharpness)) {
    throw ConfigurationError("confidence sharpness must be positive and finite");
  }
  if (!(view_agreement >= 0.0 && view_agreement <= 1.0)) {
    throw ConfigurationError("view agreement must lie in [0, 1]");
  }
}

Bench generate_zoo(const ZooSpec& spec) {
  spec.validate();
  const std::size_t n = spec.n_samples;
  const std::size_t C = spec.n_classes;
  const double floor = peak_floor(C);

  Engine label_rng = stream(spec.seed, kLabelStream);
  std::vector<std::uint32_t> y(n);
  for (auto& v : y) v = static_cast<std::uint32_t>(uniform_index(label_rng, C));
  Engine setup = stream(spec.seed, kSetupStream);
  std::vector<double> targets(spec.n_models), rates(spec.n_models);
  const double rate_lo = std::max(0.0, 2.0 * spec.spurious_rate - 1.0);
  const double rate_hi = std::min(1.0, 2.0 * spec.spurious_rate);
  for (std::size_t m = 0; m < spec.n_models; ++m) {
    targets[m] = uniform(setup, spec.accuracy_lo, spec.accuracy_hi);
    rates[m] = uniform(setup, rate_lo, rate_hi);
  }

  std::vector<std::uint32_t> val_y;
  if (spec.n_validation > 0) {
    Engine vl = stream(spec.seed, kValidationLabelStream);
    val_y.resize(spec.n_validation);
    for (auto& v : val_y) v = static_cast<std::uint32_t>(uniform_index(vl, C));
  }

  Bench bench;
  char name[64];
  std::snprintf(name, sizeof name, "synth-%llu", static_cast<unsigned long long>(spec.seed));
  bench.name = name;
  bench.n = n;
  bench.classes = C;
  bench.labels = LabelVector(y);
  bench.transform = Transform::parse("synthetic");

  for (std::size_t m = 0; m < spec.n_models; ++m) {
    Engine rng = stream(spec.seed, kModelStream, m);
    const Calibration cal = calibration_for(targets[m], floor);
    SystematicSampler sampler(rng);
    const auto spurious =
        choose_exactly(rng, n, static_cast<std::size_t>(std::llround(rates[m] * double(n))));
    boost::random::normal_distribution<double> jitter(0.0, kTransformJitter);

    std::vector<double> orig(n * C), trans(n * C);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double peak = draw_peak(rng, cal, spec.confidence_sharpness, floor);
      const bool correct = sampler.draw(peak + cal.correct_shift);
      const std::size_t pred = correct ? y[i] : other_class(rng, C, y[i]);
      hits += correct ? 1 : 0;

      const double agreement = spurious[i] ? kSpuriousAgreement : spec.view_agreement;
      const bool agree = boost::random::uniform_01<double>()(rng) < agreement;
      const std::size_t tcls = agree ? pred : other_class(rng, C, pred);

      double orig_peak = peak;
      double trans_peak = 0.0;
      if (spurious[i]) {
        orig_peak = correct ? low_inverted_peak(rng, floor) : high_inverted_peak(rng);
        trans_peak = diffuse_peak(rng, floor);
      } else {
        trans_peak = std::clamp(peak + jitter(rng), floor, 0.999);
      }
      fill_row(rng, pred, orig_peak, std::span<double>(orig).subspan(i * C, C));
      fill_row(rng, tcls, trans_peak, std::span<double>(trans).subspan(i * C, C));
    }

    ModelRecord record;
    record.id = model_id(m);
    record.original = PredictionMatrix(n, C, std::move(orig));
    record.transformed = PredictionMatrix(n, C, std::move(trans));
    record.attributes[kTargetAccuracy] = targets[m];
    record.attributes[kRealizedAccuracy] = static_cast<double>(hits) / static_cast<double>(n);
    record.attributes[kSpuriousRate] = rates[m];

    if (spec.n_validation > 0) {
      Engine vrng = stream(spec.seed, kValidationStream, m);
      SystematicSampler vsampler(vrng);
      std::vector<double> val(spec.n_validation * C);
      for (std::size_t i = 0; i < spec.n_validation; ++i) {
        const double peak = draw_peak(vrng, cal, spec.confidence_sharpness, floor);
        const bool correct = vsampler.draw(peak + cal.correct_shift);
        const std::size_t pred = correct ? val_y[i] : other_class(vrng, C, val_y[i]);
        fill_row(vrng, pred, peak, std::span<double>(val).subspan(i * C, C));
      }
      record.validation = PredictionMatrix(spec.n_validation, C, std::move(val));
      record.validation_labels = LabelVector(val_y);
    }
    bench.models.push_back(std::move(record));
  }
  return bench;
}

Bench inject_spurious(const Bench& bench, double rate, std::uint64_t seed) {
  if (!bench.labels) throw ConfigurationError("inject_spurious needs ground-truth labels");
  if (!(rate >= 0.0 && rate <= 1.0)) throw ConfigurationError("rate must lie in [0, 1]");
  const std::size_t n = bench.n;
  const std::size_t C = bench.classes;
  const std::size_t entries = n * bench.models.size();
  const auto count = static_cast<std::size_t>(std::llround(rate * static_cast<double>(entries)));
  if (count == 0) return bench;

  Engine rng = stream(seed, kInjectStream);
  const auto chosen = choose_exactly(rng, entries, count);
  const double floor = peak_floor(C);
  const LabelVector& y = *bench.labels;

  Bench out = bench;
  for (std::size_t m = 0; m < out.models.size(); ++m) {
    ModelRecord& model = out.models[m];
    std::vector<double> orig(model.original.values().begin(), model.original.values().end());
    std::vector<double> trans(model.transformed.values().begin(),
                              model.transformed.values().end());
    bool touched = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (!chosen[m * n + i]) continue;
      touched = true;
      const std::size_t pred = model.original.predicted(i);
      const std::size_t tcls = model.transformed.predicted(i);
      const double peak = pred == y[i] ? low_inverted_peak(rng, floor) : high_inverted_peak(rng);
      fill_row(rng, pred, peak, std::span<double>(orig).subspan(i * C, C));
      fill_row(rng, tcls, diffuse_peak(rng, floor), std::span<double>(trans).subspan(i * C, C));
    }
    if (!touched) continue;
    model.original = PredictionMatrix(n, C, std::move(orig), model.original.storage());
    model.transformed = PredictionMatrix(n, C, std::move(trans), model.transformed.storage());
  }
  return out;
}

}  // namespace vrp::synth
