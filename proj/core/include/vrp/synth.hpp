#pragma once

#include <cstddef>
#include <cstdint>

#include "vrp/core_model.hpp"

namespace vrp::synth {

// Parameters of a seeded synthetic model zoo.
//
// Each model gets a target accuracy drawn uniformly from the accuracy range.
// Peak confidences follow a scaled Beta whose mean is the target accuracy and
// whose concentration is confidence_sharpness, and each prediction is correct
// with probability equal to its own peak, so a clean model is calibrated.
// Spurious responses invert the original-view confidence (low on correct,
// >= 0.95 on incorrect) and leave a diffuse, less stable transformed view.
// Each model's spurious fraction is drawn uniformly around spurious_rate.
struct ZooSpec {
  std::size_t n_samples = 2000;
  std::size_t n_classes = 10;
  std::size_t n_models = 30;
  double accuracy_lo = 0.3;
  double accuracy_hi = 0.9;
  double spurious_rate = 0.3;
  double confidence_sharpness = 10.0;
  std::uint64_t seed = 0;
  // Clean in-distribution validation set per model (0 = none).
  std::size_t n_validation = 500;
  // Probability that the transformed view keeps the original predicted class
  // for a non-spurious entry.
  double view_agreement = 0.9;

  // Throws ConfigurationError when a field is out of range.
  void validate() const;
};

// Attribute keys written on every generated ModelRecord.
inline constexpr const char* kTargetAccuracy = "target_accuracy";
inline constexpr const char* kRealizedAccuracy = "realized_accuracy";
inline constexpr const char* kSpuriousRate = "spurious_rate";

Bench generate_zoo(const ZooSpec& spec);

// Copy of bench with exactly round(rate * n * models) (model, sample) entries
// confidence-inverted. Predicted classes on both views are preserved. Throws
// ConfigurationError when the bench has no labels.
Bench inject_spurious(const Bench& bench, double rate, std::uint64_t seed);

}  // namespace vrp::synth
