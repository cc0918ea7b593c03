#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "vrp/error.hpp"
#include "vrp/proxies.hpp"
#include "vrp/synth.hpp"

namespace vrp::synth {
namespace {

ZooSpec small_spec(std::uint64_t seed) {
  ZooSpec s;
  s.n_samples = 300;
  s.n_models = 6;
  s.n_validation = 60;
  s.seed = seed;
  return s;
}

TEST(ZooSpec, Validate) {
  EXPECT_NO_THROW(ZooSpec{}.validate());
  auto bad = [](auto edit) {
    ZooSpec s;
    edit(s);
    return s;
  };
  EXPECT_THROW(bad([](ZooSpec& s) { s.n_classes = 1; }).validate(), ConfigurationError);
  EXPECT_THROW(bad([](ZooSpec& s) { s.n_models = 1; }).validate(), ConfigurationError);
  EXPECT_THROW(bad([](ZooSpec& s) { s.accuracy_lo = 0.8, s.accuracy_hi = 0.7; }).validate(),
               ConfigurationError);
  EXPECT_THROW(bad([](ZooSpec& s) { s.spurious_rate = 1.5; }).validate(), ConfigurationError);
  EXPECT_THROW(bad([](ZooSpec& s) { s.confidence_sharpness = 0; }).validate(), ConfigurationError);
}

TEST(GenerateZoo, ShapeAndAttributes) {
  const Bench b = generate_zoo(small_spec(1));
  EXPECT_NO_THROW(b.validate());
  EXPECT_EQ(b.n, 300u);
  EXPECT_EQ(b.classes, 10u);
  ASSERT_EQ(b.models.size(), 6u);
  ASSERT_TRUE(b.labels);
  for (const auto& m : b.models) {
    ASSERT_TRUE(m.validation);
    EXPECT_EQ(m.validation->rows(), 60u);
    EXPECT_EQ(m.attributes.at(kRealizedAccuracy), accuracy(m.original, *b.labels));
    EXPECT_GE(m.attributes.at(kTargetAccuracy), 0.3);
    EXPECT_LE(m.attributes.at(kTargetAccuracy), 0.9);
    EXPECT_TRUE(m.attributes.contains(kSpuriousRate));
  }
}

TEST(GenerateZoo, Deterministic) {
  EXPECT_EQ(generate_zoo(small_spec(4)), generate_zoo(small_spec(4)));
  EXPECT_NE(generate_zoo(small_spec(4)), generate_zoo(small_spec(5)));
}

TEST(GenerateZoo, CleanSharpModelsAreCalibrated) {
  ZooSpec s;
  s.n_samples = 2000;
  s.spurious_rate = 0.0;
  s.confidence_sharpness = 1e6;
  s.n_validation = 0;
  s.seed = 8;
  const Bench b = generate_zoo(s);
  for (const auto& m : b.models) {
    EXPECT_NEAR(erp(ProxyKind::ac, m, {}), m.attributes.at(kRealizedAccuracy), 0.02) << m.id;
  }
}

TEST(GenerateZoo, HitsFixedTargets) {
  for (double target : {0.2, 0.9}) {
    ZooSpec s;
    s.n_samples = 2000;
    s.n_models = 2;
    s.accuracy_lo = s.accuracy_hi = target;
    s.seed = 21;
    for (const auto& m : generate_zoo(s).models) {
      EXPECT_NEAR(m.attributes.at(kRealizedAccuracy), target, 0.03) << m.id;
    }
  }
}

TEST(GenerateZoo, SpuriousEntriesDegradeConfidenceRanking) {
  ZooSpec clean = small_spec(2);
  clean.spurious_rate = 0.0;
  ZooSpec noisy = clean;
  noisy.spurious_rate = 0.6;
  auto ac_vs_acc = [](const Bench& b) {
    std::vector<double> ac, acc;
    for (const auto& m : b.models) {
      ac.push_back(erp(ProxyKind::ac, m, {}));
      acc.push_back(m.attributes.at(kRealizedAccuracy));
    }
    return oracle::pearson(ac, acc);
  };
  EXPECT_GT(ac_vs_acc(generate_zoo(clean)), 0.9);
  EXPECT_GT(ac_vs_acc(generate_zoo(clean)), ac_vs_acc(generate_zoo(noisy)));
}

TEST(InjectSpurious, ZeroRateIsIdentity) {
  const Bench b = generate_zoo(small_spec(3));
  EXPECT_EQ(inject_spurious(b, 0.0, 9), b);
}

TEST(InjectSpurious, LowersConfidenceOnCorrectSamples) {
  Bench b = fixtures::random_bench(6, 50, 3, 2, 0);
  std::vector<double> v;
  for (std::size_t i = 0; i < b.n; ++i) v.insert(v.end(), {0.9, 0.06, 0.04});
  for (auto& m : b.models) m.original = m.transformed = PredictionMatrix(b.n, 3, v);
  b.labels = LabelVector(std::vector<std::uint32_t>(b.n, 0));
  const Bench out = inject_spurious(b, 1.0, 4);
  for (std::size_t m = 0; m < b.models.size(); ++m) {
    EXPECT_LT(erp(ProxyKind::ac, out.models[m], {}), erp(ProxyKind::ac, b.models[m], {}));
    EXPECT_EQ(predicted_labels(out.models[m].original), predicted_labels(b.models[m].original));
  }
}

TEST(InjectSpurious, ChangesExactlyTheRequestedCount) {
  const Bench b = generate_zoo(small_spec(7));
  const Bench out = inject_spurious(b, 0.3, 13);
  std::size_t changed = 0;
  for (std::size_t m = 0; m < b.models.size(); ++m) {
    const auto& before = b.models[m];
    const auto& after = out.models[m];
    EXPECT_EQ(predicted_labels(before.original), predicted_labels(after.original));
    EXPECT_EQ(predicted_labels(before.transformed), predicted_labels(after.transformed));
    EXPECT_EQ(before.validation, after.validation);
    for (std::size_t i = 0; i < b.n; ++i) {
      bool diff = false;
      for (std::size_t c = 0; c < b.classes; ++c) {
        diff |= before.original.at(i, c) != after.original.at(i, c);
        diff |= before.transformed.at(i, c) != after.transformed.at(i, c);
      }
      changed += diff;
    }
  }
  EXPECT_EQ(changed, static_cast<std::size_t>(std::llround(0.3 * 300 * 6)));
  EXPECT_EQ(inject_spurious(b, 0.3, 13), out);
}

TEST(InjectSpurious, InvertsConfidence) {
  const Bench b = generate_zoo(small_spec(10));
  const Bench out = inject_spurious(b, 0.5, 1);
  const auto& y = *b.labels;
  for (std::size_t m = 0; m < b.models.size(); ++m) {
    for (std::size_t i = 0; i < b.n; ++i) {
      const auto& o = out.models[m].original;
      if (o.at(i, 0) == b.models[m].original.at(i, 0) && o.at(i, 1) == b.models[m].original.at(i, 1)) {
        continue;
      }
      if (o.predicted(i) == y[i]) {
        EXPECT_LE(o.confidence(i), 0.3 + 1e-12);
      } else {
        EXPECT_GE(o.confidence(i), 0.95);
      }
    }
  }
}

TEST(InjectSpurious, Errors) {
  Bench b = generate_zoo(small_spec(3));
  EXPECT_THROW(inject_spurious(b, 1.2, 0), ConfigurationError);
  b.labels.reset();
  EXPECT_THROW(inject_spurious(b, 0.1, 0), ConfigurationError);
}

}  // namespace
}  // namespace vrp::synth
