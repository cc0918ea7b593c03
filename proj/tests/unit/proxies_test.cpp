#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "vrp/error.hpp"
#include "vrp/proxies.hpp"
#include "vrp/synth.hpp"

namespace vrp {
namespace {

using fixtures::matrix;
using fixtures::model;

ProxyContext full_context() {
  ProxyContext ctx;
  ctx.atc_threshold = 0.5;
  ctx.doc_offset = -0.05;
  return ctx;
}

TEST(ProxyNames, ParseAndPrint) {
  for (ProxyKind k : kAllProxies) EXPECT_EQ(parse_proxy(to_string(k)), k);
  EXPECT_EQ(parse_proxy("ATC"), ProxyKind::atc);
  EXPECT_THROW(parse_proxy("nuq"), ConfigurationError);
  EXPECT_TRUE(needs_validation(ProxyKind::doc));
  EXPECT_FALSE(needs_validation(ProxyKind::ei));
}

TEST(PerSampleProxy, EntropyProductWhenPredictionsAgree) {
  const auto m = model("a", matrix({{0.9, 0.1}}), matrix({{0.8, 0.2}}));
  EXPECT_NEAR(per_sample_proxy(ProxyKind::ei, m, {}, 0), 0.72, 1e-15);
  ProxyContext ctx;
  ctx.ei_sqrt = true;
  EXPECT_NEAR(per_sample_proxy(ProxyKind::ei, m, ctx, 0), std::sqrt(0.72), 1e-15);
}

TEST(PerSampleProxy, EntropyZeroWhenPredictionsDisagree) {
  const auto m = model("a", matrix({{0.9, 0.1}}), matrix({{0.3, 0.7}}));
  EXPECT_EQ(per_sample_proxy(ProxyKind::ei, m, {}, 0), 0.0);
}

TEST(PerSampleProxy, ConsistencyReadsTransformedAtOriginalClass) {
  const auto m = model("a", matrix({{0.6, 0.4}}), matrix({{0.3, 0.7}}));
  EXPECT_DOUBLE_EQ(per_sample_proxy(ProxyKind::ci, m, {}, 0), 0.3);
  ProxyContext ctx;
  ctx.ci_reading = CiReading::original_at_transformed;
  EXPECT_DOUBLE_EQ(per_sample_proxy(ProxyKind::ci, m, ctx, 0), 0.4);
}

TEST(PerSampleProxy, ThresholdIndicator) {
  const auto m = model("a", matrix({{0.55, 0.45}, {0.45, 0.55}, {0.5, 0.5}}),
                       matrix({{0.5, 0.5}, {0.5, 0.5}, {0.5, 0.5}}));
  ProxyContext ctx;
  ctx.atc_threshold = 0.5;
  EXPECT_EQ(per_sample_proxy(ProxyKind::atc, m, ctx, 0), 1.0);
  ctx.atc_threshold = 0.6;
  EXPECT_EQ(per_sample_proxy(ProxyKind::atc, m, ctx, 1), 0.0);
  ctx.atc_threshold = 0.5;
  EXPECT_EQ(per_sample_proxy(ProxyKind::atc, m, ctx, 2), 0.0);
}

TEST(PerSampleProxy, MissingContextAndBadIndex) {
  const auto m = model("a", matrix({{0.6, 0.4}}), matrix({{0.3, 0.7}}));
  EXPECT_THROW(per_sample_proxy(ProxyKind::atc, m, {}, 0), ConfigurationError);
  EXPECT_THROW(per_sample_proxy(ProxyKind::doc, m, {}, 0), ConfigurationError);
  EXPECT_THROW(per_sample_proxy(ProxyKind::ac, m, {}, 1), DimensionError);
}

TEST(Erp, MeanOfMaxima) {
  const auto m = model("a", matrix({{0.7, 0.3}, {0.2, 0.8}}), matrix({{0.7, 0.3}, {0.2, 0.8}}));
  EXPECT_DOUBLE_EQ(erp(ProxyKind::ac, m, {}), 0.75);
}

TEST(Erp, ThresholdAboveEverything) {
  const auto m = model("a", matrix({{0.7, 0.3}, {0.2, 0.8}}), matrix({{0.7, 0.3}, {0.2, 0.8}}));
  ProxyContext ctx;
  ctx.atc_threshold = 0.95;
  EXPECT_EQ(erp(ProxyKind::atc, m, ctx), 0.0);
}

TEST(Erp, MatchesDirectLoop) {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const Bench b = fixtures::random_bench(seed, 10, 3, 2);
    for (const auto& m : b.models) {
      const ProxyContext ctx = fit_context(m);
      for (ProxyKind k : kAllProxies) {
        const auto scores = oracle::proxy_scores(k, m, ctx);
        EXPECT_NEAR(erp(k, m, ctx), oracle::plain_mean(scores), 1e-12);
        const auto lib = per_sample_scores(k, m, ctx);
        for (std::size_t i = 0; i < lib.size(); ++i) EXPECT_EQ(lib[i], scores[i]);
      }
    }
  }
}

PredictionMatrix confidences(std::initializer_list<double> peaks) {
  std::vector<double> v;
  for (double p : peaks) v.insert(v.end(), {p, 1.0 - p});
  return PredictionMatrix(peaks.size(), 2, v);
}

TEST(FitAtcThreshold, PerfectValidation) {
  const auto val = confidences({0.9, 0.8, 0.7, 0.6});
  const double t = fit_atc_threshold(val, LabelVector({0, 0, 0, 0}));
  EXPECT_LT(t, 0.6);
  EXPECT_EQ(exceedance_fraction(val, t), 1.0);
}

TEST(FitAtcThreshold, HopelessValidation) {
  const auto val = confidences({0.9, 0.8, 0.7, 0.6});
  const double t = fit_atc_threshold(val, LabelVector({1, 1, 1, 1}));
  EXPECT_GE(t, 0.9);
  EXPECT_EQ(exceedance_fraction(val, t), 0.0);
}

TEST(FitAtcThreshold, HalfRight) {
  const auto val = confidences({0.9, 0.8, 0.7, 0.6});
  const LabelVector y({0, 1, 0, 1});
  const double t = fit_atc_threshold(val, y);
  EXPECT_GT(t, 0.7);
  EXPECT_LT(t, 0.8);
  EXPECT_EQ(exceedance_fraction(val, t), 0.5);
  EXPECT_EQ(std::abs(exceedance_fraction(val, t) - 0.5), oracle::best_atc_gap(val, y));
}

TEST(FitAtcThreshold, AchievesBestGapOnRandomSets) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Bench b = fixtures::random_bench(seed, 2, 3, 1, 30);
    const auto& val = *b.models[0].validation;
    const auto& y = *b.models[0].validation_labels;
    const double t = fit_atc_threshold(val, y);
    EXPECT_NEAR(std::abs(exceedance_fraction(val, t) - accuracy(val, y)),
                oracle::best_atc_gap(val, y), 1e-15);
  }
}

TEST(FitAtcThreshold, EmptyValidation) {
  EXPECT_THROW(fit_atc_threshold(PredictionMatrix(), LabelVector()), ConfigurationError);
  EXPECT_THROW(doc_offset(PredictionMatrix(), LabelVector()), ConfigurationError);
}

TEST(DocOffset, ZeroWhenCalibrated) {
  const auto val = confidences({0.5, 0.5});
  EXPECT_DOUBLE_EQ(doc_offset(val, LabelVector({0, 1})), 0.0);
}

TEST(DocOffset, AccuracyMinusConfidence) {
  std::vector<double> v;
  std::vector<std::uint32_t> y;
  for (int i = 0; i < 10; ++i) {
    v.insert(v.end(), {0.9, 0.1});
    y.push_back(i < 8 ? 0 : 1);
  }
  EXPECT_NEAR(doc_offset(PredictionMatrix(10, 2, v), LabelVector(y)), -0.1, 1e-12);
}

TEST(DocOffset, MatchesFormula) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Bench b = fixtures::random_bench(seed, 2, 4, 1, 17);
    const auto& val = *b.models[0].validation;
    const auto& y = *b.models[0].validation_labels;
    double hits = 0.0, conf = 0.0;
    for (std::size_t i = 0; i < val.rows(); ++i) {
      hits += oracle::argmax(val.row(i)) == y[i];
      conf += val.row(i)[oracle::argmax(val.row(i))];
    }
    EXPECT_NEAR(doc_offset(val, y), (hits - conf) / static_cast<double>(val.rows()), 1e-12);
  }
}

TEST(FitContext, AbsentWithoutValidation) {
  const auto m = model("a", matrix({{0.6, 0.4}}), matrix({{0.3, 0.7}}));
  const auto ctx = fit_context(m);
  EXPECT_FALSE(ctx.atc_threshold);
  EXPECT_FALSE(ctx.doc_offset);
}

TEST(AtcOnValidation, RecoversValidationAccuracy) {
  synth::ZooSpec spec;
  spec.n_samples = 100;
  spec.n_models = 8;
  spec.n_validation = 50;
  spec.seed = 5;
  const Bench b = synth::generate_zoo(spec);
  for (const auto& m : b.models) {
    const ProxyContext ctx = fit_context(m);
    ModelRecord on_val = model("v", *m.validation, *m.validation);
    EXPECT_LE(std::abs(erp(ProxyKind::atc, on_val, ctx) - accuracy(*m.validation, *m.validation_labels)),
              1.0 / 50.0 + 1e-12);
  }
}

}  // namespace
}  // namespace vrp
