#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "vrp/core_model.hpp"
#include "vrp/error.hpp"

namespace vrp {
namespace {

using fixtures::matrix;

TEST(PredictionMatrix, RejectsBadShape) {
  EXPECT_THROW(PredictionMatrix(2, 2, {0.5, 0.5, 1.0}), DimensionError);
  EXPECT_THROW(PredictionMatrix(1, 0, {}), DimensionError);
}

TEST(PredictionMatrix, RejectsOutOfRangeEntries) {
  EXPECT_THROW(matrix({{1.2, -0.2}}), ValidationError);
  EXPECT_THROW(matrix({{std::nan(""), 1.0}}), ValidationError);
}

TEST(PredictionMatrix, RowSumToleranceIsACheckNotANormalization) {
  const auto m = matrix({{0.70004, 0.3}});
  EXPECT_EQ(m.at(0, 0), 0.70004);
  EXPECT_THROW(matrix({{0.7002, 0.3}}), RowSumError);
}

TEST(PredictedLabels, Argmax) {
  const auto y = predicted_labels(matrix({{0.7, 0.3}, {0.2, 0.8}}));
  EXPECT_EQ(y, (std::vector<std::uint32_t>{0, 1}));
}

TEST(PredictedLabels, TieGoesToLowestIndex) {
  EXPECT_EQ(predicted_labels(matrix({{0.5, 0.5}})), std::vector<std::uint32_t>{0});
  EXPECT_EQ(predicted_labels(matrix({{0.2, 0.4, 0.4}})), std::vector<std::uint32_t>{1});
}

TEST(PredictedLabels, MatchesLinearScan) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto m = fixtures::random_matrix(6, 4, seed, 0.2);
    const auto y = predicted_labels(m);
    for (std::size_t i = 0; i < m.rows(); ++i) {
      EXPECT_EQ(y[i], oracle::argmax(m.row(i)));
      EXPECT_EQ(m.confidence(i), m.at(i, y[i]));
    }
  }
}

TEST(Accuracy, AllCorrectAndAllWrong) {
  const auto m = matrix({{0.9, 0.1}, {0.3, 0.7}});
  EXPECT_EQ(accuracy(m, LabelVector({0, 1})), 1.0);
  EXPECT_EQ(accuracy(m, LabelVector({1, 0})), 0.0);
}

TEST(Accuracy, SevenOfTen) {
  std::vector<double> v;
  std::vector<std::uint32_t> y;
  for (int i = 0; i < 10; ++i) {
    v.insert(v.end(), {0.8, 0.2});
    y.push_back(i < 7 ? 0 : 1);
  }
  EXPECT_DOUBLE_EQ(accuracy(PredictionMatrix(10, 2, v), LabelVector(y)), 0.7);
}

TEST(Accuracy, LengthMismatch) {
  EXPECT_THROW(accuracy(matrix({{1.0, 0.0}}), LabelVector({0, 1})), DimensionError);
}

TEST(LabelVector, Check) {
  const LabelVector y({0, 2});
  EXPECT_NO_THROW(y.check(2, 3, "labels"));
  EXPECT_THROW(y.check(3, 3, "labels"), DimensionError);
  EXPECT_THROW(y.check(2, 2, "labels"), ValidationError);
}

TEST(Transform, RoundTripsTags) {
  for (const char* tag : {"none", "rotation", "grayscale", "color_jitter", "elastic"}) {
    EXPECT_EQ(Transform::parse(tag).to_string(), tag);
  }
  EXPECT_EQ(Transform::parse("elastic").kind, TransformKind::other);
}

TEST(Bench, ValidateCatchesShapeErrors) {
  Bench b = fixtures::random_bench(3, 6, 3, 2);
  EXPECT_NO_THROW(b.validate());
  b.models[1].transformed = fixtures::random_matrix(5, 3, 1);
  EXPECT_THROW(b.validate(), DimensionError);
}

TEST(Bench, ValidateCatchesLabelRange) {
  Bench b = fixtures::random_bench(3, 4, 3, 1);
  b.labels = LabelVector({0, 1, 2, 3});
  EXPECT_THROW(b.validate(), ValidationError);
}

TEST(Bench, LookupById) {
  const Bench b = fixtures::random_bench(3, 4, 3, 3);
  EXPECT_EQ(&b.model("m2"), &b.models[2]);
  EXPECT_THROW(b.model("nope"), Error);
}

TEST(Subsample, KeepsAscendingSubsetAcrossAllViews) {
  Bench b = fixtures::random_bench(11, 40, 4, 3);
  // Tag each sample through the first model's original view.
  std::vector<double> tagged;
  for (std::size_t i = 0; i < b.n; ++i) {
    const double t = (static_cast<double>(i) + 0.5) / static_cast<double>(b.n);
    tagged.insert(tagged.end(), {t, 1.0 - t, 0.0, 0.0});
  }
  b.models[0].original = PredictionMatrix(b.n, 4, tagged);
  const Bench s = subsample(b, 15, 99);
  ASSERT_EQ(s.n, 15u);
  EXPECT_NO_THROW(s.validate());
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < s.n; ++i) {
    kept.push_back(static_cast<std::size_t>(s.models[0].original.at(i, 0) * static_cast<double>(b.n)));
    if (i > 0) EXPECT_GT(kept[i], kept[i - 1]);
  }
  for (std::size_t m = 0; m < b.models.size(); ++m) {
    for (std::size_t i = 0; i < s.n; ++i) {
      for (std::size_t c = 0; c < b.classes; ++c) {
        EXPECT_EQ(s.models[m].transformed.at(i, c), b.models[m].transformed.at(kept[i], c));
      }
    }
    EXPECT_EQ(s.models[m].validation, b.models[m].validation);
  }
  for (std::size_t i = 0; i < s.n; ++i) EXPECT_EQ((*s.labels)[i], (*b.labels)[kept[i]]);
  EXPECT_EQ(subsample(b, 15, 99), s);
}

}  // namespace
}  // namespace vrp
