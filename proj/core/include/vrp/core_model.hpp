#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vrp {

// On-disk element type of a matrix file. Values are always held as double in
// memory; the tag only decides how the matrix is written back.
enum class StorageType : std::uint8_t { float32 = 0, float64 = 1 };

inline constexpr double kRowSumTolerance = 1e-4;

// n x C row-stochastic softmax outputs of one model on one view of a test set.
class PredictionMatrix {
 public:
  PredictionMatrix() = default;

  // Validates every invariant; rows are never renormalized.
  // Throws DimensionError for bad shapes, ValidationError for out-of-range
  // entries and RowSumError when a row misses 1 by more than kRowSumTolerance.
  PredictionMatrix(std::size_t rows, std::size_t cols, std::vector<double> values,
                   StorageType storage = StorageType::float64);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return rows_ == 0; }
  StorageType storage() const noexcept { return storage_; }

  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * cols_, cols_};
  }
  double at(std::size_t i, std::size_t c) const { return values_[i * cols_ + c]; }
  std::span<const double> values() const noexcept { return values_; }

  // Argmax of row i, lowest class index on ties.
  std::size_t predicted(std::size_t i) const { return predicted_[i]; }
  // Max-softmax value of row i.
  double confidence(std::size_t i) const { return at(i, predicted_[i]); }

  bool operator==(const PredictionMatrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_ && storage_ == other.storage_ &&
           values_ == other.values_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  StorageType storage_ = StorageType::float64;
  std::vector<double> values_;
  std::vector<std::uint32_t> predicted_;
};

// Class index per sample.
class LabelVector {
 public:
  LabelVector() = default;
  explicit LabelVector(std::vector<std::uint32_t> values) : values_(std::move(values)) {}

  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }
  std::uint32_t operator[](std::size_t i) const { return values_[i]; }
  std::span<const std::uint32_t> values() const noexcept { return values_; }

  // Throws DimensionError unless size() == expected_size, ValidationError if
  // any value is >= classes.
  void check(std::size_t expected_size, std::size_t classes, std::string_view what) const;

  bool operator==(const LabelVector&) const = default;

 private:
  std::vector<std::uint32_t> values_;
};

struct ModelRecord {
  std::string id;
  PredictionMatrix original;
  PredictionMatrix transformed;
  std::optional<PredictionMatrix> validation;
  std::optional<LabelVector> validation_labels;
  // Free-form numeric annotations carried through the manifest
  // (synthetic zoos record target and realized accuracy here).
  std::map<std::string, double> attributes;

  void validate() const;

  bool operator==(const ModelRecord&) const = default;
};

enum class TransformKind { none, rotation, grayscale, color_jitter, other };

struct Transform {
  TransformKind kind = TransformKind::none;
  std::string name;  // only meaningful for TransformKind::other

  std::string to_string() const;
  static Transform parse(std::string_view tag);

  bool operator==(const Transform&) const = default;
};

struct Bench {
  std::string name;
  std::size_t n = 0;
  std::size_t classes = 0;
  std::optional<LabelVector> labels;
  Transform transform;
  std::map<std::string, std::string> transform_params;
  std::vector<ModelRecord> models;

  void validate() const;
  const ModelRecord& model(std::string_view id) const;

  bool operator==(const Bench&) const = default;
};

std::vector<std::uint32_t> predicted_labels(const PredictionMatrix& m);

// Fraction of rows whose argmax equals the label. Throws DimensionError on a
// length mismatch.
double accuracy(const PredictionMatrix& m, const LabelVector& y);

// Keeps k test samples chosen uniformly without replacement (ascending
// original order). Validation sets are left whole.
Bench subsample(const Bench& bench, std::size_t k, std::uint64_t seed);

}  // namespace vrp
