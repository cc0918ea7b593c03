#include "vrp/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "vrp/error.hpp"
#include "vrp/random.hpp"

namespace vrp {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::dimension: return "dimension error";
    case ErrorKind::configuration: return "configuration error";
    case ErrorKind::degenerate_input: return "degenerate input";
    case ErrorKind::insufficient_data: return "insufficient data";
    case ErrorKind::empty_vicinity: return "empty vicinity";
    case ErrorKind::parse: return "parse error";
    case ErrorKind::row_sum: return "row-sum violation";
    case ErrorKind::validation: return "validation error";
    case ErrorKind::missing_file: return "missing file";
    case ErrorKind::io: return "I/O error";
  }
  return "error";
}

int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::configuration: return 2;
    case ErrorKind::missing_file:
    case ErrorKind::io: return 4;
    default: return 3;
  }
}

PredictionMatrix::PredictionMatrix(std::size_t rows, std::size_t cols,
                                   std::vector<double> values, StorageType storage)
    : rows_(rows), cols_(cols), storage_(storage), values_(std::move(values)) {
  if (rows_ < 1) throw DimensionError("prediction matrix needs at least one row");
  if (cols_ < 2) throw DimensionError("prediction matrix needs at least two classes");
  if (values_.size() != rows_ * cols_) {
    throw DimensionError("prediction matrix holds " + std::to_string(values_.size()) +
                         " values, expected " + std::to_string(rows_ * cols_));
  }
  predicted_.resize(rows_);
  for (std::size_t i = 0; i < rows_; ++i) {
    const auto r = row(i);
    double sum = 0.0;
    std::size_t best = 0;
    for (std::size_t c = 0; c < cols_; ++c) {
      const double p = r[c];
      if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
        throw ValidationError("entry (" + std::to_string(i) + ", " + std::to_string(c) +
                              ") is not a probability");
      }
      sum += p;
      if (p > r[best]) best = c;
    }
    if (std::abs(sum - 1.0) > kRowSumTolerance) {
      throw RowSumError("row " + std::to_string(i) + " sums to " + std::to_string(sum));
    }
    predicted_[i] = static_cast<std::uint32_t>(best);
  }
}

void LabelVector::check(std::size_t expected_size, std::size_t classes,
                        std::string_view what) const {
  if (values_.size() != expected_size) {
    throw DimensionError(std::string(what) + ": " + std::to_string(values_.size()) +
                         " labels, expected " + std::to_string(expected_size));
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (values_[i] >= classes) {
      throw ValidationError(std::string(what) + ": label " + std::to_string(values_[i]) +
                            " at index " + std::to_string(i) + " is not below " +
                            std::to_string(classes));
    }
  }
}

void ModelRecord::validate() const {
  if (original.empty() || transformed.empty()) {
    throw DimensionError("model '" + id + "' is missing a view");
  }
  if (original.rows() != transformed.rows() || original.cols() != transformed.cols()) {
    throw DimensionError("model '" + id + "': original and transformed views differ in shape");
  }
  if (validation.has_value() != validation_labels.has_value()) {
    throw ValidationError("model '" + id +
                          "': validation predictions and labels must come together");
  }
  if (validation) {
    if (validation->cols() != original.cols()) {
      throw DimensionError("model '" + id + "': validation class count differs");
    }
    validation_labels->check(validation->rows(), validation->cols(),
                             "model '" + id + "' validation labels");
  }
}

std::string Transform::to_string() const {
  switch (kind) {
    case TransformKind::none: return "none";
    case TransformKind::rotation: return "rotation";
    case TransformKind::grayscale: return "grayscale";
    case TransformKind::color_jitter: return "color_jitter";
    case TransformKind::other: return name;
  }
  return name;
}

Transform Transform::parse(std::string_view tag) {
  if (tag == "none") return {TransformKind::none, {}};
  if (tag == "rotation") return {TransformKind::rotation, {}};
  if (tag == "grayscale") return {TransformKind::grayscale, {}};
  if (tag == "color_jitter") return {TransformKind::color_jitter, {}};
  return {TransformKind::other, std::string(tag)};
}

void Bench::validate() const {
  if (n < 1) throw DimensionError("bench '" + name + "' has no samples");
  if (classes < 2) throw DimensionError("bench '" + name + "' needs at least two classes");
  if (labels) labels->check(n, classes, "bench '" + name + "' labels");
  for (const auto& m : models) {
    m.validate();
    if (m.original.rows() != n || m.original.cols() != classes) {
      throw DimensionError("model '" + m.id + "' is " + std::to_string(m.original.rows()) +
                           "x" + std::to_string(m.original.cols()) + ", bench is " +
                           std::to_string(n) + "x" + std::to_string(classes));
    }
  }
}

const ModelRecord& Bench::model(std::string_view id) const {
  for (const auto& m : models) {
    if (m.id == id) return m;
  }
  throw ConfigurationError("no model with id '" + std::string(id) + "'");
}

std::vector<std::uint32_t> predicted_labels(const PredictionMatrix& m) {
  std::vector<std::uint32_t> out(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) out[i] = static_cast<std::uint32_t>(m.predicted(i));
  return out;
}

double accuracy(const PredictionMatrix& m, const LabelVector& y) {
  if (m.rows() != y.size()) {
    throw DimensionError("accuracy: " + std::to_string(m.rows()) + " predictions vs " +
                         std::to_string(y.size()) + " labels");
  }
  if (m.rows() == 0) throw DimensionError("accuracy: empty prediction matrix");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < m.rows(); ++i) hits += (m.predicted(i) == y[i]) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(m.rows());
}

namespace {

PredictionMatrix take_rows(const PredictionMatrix& m, const std::vector<std::size_t>& keep) {
  std::vector<double> values;
  values.reserve(keep.size() * m.cols());
  for (std::size_t i : keep) {
    const auto r = m.row(i);
    values.insert(values.end(), r.begin(), r.end());
  }
  return PredictionMatrix(keep.size(), m.cols(), std::move(values), m.storage());
}

}  // namespace

Bench subsample(const Bench& bench, std::size_t k, std::uint64_t seed) {
  if (k < 1) throw ConfigurationError("subsample size must be at least 1");
  if (k >= bench.n) return bench;

  std::vector<std::size_t> order(bench.n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Partial Fisher-Yates on a counter-based stream.
  for (std::size_t i = 0; i < k; ++i) {
    const std::uint64_t h = hash_combine(seed, 0x5eed, i);
    const std::size_t j = i + static_cast<std::size_t>(h % (bench.n - i));
    std::swap(order[i], order[j]);
  }
  std::vector<std::size_t> keep(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
  std::sort(keep.begin(), keep.end());

  Bench out = bench;
  out.n = k;
  if (bench.labels) {
    std::vector<std::uint32_t> y;
    y.reserve(k);
    for (std::size_t i : keep) y.push_back((*bench.labels)[i]);
    out.labels = LabelVector(std::move(y));
  }
  for (auto& m : out.models) {
    m.original = take_rows(m.original, keep);
    m.transformed = take_rows(m.transformed, keep);
  }
  return out;
}

}  // namespace vrp
