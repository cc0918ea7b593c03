#include "vrp/summation.hpp"

namespace vrp {

namespace {
constexpr std::size_t kLeaf = 8;
}

double pairwise_sum(std::span<const double> values) noexcept {
  if (values.size() <= kLeaf) {
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

double ordered_mean(std::span<const double> values) noexcept {
  if (values.empty()) return 0.0;
  return pairwise_sum(values) / static_cast<double>(values.size());
}

}  // namespace vrp
