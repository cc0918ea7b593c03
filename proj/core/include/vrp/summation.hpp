#pragma once

#include <span>

namespace vrp {

// Pairwise summation with a fixed split rule; the association order depends
// only on the length.
double pairwise_sum(std::span<const double> values) noexcept;

// pairwise_sum / size; 0 for an empty span.
double ordered_mean(std::span<const double> values) noexcept;

}  // namespace vrp
