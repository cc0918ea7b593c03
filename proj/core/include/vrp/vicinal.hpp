#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "vrp/core_model.hpp"
#include "vrp/proxies.hpp"

namespace vrp {

struct DotSimilarity {
  bool operator==(const DotSimilarity&) const = default;
};
// Uniform vicinal distribution over the class group.
struct EqualSimilarity {
  bool operator==(const EqualSimilarity&) const = default;
};
struct GaussianSimilarity {
  double sigma = 1.0;
  bool operator==(const GaussianSimilarity&) const = default;
};
// Pairwise-deterministic value in (0, 1) keyed by (seed, center, neighbor).
struct RandomSimilarity {
  std::uint64_t seed = 0;
  bool operator==(const RandomSimilarity&) const = default;
};

using SimilarityKind =
    std::variant<DotSimilarity, EqualSimilarity, GaussianSimilarity, RandomSimilarity>;

struct AllPositive {
  bool operator==(const AllPositive&) const = default;
};
struct TopM {
  std::size_t m = 1;
  bool operator==(const TopM&) const = default;
};
// The vicinity of every sample is the sample itself; vrp reduces to erp.
struct SelfOnly {
  bool operator==(const SelfOnly&) const = default;
};

using NeighborBudget = std::variant<AllPositive, TopM, SelfOnly>;

// View whose predicted class gates membership in a vicinity. Similarities are
// always computed on the transformed view.
enum class GateView { transformed, original };

struct VicinalConfig {
  SimilarityKind similarity = DotSimilarity{};
  NeighborBudget budget = AllPositive{};
  bool include_self = true;
  GateView gate = GateView::transformed;

  // Throws ConfigurationError for sigma <= 0, m == 0 or self_only without self.
  void validate() const;
  // Stable identifier used in reports, e.g. "vrp:dot:all" or "vrp:gauss(0.5):m50:noself".
  std::string label() const;

  bool operator==(const VicinalConfig&) const = default;
};

struct Neighbor {
  std::size_t index;
  double weight;
  bool operator==(const Neighbor&) const = default;
};

// Discrete vicinal density around one sample. Entries carry strictly positive
// weights, sorted by descending weight then ascending index.
struct NeighborWeights {
  std::size_t center = 0;
  std::vector<Neighbor> entries;

  bool empty() const noexcept { return entries.empty(); }
};

// s(neighbor, center) on transformed-view rows.
double similarity(const SimilarityKind& kind, std::span<const double> neighbor_row,
                  std::span<const double> center_row, std::size_t neighbor,
                  std::size_t center);

// Sample indices grouped by predicted class on the gating view, ascending.
class ClassGroups {
 public:
  ClassGroups(const ModelRecord& model, GateView gate);

  std::size_t group_class(std::size_t i) const { return class_of_[i]; }
  std::span<const std::size_t> members(std::size_t cls) const { return groups_[cls]; }
  std::size_t classes() const noexcept { return groups_.size(); }

 private:
  std::vector<std::size_t> class_of_;
  std::vector<std::vector<std::size_t>> groups_;
};

// Vicinity of sample i by direct evaluation over its class group. An empty
// result (only possible with include_self == false) is the empty-vicinity
// condition.
NeighborWeights neighbor_weights(const ModelRecord& model, std::size_t i,
                                 const VicinalConfig& cfg);
NeighborWeights neighbor_weights(const ModelRecord& model, const ClassGroups& groups,
                                 std::size_t i, const VicinalConfig& cfg);

// Similarity-weighted mean of the neighbor scores. Throws EmptyVicinityError
// when there is no positive weight.
double vicinal_expectation(std::span<const double> scores, const NeighborWeights& w);

struct VicinalResult {
  std::vector<double> expectations;  // E_i per sample
  double value = 0.0;                // ordered mean of expectations
  std::size_t empty_vicinities = 0;  // samples that fell back to their own score
  std::uint64_t weight_evaluations = 0;
};

// Vicinal expectation for every sample given precomputed per-sample scores.
// Neighbor search uses class groups plus bound-based pruning for top-m; the
// result matches neighbor_weights + vicinal_expectation up to summation order.
VicinalResult vicinal_scores(std::span<const double> scores, const ModelRecord& model,
                             const VicinalConfig& cfg, unsigned threads = 1);

// Vicinal risk proxy.
double vrp(ProxyKind kind, const ModelRecord& model, const ProxyContext& ctx,
           const VicinalConfig& cfg, unsigned threads = 1);

}  // namespace vrp
