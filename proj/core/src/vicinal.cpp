#include "vrp/vicinal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <queue>
#include <string>

#include "vrp/error.hpp"
#include "vrp/parallel.hpp"
#include "vrp/random.hpp"
#include "vrp/summation.hpp"

namespace vrp {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Absolute slack between a pruning bound and computed weights, covering
// rounding in both.
constexpr double kBoundSlack = 1e-12;

double dot(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) sum += a[c] * b[c];
  return sum;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) {
    const double d = a[c] - b[c];
    sum += d * d;
  }
  return sum;
}

bool ranks_before(const Neighbor& x, const Neighbor& y) {
  return x.weight > y.weight || (x.weight == y.weight && x.index < y.index);
}

// Keeps the best `capacity` neighbors seen so far under ranks_before, as a
// binary heap with the worst kept neighbor at the root.
class TopSelector {
 public:
  explicit TopSelector(std::size_t capacity) : capacity_(capacity) { heap_.reserve(capacity); }

  bool full() const { return heap_.size() >= capacity_; }
  double worst_weight() const { return heap_.front().weight; }

  void offer(const Neighbor& n) {
    if (!(n.weight > 0.0)) return;
    if (heap_.size() < capacity_) {
      heap_.push_back(n);
      std::push_heap(heap_.begin(), heap_.end(), ranks_before);
    } else if (ranks_before(n, heap_.front())) {
      replace_top(n);
    }
  }

  std::vector<Neighbor> take_sorted() {
    std::sort(heap_.begin(), heap_.end(), ranks_before);
    return std::move(heap_);
  }

 private:
  void replace_top(const Neighbor& n) {
    const std::size_t size = heap_.size();
    std::size_t hole = 0;
    for (;;) {
      const std::size_t left = 2 * hole + 1;
      if (left >= size) break;
      std::size_t child = left;
      if (left + 1 < size && ranks_before(heap_[left], heap_[left + 1])) child = left + 1;
      if (!ranks_before(n, heap_[child])) break;
      heap_[hole] = heap_[child];
      hole = child;
    }
    heap_[hole] = n;
  }

  std::size_t capacity_;
  std::vector<Neighbor> heap_;
};

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

void VicinalConfig::validate() const {
  if (const auto* g = std::get_if<GaussianSimilarity>(&similarity)) {
    if (!(g->sigma > 0.0) || !std::isfinite(g->sigma)) {
      throw ConfigurationError("gaussian similarity needs sigma > 0");
    }
  }
  if (const auto* t = std::get_if<TopM>(&budget); t != nullptr && t->m < 1) {
    throw ConfigurationError("neighbor budget m must be at least 1");
  }
  if (std::holds_alternative<SelfOnly>(budget) && !include_self) {
    throw ConfigurationError("self-only vicinity requires include_self");
  }
}

std::string VicinalConfig::label() const {
  std::string out = "vrp:";
  out += std::visit(overloaded{
                        [](const DotSimilarity&) { return std::string("dot"); },
                        [](const EqualSimilarity&) { return std::string("equal"); },
                        [](const GaussianSimilarity& g) {
                          return "gauss(" + format_real(g.sigma) + ")";
                        },
                        [](const RandomSimilarity& r) {
                          return "random(" + std::to_string(r.seed) + ")";
                        },
                    },
                    similarity);
  out += std::visit(overloaded{
                        [](const AllPositive&) { return std::string(":all"); },
                        [](const TopM& t) { return ":m" + std::to_string(t.m); },
                        [](const SelfOnly&) { return std::string(":self"); },
                    },
                    budget);
  if (!include_self) out += ":noself";
  if (gate == GateView::original) out += ":gate-orig";
  return out;
}

double similarity(const SimilarityKind& kind, std::span<const double> neighbor_row,
                  std::span<const double> center_row, std::size_t neighbor,
                  std::size_t center) {
  return std::visit(
      overloaded{
          [&](const DotSimilarity&) { return dot(neighbor_row, center_row); },
          [](const EqualSimilarity&) { return 1.0; },
          [&](const GaussianSimilarity& g) {
            return std::exp(-squared_distance(neighbor_row, center_row) /
                            (2.0 * g.sigma * g.sigma));
          },
          [&](const RandomSimilarity& r) {
            return open_unit(hash_combine(r.seed, center, neighbor));
          },
      },
      kind);
}

ClassGroups::ClassGroups(const ModelRecord& model, GateView gate) {
  const PredictionMatrix& view = gate == GateView::transformed ? model.transformed : model.original;
  class_of_.resize(view.rows());
  groups_.resize(view.cols());
  for (std::size_t i = 0; i < view.rows(); ++i) {
    class_of_[i] = view.predicted(i);
    groups_[class_of_[i]].push_back(i);
  }
}

NeighborWeights neighbor_weights(const ModelRecord& model, std::size_t i,
                                 const VicinalConfig& cfg) {
  return neighbor_weights(model, ClassGroups(model, cfg.gate), i, cfg);
}

NeighborWeights neighbor_weights(const ModelRecord& model, const ClassGroups& groups,
                                 std::size_t i, const VicinalConfig& cfg) {
  cfg.validate();
  const PredictionMatrix& trans = model.transformed;
  if (i >= trans.rows()) {
    throw DimensionError("sample index " + std::to_string(i) + " out of range");
  }
  NeighborWeights out;
  out.center = i;
  const auto center_row = trans.row(i);

  if (std::holds_alternative<SelfOnly>(cfg.budget)) {
    const double w = similarity(cfg.similarity, center_row, center_row, i, i);
    if (w > 0.0) out.entries.push_back({i, w});
    return out;
  }

  for (std::size_t j : groups.members(groups.group_class(i))) {
    if (j == i && !cfg.include_self) continue;
    const double w = similarity(cfg.similarity, trans.row(j), center_row, j, i);
    if (w > 0.0) out.entries.push_back({j, w});
  }
  std::sort(out.entries.begin(), out.entries.end(), ranks_before);
  if (const auto* t = std::get_if<TopM>(&cfg.budget); t != nullptr && out.entries.size() > t->m) {
    out.entries.resize(t->m);
  }
  return out;
}

double vicinal_expectation(std::span<const double> scores, const NeighborWeights& w) {
  if (w.entries.empty()) {
    throw EmptyVicinityError("sample " + std::to_string(w.center) + " has an empty vicinity");
  }
  for (const auto& e : w.entries) {
    if (e.index >= scores.size()) {
      throw DimensionError("neighbor index " + std::to_string(e.index) + " out of range");
    }
  }
  if (w.entries.size() == 1) {
    if (!(w.entries.front().weight > 0.0)) {
      throw EmptyVicinityError("sample " + std::to_string(w.center) + " has zero total weight");
    }
    return scores[w.entries.front().index];
  }
  double num = 0.0;
  double den = 0.0;
  for (const auto& e : w.entries) {
    num += scores[e.index] * e.weight;
    den += e.weight;
  }
  if (!(den > 0.0)) {
    throw EmptyVicinityError("sample " + std::to_string(w.center) + " has zero total weight");
  }
  return num / den;
}

namespace {

// Search index over one class group for top-m queries. Each row p_j is
// summarized by a_j (mass on the gate class k), rho_j (L2 norm of the other
// entries) and res_j (their sum). For rows p_i, p_j of the group
//   p_j . p_i <= a_i a_j + min(b_i res_j, rho_i rho_j)
//   |p_j - p_i|^2 >= (a_j - a_i)^2 + (rho_j - rho_i)^2
// with b_i the largest non-gate entry of p_i. A 2-d tree over (a, rho)
// turns these into per-box bounds; rows are packed in tree order.
class GroupIndex {
 public:
  static constexpr std::size_t kLeafSize = 8;

  struct Box {
    double lo_a, hi_a, lo_rho, hi_rho, hi_res;
  };

  GroupIndex() = default;

  GroupIndex(const PredictionMatrix& trans, std::span<const std::size_t> members, std::size_t k)
      : C_(trans.cols()) {
    const std::size_t size = members.size();
    if (size == 0) return;
    std::vector<Item> items(size);
    for (std::size_t p = 0; p < size; ++p) {
      const std::size_t j = members[p];
      const auto r = trans.row(j);
      double sq = 0.0, res = 0.0;
      for (std::size_t c = 0; c < C_; ++c) {
        if (c == k) continue;
        sq += r[c] * r[c];
        res += r[c];
      }
      items[p] = {j, r[k], std::sqrt(sq), res};
    }
    build(items, 0, size);
    order_.resize(size);
    a_.resize(size);
    rho_.resize(size);
    rows_.resize(size * C_);
    for (std::size_t p = 0; p < size; ++p) {
      order_[p] = items[p].index;
      a_[p] = items[p].a;
      rho_[p] = items[p].rho;
      const auto r = trans.row(items[p].index);
      std::copy(r.begin(), r.end(), rows_.begin() + static_cast<std::ptrdiff_t>(p * C_));
    }
  }

  std::size_t index(std::size_t p) const { return order_[p]; }
  std::span<const double> row(std::size_t p) const { return {rows_.data() + p * C_, C_}; }

  // Depth-first over the tree, higher-bound child first. bound(box) must be
  // an upper bound on every weight in the box; prune(bound) skips a subtree;
  // leaf(begin, end) scans packed positions.
  template <typename Bound, typename Prune, typename Leaf>
  void search(const Bound& bound, const Prune& prune, const Leaf& leaf) const {
    if (nodes_.empty()) return;
    descend(0, bound(nodes_[0].box), bound, prune, leaf);
  }

 private:
  struct Item {
    std::size_t index;
    double a, rho, res;
  };
  struct Node {
    Box box;
    std::size_t begin, end;
    std::size_t left = 0;  // 0 marks a leaf; the root is never a child
    std::size_t right = 0;
  };

  std::size_t build(std::vector<Item>& items, std::size_t begin, std::size_t end) {
    Box box{items[begin].a, items[begin].a, items[begin].rho, items[begin].rho, items[begin].res};
    for (std::size_t p = begin + 1; p < end; ++p) {
      box.lo_a = std::min(box.lo_a, items[p].a);
      box.hi_a = std::max(box.hi_a, items[p].a);
      box.lo_rho = std::min(box.lo_rho, items[p].rho);
      box.hi_rho = std::max(box.hi_rho, items[p].rho);
      box.hi_res = std::max(box.hi_res, items[p].res);
    }
    const std::size_t id = nodes_.size();
    nodes_.push_back({box, begin, end, 0, 0});
    if (end - begin <= kLeafSize) return id;
    const bool by_a = box.hi_a - box.lo_a >= box.hi_rho - box.lo_rho;
    const std::size_t mid = begin + (end - begin) / 2;
    std::nth_element(items.begin() + static_cast<std::ptrdiff_t>(begin),
                     items.begin() + static_cast<std::ptrdiff_t>(mid),
                     items.begin() + static_cast<std::ptrdiff_t>(end),
                     [by_a](const Item& x, const Item& y) {
                       const double vx = by_a ? x.a : x.rho;
                       const double vy = by_a ? y.a : y.rho;
                       return vx < vy || (vx == vy && x.index < y.index);
                     });
    const std::size_t left = build(items, begin, mid);
    const std::size_t right = build(items, mid, end);
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
  }

  template <typename Bound, typename Prune, typename Leaf>
  void descend(std::size_t id, double node_bound, const Bound& bound, const Prune& prune,
               const Leaf& leaf) const {
    if (prune(node_bound)) return;
    const Node& node = nodes_[id];
    if (node.left == 0) {
      leaf(node.begin, node.end);
      return;
    }
    const double bl = bound(nodes_[node.left].box);
    const double br = bound(nodes_[node.right].box);
    if (bl >= br) {
      descend(node.left, bl, bound, prune, leaf);
      descend(node.right, br, bound, prune, leaf);
    } else {
      descend(node.right, br, bound, prune, leaf);
      descend(node.left, bl, bound, prune, leaf);
    }
  }

  std::size_t C_ = 0;
  std::vector<std::size_t> order_;
  std::vector<double> a_, rho_;
  std::vector<double> rows_;
  std::vector<Node> nodes_;
};

// Per-run state shared by all samples of one vicinal_scores call.
class VicinalEngine {
 public:
  VicinalEngine(std::span<const double> scores, const ModelRecord& model,
                const VicinalConfig& cfg)
      : scores_(scores), trans_(model.transformed), cfg_(cfg),
        groups_(model, cfg.gate) {
    const bool top_m = std::holds_alternative<TopM>(cfg.budget);
    const bool all = std::holds_alternative<AllPositive>(cfg.budget);
    const bool is_dot = std::holds_alternative<DotSimilarity>(cfg.similarity);
    const bool is_gauss = std::holds_alternative<GaussianSimilarity>(cfg.similarity);
    const bool is_equal = std::holds_alternative<EqualSimilarity>(cfg.similarity);

    if (all && is_dot) prepare_dot_sums();
    if (all && is_equal) prepare_group_sums();
    if (top_m && (is_dot || is_gauss)) prepare_indexes();
  }

  // Returns E_i; sets empty when the sample fell back to its own score.
  double expectation(std::size_t i, bool& empty, std::uint64_t& evals) const {
    empty = false;
    if (std::holds_alternative<SelfOnly>(cfg_.budget)) {
      evals += 1;
      return scores_[i];
    }
    if (std::holds_alternative<AllPositive>(cfg_.budget)) return all_positive(i, empty, evals);
    return top_m(i, std::get<TopM>(cfg_.budget).m, empty, evals);
  }

 private:
  double fallback(std::size_t i, bool& empty) const {
    empty = true;
    return scores_[i];
  }

  std::size_t gate_class(std::size_t i) const { return groups_.group_class(i); }

  void prepare_dot_sums() {
    const std::size_t C = trans_.cols();
    prefix_score_.resize(trans_.rows());
    prefix_mass_.resize(trans_.rows());
    suffix_score_.resize(trans_.rows());
    suffix_mass_.resize(trans_.rows());
    for (std::size_t k = 0; k < groups_.classes(); ++k) {
      const auto members = groups_.members(k);
      std::vector<double> s(C, 0.0), q(C, 0.0);
      for (std::size_t i : members) {
        prefix_score_[i] = s;
        prefix_mass_[i] = q;
        const auto r = trans_.row(i);
        for (std::size_t c = 0; c < C; ++c) {
          s[c] += scores_[i] * r[c];
          q[c] += r[c];
        }
      }
      std::fill(s.begin(), s.end(), 0.0);
      std::fill(q.begin(), q.end(), 0.0);
      for (auto it = members.rbegin(); it != members.rend(); ++it) {
        const std::size_t i = *it;
        suffix_score_[i] = s;
        suffix_mass_[i] = q;
        const auto r = trans_.row(i);
        for (std::size_t c = 0; c < C; ++c) {
          s[c] += scores_[i] * r[c];
          q[c] += r[c];
        }
      }
    }
  }

  void prepare_group_sums() {
    group_sum_.assign(groups_.classes(), 0.0);
    for (std::size_t k = 0; k < groups_.classes(); ++k) {
      std::vector<double> member_scores;
      for (std::size_t i : groups_.members(k)) member_scores.push_back(scores_[i]);
      group_sum_[k] = pairwise_sum(member_scores);
    }
  }

  void prepare_indexes() {
    indexes_.resize(groups_.classes());
    for (std::size_t k = 0; k < groups_.classes(); ++k) {
      indexes_[k] = GroupIndex(trans_, groups_.members(k), k);
    }
  }

  double all_positive(std::size_t i, bool& empty, std::uint64_t& evals) const {
    const std::size_t k = gate_class(i);
    const auto members = groups_.members(k);
    const auto center = trans_.row(i);

    return std::visit(
        overloaded{
            [&](const DotSimilarity&) {
              if (cfg_.include_self && members.size() == 1) {
                evals += 1;
                return scores_[i];
              }
              double num = 0.0, den = 0.0;
              for (std::size_t c = 0; c < center.size(); ++c) {
                double s = prefix_score_[i][c] + suffix_score_[i][c];
                double q = prefix_mass_[i][c] + suffix_mass_[i][c];
                if (cfg_.include_self) {
                  s += scores_[i] * center[c];
                  q += center[c];
                }
                num += s * center[c];
                den += q * center[c];
              }
              evals += 1;
              if (!(den > 0.0)) return fallback(i, empty);
              return num / den;
            },
            [&](const EqualSimilarity&) {
              const std::size_t count = members.size() - (cfg_.include_self ? 0 : 1);
              if (count == 0) return fallback(i, empty);
              if (cfg_.include_self && count == 1) return scores_[i];
              const double total =
                  cfg_.include_self ? group_sum_[k] : group_sum_[k] - scores_[i];
              return total / static_cast<double>(count);
            },
            [&](const auto&) {
              double num = 0.0, den = 0.0;
              std::size_t kept = 0;
              std::size_t last = i;
              for (std::size_t j : members) {
                if (j == i && !cfg_.include_self) continue;
                const double w = similarity(cfg_.similarity, trans_.row(j), center, j, i);
                ++evals;
                if (!(w > 0.0)) continue;
                num += scores_[j] * w;
                den += w;
                ++kept;
                last = j;
              }
              if (kept == 0 || !(den > 0.0)) return fallback(i, empty);
              if (kept == 1) return scores_[last];
              return num / den;
            },
        },
        cfg_.similarity);
  }

  double top_m(std::size_t i, std::size_t m, bool& empty, std::uint64_t& evals) const {
    const std::size_t k = gate_class(i);
    const auto members = groups_.members(k);
    const auto center = trans_.row(i);
    TopSelector selector(m);

    auto consider = [&](std::size_t j) {
      const double w = similarity(cfg_.similarity, trans_.row(j), center, j, i);
      ++evals;
      selector.offer({j, w});
    };
    auto prune = [&](double bound) {
      return selector.full() && bound + kBoundSlack < selector.worst_weight();
    };
    // Weights read from the packed copy; identical to those of consider().
    auto scan = [&](const GroupIndex& index, std::size_t begin, std::size_t end, auto weight) {
      for (std::size_t p = begin; p < end; ++p) {
        const std::size_t j = index.index(p);
        if (j == i && !cfg_.include_self) continue;
        ++evals;
        selector.offer({j, weight(index.row(p))});
      }
    };
    const double a_i = center[k];
    double b_i = 0.0, rho_sq = 0.0;
    for (std::size_t c = 0; c < center.size(); ++c) {
      if (c == k) continue;
      b_i = std::max(b_i, center[c]);
      rho_sq += center[c] * center[c];
    }
    const double rho_i = std::sqrt(rho_sq);

    std::visit(
        overloaded{
            [&](const EqualSimilarity&) {
              std::size_t taken = 0;
              for (std::size_t j : members) {
                if (taken == m) break;
                if (j == i && !cfg_.include_self) continue;
                consider(j);
                ++taken;
              }
            },
            [&](const DotSimilarity&) {
              const GroupIndex& index = indexes_[k];
              index.search(
                  [&](const GroupIndex::Box& box) {
                    return a_i * box.hi_a + std::min(b_i * box.hi_res, rho_i * box.hi_rho);
                  },
                  prune,
                  [&](std::size_t begin, std::size_t end) {
                    scan(index, begin, end,
                         [&](std::span<const double> row) { return dot(row, center); });
                  });
            },
            [&](const GaussianSimilarity& gauss) {
              const GroupIndex& index = indexes_[k];
              const double scale = 2.0 * gauss.sigma * gauss.sigma;
              index.search(
                  [&](const GroupIndex::Box& box) {
                    const double ga = std::max({box.lo_a - a_i, a_i - box.hi_a, 0.0});
                    const double gr = std::max({box.lo_rho - rho_i, rho_i - box.hi_rho, 0.0});
                    return std::exp(-(ga * ga + gr * gr) / scale);
                  },
                  prune,
                  [&](std::size_t begin, std::size_t end) {
                    scan(index, begin, end, [&](std::span<const double> row) {
                      return similarity(cfg_.similarity, row, center, 0, 0);
                    });
                  });
            },
            [&](const RandomSimilarity&) {
              for (std::size_t j : members) {
                if (j == i && !cfg_.include_self) continue;
                consider(j);
              }
            },
        },
        cfg_.similarity);

    NeighborWeights w;
    w.center = i;
    w.entries = selector.take_sorted();
    if (w.entries.empty()) return fallback(i, empty);
    return vicinal_expectation(scores_, w);
  }

  std::span<const double> scores_;
  const PredictionMatrix& trans_;
  const VicinalConfig& cfg_;
  ClassGroups groups_;

  std::vector<std::vector<double>> prefix_score_, prefix_mass_, suffix_score_, suffix_mass_;
  std::vector<double> group_sum_;
  std::vector<GroupIndex> indexes_;
};

}  // namespace

VicinalResult vicinal_scores(std::span<const double> scores, const ModelRecord& model,
                             const VicinalConfig& cfg, unsigned threads) {
  cfg.validate();
  const std::size_t n = model.transformed.rows();
  if (scores.size() != n) {
    throw DimensionError("vicinal scores: " + std::to_string(scores.size()) +
                         " scores for " + std::to_string(n) + " samples");
  }
  const VicinalEngine engine(scores, model, cfg);

  VicinalResult result;
  result.expectations.resize(n);
  std::vector<std::uint8_t> empty(n, 0);
  std::vector<std::uint64_t> evals(n, 0);
  parallel_for(n, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      bool was_empty = false;
      result.expectations[i] = engine.expectation(i, was_empty, evals[i]);
      empty[i] = was_empty ? 1 : 0;
    }
  });
  result.value = ordered_mean(result.expectations);
  for (std::size_t i = 0; i < n; ++i) {
    result.empty_vicinities += empty[i];
    result.weight_evaluations += evals[i];
  }
  return result;
}

double vrp(ProxyKind kind, const ModelRecord& model, const ProxyContext& ctx,
           const VicinalConfig& cfg, unsigned threads) {
  const std::vector<double> scores = per_sample_scores(kind, model, ctx);
  return vicinal_scores(scores, model, cfg, threads).value;
}

}  // namespace vrp
