#include "vrp/proxies.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <string>

#include "vrp/error.hpp"
#include "vrp/summation.hpp"

namespace vrp {

std::string_view to_string(ProxyKind kind) noexcept {
  switch (kind) {
    case ProxyKind::ac: return "ac";
    case ProxyKind::ei: return "ei";
    case ProxyKind::ci: return "ci";
    case ProxyKind::doc: return "doc";
    case ProxyKind::atc: return "atc";
  }
  return "?";
}

ProxyKind parse_proxy(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (ProxyKind k : kAllProxies) {
    if (lower == to_string(k)) return k;
  }
  throw ConfigurationError("unknown proxy '" + std::string(name) + "'");
}

bool needs_validation(ProxyKind kind) noexcept {
  return kind == ProxyKind::doc || kind == ProxyKind::atc;
}

void require_context(ProxyKind kind, const ProxyContext& ctx) {
  if (kind == ProxyKind::atc && !ctx.atc_threshold) {
    throw ConfigurationError("ATC scoring needs a fitted confidence threshold");
  }
  if (kind == ProxyKind::doc && !ctx.doc_offset) {
    throw ConfigurationError("DoC scoring needs a validation offset");
  }
}

namespace {

double score_unchecked(ProxyKind kind, const ModelRecord& model, const ProxyContext& ctx,
                       std::size_t i) {
  const PredictionMatrix& orig = model.original;
  const PredictionMatrix& trans = model.transformed;
  switch (kind) {
    case ProxyKind::ac:
      return orig.confidence(i);
    case ProxyKind::ei: {
      if (orig.predicted(i) != trans.predicted(i)) return 0.0;
      const double product = orig.confidence(i) * trans.confidence(i);
      return ctx.ei_sqrt ? std::sqrt(product) : product;
    }
    case ProxyKind::ci:
      return ctx.ci_reading == CiReading::transformed_at_original
                 ? trans.at(i, orig.predicted(i))
                 : orig.at(i, trans.predicted(i));
    case ProxyKind::doc:
      return orig.confidence(i) + *ctx.doc_offset;
    case ProxyKind::atc:
      return orig.confidence(i) > *ctx.atc_threshold ? 1.0 : 0.0;
  }
  return 0.0;
}

}  // namespace

double per_sample_proxy(ProxyKind kind, const ModelRecord& model, const ProxyContext& ctx,
                        std::size_t i) {
  require_context(kind, ctx);
  if (i >= model.original.rows()) {
    throw DimensionError("sample index " + std::to_string(i) + " out of range for model '" +
                         model.id + "'");
  }
  return score_unchecked(kind, model, ctx, i);
}

std::vector<double> per_sample_scores(ProxyKind kind, const ModelRecord& model,
                                      const ProxyContext& ctx) {
  require_context(kind, ctx);
  std::vector<double> scores(model.original.rows());
  for (std::size_t i = 0; i < scores.size(); ++i) scores[i] = score_unchecked(kind, model, ctx, i);
  return scores;
}

double erp(ProxyKind kind, const ModelRecord& model, const ProxyContext& ctx) {
  return ordered_mean(per_sample_scores(kind, model, ctx));
}

double fit_atc_threshold(const PredictionMatrix& val, const LabelVector& val_labels) {
  if (val.empty()) throw ConfigurationError("ATC threshold needs a non-empty validation set");
  const double acc = accuracy(val, val_labels);
  const std::size_t n = val.rows();

  std::vector<double> conf(n);
  for (std::size_t i = 0; i < n; ++i) conf[i] = val.confidence(i);
  std::sort(conf.begin(), conf.end(), std::greater<>());

  const auto target = static_cast<std::size_t>(std::llround(acc * static_cast<double>(n)));

  // Feasible exceedance counts are 0, n, and every position p where
  // conf[p-1] > conf[p]. Pick the one closest to target (smaller on ties).
  std::size_t best = 0;
  auto consider = [&](std::size_t p) {
    const auto dist = [&](std::size_t q) { return q > target ? q - target : target - q; };
    if (dist(p) < dist(best) || (dist(p) == dist(best) && p < best)) best = p;
  };
  consider(n);
  for (std::size_t p = 1; p < n; ++p) {
    if (conf[p - 1] > conf[p]) consider(p);
  }

  if (best == 0) return conf.front();
  if (best == n) return std::nextafter(conf.back(), -1.0);
  return 0.5 * (conf[best - 1] + conf[best]);
}

double doc_offset(const PredictionMatrix& val, const LabelVector& val_labels) {
  if (val.empty()) throw ConfigurationError("DoC offset needs a non-empty validation set");
  const double acc = accuracy(val, val_labels);
  std::vector<double> conf(val.rows());
  for (std::size_t i = 0; i < conf.size(); ++i) conf[i] = val.confidence(i);
  return acc - ordered_mean(conf);
}

double exceedance_fraction(const PredictionMatrix& m, double t) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < m.rows(); ++i) count += m.confidence(i) > t ? 1 : 0;
  return static_cast<double>(count) / static_cast<double>(m.rows());
}

ProxyContext fit_context(const ModelRecord& model) {
  ProxyContext ctx;
  if (model.validation && model.validation_labels) {
    ctx.atc_threshold = fit_atc_threshold(*model.validation, *model.validation_labels);
    ctx.doc_offset = doc_offset(*model.validation, *model.validation_labels);
  }
  return ctx;
}

}  // namespace vrp
