#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "vrp/core_model.hpp"

namespace vrp {

enum class ProxyKind { ac, ei, ci, doc, atc };

inline constexpr ProxyKind kAllProxies[] = {ProxyKind::ac, ProxyKind::ei, ProxyKind::ci,
                                            ProxyKind::doc, ProxyKind::atc};

std::string_view to_string(ProxyKind kind) noexcept;
// Accepts ac|ei|ci|doc|atc, case-insensitive. Throws ConfigurationError.
ProxyKind parse_proxy(std::string_view name);

// True for proxies whose context is fitted on a labelled validation set.
bool needs_validation(ProxyKind kind) noexcept;

// Which probability CI reads off. The default takes the transformed view at
// the original view's predicted class.
enum class CiReading { transformed_at_original, original_at_transformed };

// Model knowledge the proxies may use beyond the test set.
struct ProxyContext {
  std::optional<double> atc_threshold;
  std::optional<double> doc_offset;
  bool ei_sqrt = false;  // geometric-mean EI instead of the plain product
  CiReading ci_reading = CiReading::transformed_at_original;
};

// Throws ConfigurationError when ctx lacks a field the kind needs.
void require_context(ProxyKind kind, const ProxyContext& ctx);

double per_sample_proxy(ProxyKind kind, const ModelRecord& model, const ProxyContext& ctx,
                        std::size_t i);

// per_sample_proxy for every test sample, in sample order.
std::vector<double> per_sample_scores(ProxyKind kind, const ModelRecord& model,
                                      const ProxyContext& ctx);

// Empirical risk proxy: ordered mean of the per-sample scores.
double erp(ProxyKind kind, const ModelRecord& model, const ProxyContext& ctx);

// Confidence threshold whose strict exceedance fraction on the validation set
// is as close as possible to the validation accuracy. The cut is placed at the
// midpoint between neighbouring distinct sorted confidences.
double fit_atc_threshold(const PredictionMatrix& val, const LabelVector& val_labels);

// Validation accuracy minus validation average confidence.
double doc_offset(const PredictionMatrix& val, const LabelVector& val_labels);

// Fraction of rows with confidence strictly above t.
double exceedance_fraction(const PredictionMatrix& m, double t);

// Fits both validation-derived fields when the model carries a validation set;
// returns an empty context otherwise.
ProxyContext fit_context(const ModelRecord& model);

}  // namespace vrp
