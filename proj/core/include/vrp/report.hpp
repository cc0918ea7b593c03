#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vrp/core_model.hpp"
#include "vrp/proxies.hpp"
#include "vrp/vicinal.hpp"

namespace vrp {

// One scoring configuration: empirical only, or empirical plus vicinal.
struct ReportConfig {
  std::optional<VicinalConfig> vicinal;

  std::string label() const { return vicinal ? vicinal->label() : "erp"; }
};

struct ReportOptions {
  bool correlations = true;
  bool overlap = true;
  bool scatter = false;
  std::size_t n_boot = 1000;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

struct ScoreRow {
  std::string model;
  ProxyKind proxy;
  std::string config;
  double erp = 0.0;
  std::optional<double> vrp;
  std::optional<double> accuracy;

  // The value the config ranks models by: vrp when present, erp otherwise.
  double value() const { return vrp ? *vrp : erp; }
};

struct CorrelationRow {
  ProxyKind proxy;
  std::string config;
  std::optional<double> pearson;   // empty when a side has zero variance
  std::optional<double> spearman;
  std::size_t n_models = 0;
};

struct OverlapRow {
  ProxyKind proxy;
  std::string config;
  std::optional<double> mean;  // empty when no sample qualifies
  std::size_t samples = 0;
  std::size_t excluded = 0;
};

struct ConfigTiming {
  std::string config;
  double seconds = 0.0;
  std::uint64_t weight_evaluations = 0;
  std::size_t empty_vicinities = 0;
};

struct ReportResult {
  std::vector<ScoreRow> scores;  // config-major, then proxy, then model order
  std::vector<CorrelationRow> correlations;
  std::vector<OverlapRow> overlap;
  std::vector<ConfigTiming> timings;
};

// Throws ConfigurationError when correlations or overlap are requested on a
// bench without labels, or a proxy needs a validation set a model lacks.
ReportResult compute_report(const Bench& bench, std::span<const ProxyKind> proxies,
                            std::span<const ReportConfig> configs, const ReportOptions& options);

// compute_report plus files in out_dir: scores.csv, correlations.csv,
// overlap.csv, metadata.json and, with options.scatter, one
// scatter_<proxy>_<n>.svg per (proxy, config). Returns the written paths.
std::vector<std::filesystem::path> run_report(const Bench& bench,
                                              std::span<const ProxyKind> proxies,
                                              std::span<const ReportConfig> configs,
                                              const std::filesystem::path& out_dir,
                                              const ReportOptions& options);

// "%.6g"; empty string for an empty optional.
std::string format_number(double v);

std::string scores_csv(const ReportResult& r);
std::string correlations_csv(const ReportResult& r);
std::string overlap_csv(const ReportResult& r);
// Models of one (proxy, config) ordered by descending value, ties by id.
std::string ranking_csv(const ReportResult& r);

}  // namespace vrp
