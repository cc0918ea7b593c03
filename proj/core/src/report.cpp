#include "vrp/report.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "vrp/error.hpp"
#include "vrp/formats.hpp"
#include "vrp/parallel.hpp"
#include "vrp/stats.hpp"
#include "vrp/summation.hpp"
#include "vrp/svg.hpp"

namespace vrp {

namespace fs = std::filesystem;

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string opt(const std::optional<double>& v) { return v ? format_number(*v) : ""; }

struct Cell {
  std::vector<double> erp;                  // per model
  std::vector<std::optional<double>> vrp;   // per model
  stats::ScoreMatrix per_sample;            // per model, for overlap
};

void write_text(const fs::path& path, const std::string& text) {
  write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

ReportResult compute_report(const Bench& bench, std::span<const ProxyKind> proxies,
                            std::span<const ReportConfig> configs, const ReportOptions& options) {
  bench.validate();
  if ((options.correlations || options.overlap) && !bench.labels) {
    throw ConfigurationError("bench '" + bench.name +
                             "' has no labels; correlation and overlap need ground truth");
  }
  if (proxies.empty()) throw ConfigurationError("no proxies requested");
  if (configs.empty()) throw ConfigurationError("no scoring configs requested");
  for (const auto& c : configs) {
    if (c.vicinal) c.vicinal->validate();
  }

  const std::size_t M = bench.models.size();
  const unsigned threads = resolve_threads(options.threads);

  std::vector<ProxyContext> contexts(M);
  std::vector<std::optional<double>> acc(M);
  for (std::size_t m = 0; m < M; ++m) {
    contexts[m] = fit_context(bench.models[m]);
    for (ProxyKind p : proxies) require_context(p, contexts[m]);
    if (bench.labels) acc[m] = accuracy(bench.models[m].original, *bench.labels);
  }

  // Empirical per-sample scores are shared by every config.
  std::vector<stats::ScoreMatrix> base(proxies.size(), stats::ScoreMatrix(M));
  parallel_for(M, threads, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t m = lo; m < hi; ++m) {
      for (std::size_t p = 0; p < proxies.size(); ++p) {
        base[p][m] = per_sample_scores(proxies[p], bench.models[m], contexts[m]);
      }
    }
  });

  ReportResult result;
  std::vector<std::vector<Cell>> cells(configs.size(), std::vector<Cell>(proxies.size()));
  for (std::size_t c = 0; c < configs.size(); ++c) {
    const ReportConfig& cfg = configs[c];
    std::vector<std::uint64_t> evals(M, 0);
    std::vector<std::size_t> empties(M, 0);
    const auto start = std::chrono::steady_clock::now();
    for (std::size_t p = 0; p < proxies.size(); ++p) {
      Cell& cell = cells[c][p];
      cell.erp.resize(M);
      cell.vrp.resize(M);
      cell.per_sample.resize(M);
      parallel_for(M, threads, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t m = lo; m < hi; ++m) {
          cell.erp[m] = ordered_mean(base[p][m]);
          if (cfg.vicinal) {
            VicinalResult v = vicinal_scores(base[p][m], bench.models[m], *cfg.vicinal, 1);
            cell.vrp[m] = v.value;
            evals[m] += v.weight_evaluations;
            empties[m] += v.empty_vicinities;
            cell.per_sample[m] = std::move(v.expectations);
          }
        }
      });
    }
    const auto stop = std::chrono::steady_clock::now();
    ConfigTiming timing;
    timing.config = cfg.label();
    timing.seconds = std::chrono::duration<double>(stop - start).count();
    for (std::size_t m = 0; m < M; ++m) {
      timing.weight_evaluations += evals[m];
      timing.empty_vicinities += empties[m];
    }
    result.timings.push_back(timing);

    for (std::size_t p = 0; p < proxies.size(); ++p) {
      const Cell& cell = cells[c][p];
      for (std::size_t m = 0; m < M; ++m) {
        result.scores.push_back(
            {bench.models[m].id, proxies[p], cfg.label(), cell.erp[m], cell.vrp[m], acc[m]});
      }
    }
  }

  for (std::size_t c = 0; c < configs.size(); ++c) {
    for (std::size_t p = 0; p < proxies.size(); ++p) {
      const Cell& cell = cells[c][p];
      if (options.correlations) {
        std::vector<double> xs(M), ys(M);
        for (std::size_t m = 0; m < M; ++m) {
          xs[m] = cell.vrp[m] ? *cell.vrp[m] : cell.erp[m];
          ys[m] = *acc[m];
        }
        CorrelationRow row{proxies[p], configs[c].label(), std::nullopt, std::nullopt, M};
        try {
          row.pearson = stats::pearson(xs, ys);
        } catch (const DegenerateInputError&) {
        }
        try {
          row.spearman = stats::spearman(xs, ys);
        } catch (const DegenerateInputError&) {
        }
        result.correlations.push_back(row);
      }
      if (options.overlap) {
        OverlapRow row{proxies[p], configs[c].label(), std::nullopt, 0, 0};
        try {
          const auto& scores = configs[c].vicinal ? cell.per_sample : base[p];
          const auto rep = stats::mean_overlap(bench, scores, threads);
          row.mean = rep.mean;
          row.samples = rep.samples.size();
          row.excluded = rep.excluded;
        } catch (const InsufficientDataError&) {
          row.excluded = bench.n;
        }
        result.overlap.push_back(row);
      }
    }
  }
  return result;
}

std::string scores_csv(const ReportResult& r) {
  std::string out = "model,proxy,config,erp,vrp,accuracy\n";
  for (const auto& s : r.scores) {
    out += csv_field(s.model) + "," + std::string(to_string(s.proxy)) + "," +
           csv_field(s.config) + "," + format_number(s.erp) + "," + opt(s.vrp) + "," +
           opt(s.accuracy) + "\n";
  }
  return out;
}

std::string correlations_csv(const ReportResult& r) {
  std::string out = "proxy,config,pearson,spearman,n_models\n";
  for (const auto& c : r.correlations) {
    out += std::string(to_string(c.proxy)) + "," + csv_field(c.config) + "," + opt(c.pearson) +
           "," + opt(c.spearman) + "," + std::to_string(c.n_models) + "\n";
  }
  return out;
}

std::string overlap_csv(const ReportResult& r) {
  std::string out = "proxy,config,mean_overlap,samples,excluded\n";
  for (const auto& o : r.overlap) {
    out += std::string(to_string(o.proxy)) + "," + csv_field(o.config) + "," + opt(o.mean) + "," +
           std::to_string(o.samples) + "," + std::to_string(o.excluded) + "\n";
  }
  return out;
}

std::string ranking_csv(const ReportResult& r) {
  std::map<std::pair<std::string, std::string>, std::vector<const ScoreRow*>> groups;
  std::vector<std::pair<std::string, std::string>> order;
  for (const auto& s : r.scores) {
    auto key = std::make_pair(s.config, std::string(to_string(s.proxy)));
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) order.push_back(key);
    it->second.push_back(&s);
  }
  std::string out = "proxy,config,rank,model,value,accuracy\n";
  for (const auto& key : order) {
    auto rows = groups[key];
    std::stable_sort(rows.begin(), rows.end(), [](const ScoreRow* a, const ScoreRow* b) {
      if (a->value() != b->value()) return a->value() > b->value();
      return a->model < b->model;
    });
    for (std::size_t k = 0; k < rows.size(); ++k) {
      out += key.second + "," + csv_field(key.first) + "," + std::to_string(k + 1) + "," +
             csv_field(rows[k]->model) + "," + format_number(rows[k]->value()) + "," +
             opt(rows[k]->accuracy) + "\n";
    }
  }
  return out;
}

std::vector<fs::path> run_report(const Bench& bench, std::span<const ProxyKind> proxies,
                                 std::span<const ReportConfig> configs, const fs::path& out_dir,
                                 const ReportOptions& options) {
  const ReportResult r = compute_report(bench, proxies, configs, options);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

  std::vector<fs::path> written;
  auto emit = [&](const std::string& name, const std::string& text) {
    write_text(out_dir / name, text);
    written.push_back(out_dir / name);
  };
  emit("scores.csv", scores_csv(r));
  if (options.correlations) emit("correlations.csv", correlations_csv(r));
  if (options.overlap) emit("overlap.csv", overlap_csv(r));

  nlohmann::json scatter_files = nlohmann::json::array();
  if (options.scatter && bench.labels) {
    for (std::size_t c = 0; c < configs.size(); ++c) {
      for (std::size_t p = 0; p < proxies.size(); ++p) {
        std::vector<double> xs, ys;
        for (const auto& s : r.scores) {
          if (s.proxy == proxies[p] && s.config == configs[c].label()) {
            xs.push_back(s.value());
            ys.push_back(*s.accuracy);
          }
        }
        ScatterPlot plot;
        plot.title = std::string(to_string(proxies[p])) + " " + configs[c].label();
        plot.x_label = configs[c].vicinal ? "vrp" : "erp";
        plot.y_label = "accuracy";
        plot.x = xs;
        plot.y = ys;
        try {
          plot.fit = stats::bootstrap_linear_fit(xs, ys, options.n_boot, 0.95, options.seed);
        } catch (const Error&) {
        }
        const std::string name =
            "scatter_" + std::string(to_string(proxies[p])) + "_" + std::to_string(c) + ".svg";
        emit(name, render_scatter(plot));
        scatter_files.push_back({{"file", name}, {"config", configs[c].label()}});
      }
    }
  }

  nlohmann::json meta;
  meta["bench"] = {{"name", bench.name}, {"n", bench.n}, {"classes", bench.classes},
                   {"models", bench.models.size()}, {"transform", bench.transform.to_string()}};
  nlohmann::json px = nlohmann::json::array();
  for (ProxyKind p : proxies) px.push_back(std::string(to_string(p)));
  meta["proxies"] = px;
  nlohmann::json timings = nlohmann::json::array();
  for (const auto& t : r.timings) {
    timings.push_back({{"config", t.config},
                       {"seconds", t.seconds},
                       {"weight_evaluations", t.weight_evaluations},
                       {"empty_vicinities", t.empty_vicinities}});
  }
  meta["configs"] = timings;
  meta["threads"] = resolve_threads(options.threads);
  meta["summation"] = "pairwise";
  meta["kde"] = {{"kernel", "gaussian"},
                 {"bandwidth", "scott"},
                 {"bandwidth_floor", stats::kBandwidthFloor},
                 {"grid_points", stats::kOverlapGridPoints},
                 {"grid_padding_bandwidths", 3},
                 {"min_models_per_side", 2}};
  meta["fit"] = {{"estimator", "huber"},
                 {"tuning", stats::kHuberTuning},
                 {"bootstrap", options.n_boot},
                 {"seed", options.seed}};
  meta["scatter"] = scatter_files;
  emit("metadata.json", meta.dump(2) + "\n");
  return written;
}

}  // namespace vrp
