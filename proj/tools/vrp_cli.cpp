#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#ifdef VRP_CLI11_PACKAGE
#include <CLI/CLI.hpp>
#else
#include "CLI11.hpp"
#endif

#include "vrp/error.hpp"
#include "vrp/manifest.hpp"
#include "vrp/parallel.hpp"
#include "vrp/report.hpp"
#include "vrp/synth.hpp"

namespace fs = std::filesystem;

namespace {

struct Shared {
  std::string manifest;
  std::vector<std::string> proxies;
  std::string vicinal = "on";
  std::string similarity = "dot";
  double sigma = 1.0;
  std::vector<std::string> neighbors;
  bool include_self = true;
  std::uint64_t seed = 0;
  std::optional<std::size_t> subsample;
  std::string out;
};

void add_shared(CLI::App* cmd, Shared& s, bool out_required) {
  cmd->add_option("--manifest", s.manifest, "Bench manifest (manifest.json)")->required();
  cmd->add_option("--proxy", s.proxies, "Proxy: ac|ei|ci|doc|atc (repeatable, default ac)");
  cmd->add_option("--vicinal", s.vicinal, "Add vicinal configs next to erp")
      ->check(CLI::IsMember({"on", "off"}));
  cmd->add_option("--similarity", s.similarity, "Vicinal similarity")
      ->check(CLI::IsMember({"dot", "equal", "gaussian", "random"}));
  cmd->add_option("--sigma", s.sigma, "Gaussian similarity bandwidth")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--neighbors", s.neighbors, "Neighbor budget: all|self|<m> (repeatable)");
  cmd->add_flag("--include-self,!--no-include-self", s.include_self,
                "Count the sample in its own vicinity");
  cmd->add_option("--seed", s.seed, "Seed for random similarity, subsampling and bootstrap");
  cmd->add_option("--subsample", s.subsample, "Keep k test samples")->check(CLI::PositiveNumber);
  auto* out = cmd->add_option("--out", s.out,
                              out_required ? "Output directory" : "Output file (default stdout)");
  if (out_required) out->required();
}

std::vector<vrp::ProxyKind> proxies_of(const Shared& s) {
  std::vector<vrp::ProxyKind> out;
  for (const auto& p : s.proxies) out.push_back(vrp::parse_proxy(p));
  if (out.empty()) out.push_back(vrp::ProxyKind::ac);
  return out;
}

vrp::NeighborBudget parse_budget(const std::string& text) {
  if (text == "all") return vrp::AllPositive{};
  if (text == "self") return vrp::SelfOnly{};
  std::size_t used = 0;
  unsigned long long m = 0;
  try {
    m = std::stoull(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || m == 0 || text.front() == '-') {
    throw vrp::ConfigurationError("--neighbors expects all, self or a positive integer, got '" +
                                  text + "'");
  }
  return vrp::TopM{static_cast<std::size_t>(m)};
}

std::vector<vrp::ReportConfig> configs_of(const Shared& s) {
  std::vector<vrp::ReportConfig> out{{std::nullopt}};
  if (s.vicinal == "off") return out;
  vrp::SimilarityKind sim = vrp::DotSimilarity{};
  if (s.similarity == "equal") sim = vrp::EqualSimilarity{};
  if (s.similarity == "gaussian") sim = vrp::GaussianSimilarity{s.sigma};
  if (s.similarity == "random") sim = vrp::RandomSimilarity{s.seed};
  std::vector<std::string> budgets = s.neighbors;
  if (budgets.empty()) budgets.push_back("all");
  for (const auto& b : budgets) {
    vrp::VicinalConfig cfg;
    cfg.similarity = sim;
    cfg.budget = parse_budget(b);
    cfg.include_self = s.include_self;
    cfg.validate();
    out.push_back({cfg});
  }
  return out;
}

vrp::Bench load(const Shared& s) {
  vrp::Bench bench = vrp::load_bench(s.manifest);
  if (s.subsample) bench = vrp::subsample(bench, *s.subsample, s.seed);
  return bench;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::fwrite(text.data(), 1, text.size(), stdout);
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  out.close();
  if (!out) throw vrp::IoError("cannot write " + path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Empirical and vicinal risk proxies for model zoos"};
  app.require_subcommand(1);

  vrp::synth::ZooSpec zoo;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "Write a seeded synthetic model zoo");
  synth->add_option("--out", synth_out, "Output directory")->required();
  synth->add_option("--seed", zoo.seed, "Seed");
  synth->add_option("--samples", zoo.n_samples, "Test samples");
  synth->add_option("--classes", zoo.n_classes, "Classes");
  synth->add_option("--models", zoo.n_models, "Models");
  synth->add_option("--accuracy-lo", zoo.accuracy_lo, "Lowest target accuracy");
  synth->add_option("--accuracy-hi", zoo.accuracy_hi, "Highest target accuracy");
  synth->add_option("--spurious-rate", zoo.spurious_rate, "Mean spurious fraction");
  synth->add_option("--sharpness", zoo.confidence_sharpness, "Confidence concentration");
  synth->add_option("--validation", zoo.n_validation, "Validation samples per model (0 = none)");

  Shared score_opts, rank_opts, corr_opts, overlap_opts, report_opts;
  auto* score = app.add_subcommand("score", "Per-model erp/vrp scores as CSV");
  add_shared(score, score_opts, false);
  auto* rank = app.add_subcommand("rank", "Models ranked by each proxy and config");
  add_shared(rank, rank_opts, false);
  auto* correlate = app.add_subcommand("correlate", "Proxy/accuracy correlations");
  add_shared(correlate, corr_opts, false);
  auto* overlap = app.add_subcommand("overlap", "Correct/incorrect score overlap");
  add_shared(overlap, overlap_opts, false);
  auto* report = app.add_subcommand("report", "All CSVs, metadata and optional plots");
  add_shared(report, report_opts, true);
  bool scatter = false;
  std::size_t n_boot = 1000;
  report->add_flag("--scatter", scatter, "Write scatter SVGs with fit and band");
  report->add_option("--bootstrap", n_boot, "Bootstrap replicates for the fit band");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    const unsigned threads = vrp::threads_from_env();
    auto run = [&](const Shared& s, bool corr, bool ovl) {
      vrp::ReportOptions opt;
      opt.correlations = corr;
      opt.overlap = ovl;
      opt.seed = s.seed;
      opt.threads = threads;
      const auto bench = load(s);
      const auto proxies = proxies_of(s);
      const auto configs = configs_of(s);
      return vrp::compute_report(bench, proxies, configs, opt);
    };

    if (*synth) {
      const auto path = vrp::save_bench(vrp::synth::generate_zoo(zoo), synth_out);
      std::cout << path.string() << "\n";
    } else if (*score) {
      emit(score_opts.out, vrp::scores_csv(run(score_opts, false, false)));
    } else if (*rank) {
      emit(rank_opts.out, vrp::ranking_csv(run(rank_opts, false, false)));
    } else if (*correlate) {
      emit(corr_opts.out, vrp::correlations_csv(run(corr_opts, true, false)));
    } else if (*overlap) {
      emit(overlap_opts.out, vrp::overlap_csv(run(overlap_opts, false, true)));
    } else if (*report) {
      vrp::ReportOptions opt;
      opt.scatter = scatter;
      opt.n_boot = n_boot;
      opt.seed = report_opts.seed;
      opt.threads = threads;
      const auto bench = load(report_opts);
      const auto proxies = proxies_of(report_opts);
      const auto configs = configs_of(report_opts);
      for (const auto& p : vrp::run_report(bench, proxies, configs, report_opts.out, opt)) {
        std::cout << p.string() << "\n";
      }
    }
  } catch (const vrp::Error& e) {
    std::cerr << "vrp: " << vrp::to_string(e.kind()) << ": " << e.what() << "\n";
    return vrp::exit_code(e.kind());
  } catch (const fs::filesystem_error& e) {
    std::cerr << "vrp: I/O error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "vrp: error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
