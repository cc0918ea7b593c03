#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "oracles.hpp"
#include "temp_dir.hpp"
#include "vrp/formats.hpp"
#include "vrp/manifest.hpp"

namespace vrp {
namespace {

std::string g_cli;

struct Result {
  int code = -1;
  std::string out;
};

Result run(const std::string& args, const std::string& env = "") {
  Result r;
  const std::string cmd = env + " " + g_cli + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  if (p == nullptr) return r;
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, got);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::vector<std::vector<std::string>> csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (std::size_t k = 0; k <= line.size(); ++k) {
      if (k == line.size() || line[k] == ',') {
        cells.push_back(line.substr(start, k - start));
        start = k + 1;
      }
    }
    rows.push_back(cells);
  }
  return rows;
}

class Cli : public testing::Test {
 protected:
  static void SetUpTestSuite() {
    ASSERT_FALSE(g_cli.empty()) << "pass --cli=<path to vrp>";
    dir_ = new fixtures::TempDir;
    ASSERT_EQ(run("synth --out " + (*dir_ / "zoo").string() +
                  " --seed 4 --samples 250 --models 7 --validation 60")
                  .code,
              0);
  }
  static void TearDownTestSuite() { delete dir_; }
  static std::string manifest() { return " --manifest " + (*dir_ / "zoo/manifest.json").string(); }

  static fixtures::TempDir* dir_;
};

fixtures::TempDir* Cli::dir_ = nullptr;

TEST_F(Cli, SynthWritesLoadableBench) {
  const Bench b = load_bench(*dir_ / "zoo/manifest.json");
  EXPECT_EQ(b.n, 250u);
  EXPECT_EQ(b.models.size(), 7u);
}

TEST_F(Cli, ScoreDefaults) {
  const auto r = run("score" + manifest());
  ASSERT_EQ(r.code, 0);
  const auto rows = csv(r.out);
  ASSERT_EQ(rows.size(), 1u + 2 * 7);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"model", "proxy", "config", "erp", "vrp", "accuracy"}));
  EXPECT_EQ(rows[1][2], "erp");
  EXPECT_EQ(rows[8][2], "vrp:dot:all");
}

TEST_F(Cli, SelfOnlyColumnsAgree) {
  const auto r = run("score" + manifest() + " --proxy ac --proxy ci --neighbors self");
  ASSERT_EQ(r.code, 0);
  std::size_t checked = 0;
  for (const auto& row : csv(r.out)) {
    if (row[2] != "vrp:dot:self") continue;
    EXPECT_EQ(row[3], row[4]);
    ++checked;
  }
  EXPECT_EQ(checked, 14u);
}

TEST_F(Cli, NeighborSweepAndOptions) {
  const auto r = run("correlate" + manifest() +
                     " --similarity gaussian --sigma 0.5 --neighbors 5 --neighbors 20 --no-include-self");
  ASSERT_EQ(r.code, 0);
  const auto rows = csv(r.out);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[2][1], "vrp:gauss(0.5):m5:noself");
  EXPECT_EQ(rows[3][1], "vrp:gauss(0.5):m20:noself");
}

TEST_F(Cli, VicinalOff) {
  const auto r = run("rank" + manifest() + " --vicinal off --proxy ei");
  ASSERT_EQ(r.code, 0);
  const auto rows = csv(r.out);
  ASSERT_EQ(rows.size(), 8u);
  for (std::size_t k = 1; k < rows.size(); ++k) EXPECT_EQ(rows[k][1], "erp");
}

TEST_F(Cli, SubsampleAndOutFile) {
  const auto out = (*dir_ / "over.csv").string();
  ASSERT_EQ(run("overlap" + manifest() + " --subsample 80 --seed 2 --out " + out).code, 0);
  std::ifstream in(out);
  std::stringstream ss;
  ss << in.rdbuf();
  const auto rows = csv(ss.str());
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(std::stoul(rows[1][3]) + std::stoul(rows[1][4]), 80u);
}

TEST_F(Cli, ReportFiles) {
  const auto out = *dir_ / "rep";
  const auto r = run("report" + manifest() + " --proxy atc --scatter --bootstrap 30 --out " + out.string());
  ASSERT_EQ(r.code, 0);
  for (const char* f : {"scores.csv", "correlations.csv", "overlap.csv", "metadata.json",
                        "scatter_atc_0.svg", "scatter_atc_1.svg"}) {
    EXPECT_TRUE(std::filesystem::exists(out / f)) << f;
  }
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(run("score --manifest /nonexistent/manifest.json").code, 4);
  EXPECT_EQ(run("score" + manifest() + " --proxy bogus").code, 2);
  EXPECT_EQ(run("score" + manifest() + " --unknown-flag").code, 2);
  EXPECT_EQ(run("score" + manifest() + " --neighbors zero").code, 2);
  EXPECT_EQ(run("score" + manifest() + " --similarity gaussian --sigma -1").code, 2);
  EXPECT_EQ(run("").code, 2);

  fixtures::TempDir bad;
  write_matrix(bad / "o.vrpm", fixtures::matrix({{0.9, 0.1}, {0.3, 0.7}}));
  auto bytes = read_file(bad / "o.vrpm");
  const double broken = 0.8;
  std::memcpy(bytes.data() + kMatrixHeaderSize, &broken, sizeof broken);
  write_file(bad / "o.vrpm", bytes);
  std::ofstream(bad / "manifest.json")
      << R"({"format": "vrp-bench", "version": 1, "name": "bad", "n": 2, "classes": 2,)"
      << R"( "transform": "none", "labels": null,)"
      << R"( "models": [{"id": "broken", "original": "o.vrpm", "transformed": "o.vrpm"}]})";
  EXPECT_EQ(run("score --vicinal off --manifest " + (bad / "manifest.json").string()).code, 3);
}

TEST_F(Cli, CorrelateWithoutLabelsIsConfigurationError) {
  fixtures::TempDir dir;
  Bench b = fixtures::random_bench(1, 10, 3, 3, 0);
  b.labels.reset();
  save_bench(b, dir.path());
  const std::string m = " --manifest " + (dir / "manifest.json").string();
  EXPECT_EQ(run("correlate" + m).code, 2);
  EXPECT_EQ(run("score" + m).code, 0);
}

}  // namespace
}  // namespace vrp

int main(int argc, char** argv) {
  testing::InitGoogleTest(&argc, argv);
  for (int k = 1; k < argc; ++k) {
    const std::string a = argv[k];
    if (a.rfind("--cli=", 0) == 0) vrp::g_cli = a.substr(6);
  }
  return RUN_ALL_TESTS();
}
