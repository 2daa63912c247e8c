#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fosr/cli.hpp"
#include "fosr/csv_io.hpp"
#include "fosr/errors.hpp"

using namespace fosr;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& sub) const { return (path / sub).string(); }
};

void check_same_tree(const fs::path& a, const fs::path& b) {
  for (const auto& entry : fs::recursive_directory_iterator(a)) {
    if (!entry.is_regular_file() || entry.path().filename() == "timings.json") continue;
    const auto rel = fs::relative(entry.path(), a);
    CAPTURE(rel.string());
    REQUIRE(fs::exists(b / rel));
    CHECK(slurp(entry.path()) == slurp(b / rel));
  }
}

}  // namespace

TEST_CASE("simulate writes the dataset and is reproducible") {
  TempDir tmp("fosr_cli_sim");
  auto r = run({"simulate", "--design", "1", "--n", "30", "--seed", "7", "--out", tmp / "a"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("Y.csv") != std::string::npos);
  const CsvTable y = read_csv(tmp.path / "a" / "Y.csv");
  CHECK(y.values.rows() == 30);
  CHECK(y.values.cols() == 15);
  CHECK(read_csv(tmp.path / "a" / "X.csv").values.cols() == 15);
  CHECK(read_csv(tmp.path / "a" / "W.csv").values.cols() == 4);
  REQUIRE(run({"simulate", "--design", "1", "--n", "30", "--seed", "7", "--out", tmp / "b"}).code == 0);
  check_same_tree(tmp.path / "a", tmp.path / "b");
}

TEST_CASE("invalid design is an error") {
  TempDir tmp("fosr_cli_bad");
  const auto r = run({"simulate", "--design", "5", "--out", tmp / "x"});
  CHECK(r.code != 0);
  CHECK(r.err.find("design") != std::string::npos);
}

TEST_CASE("help and unknown subcommands") {
  CHECK(run({"--help"}).code == 0);
  CHECK(run({"fit", "--help"}).code == 0);
  CHECK(run({"frobnicate"}).code != 0);
  CHECK(run({}).code != 0);
}

TEST_CASE("fit writes variant-specific outputs") {
  TempDir tmp("fosr_cli_fit");
  REQUIRE(run({"simulate", "--design", "1", "--n", "30", "--seed", "3", "--out", tmp / "data"}).code == 0);

  auto r = run({"fit", "--data", tmp / "data", "--variant", "fosr-dp", "--iters", "5000", "--burnin",
                "2500", "--seed", "1", "--truth", tmp / "data", "--out", tmp / "dp"});
  REQUIRE(r.code == 0);
  CHECK(read_csv(tmp.path / "dp" / "tau.csv").values.rows() == 2500);
  CHECK(read_csv(tmp.path / "dp" / "labels.csv").values.rows() == 2500);
  CHECK(fs::exists(tmp.path / "dp" / "coclustering.csv"));
  CHECK(fs::exists(tmp.path / "dp" / "dendrogram.csv"));
  CHECK(fs::exists(tmp.path / "dp" / "curve_summary.csv"));
  CHECK(fs::exists(tmp.path / "dp" / "evaluation.json"));
  CHECK_FALSE(fs::exists(tmp.path / "dp" / "percent_zero.csv"));

  r = run({"fit", "--data", tmp / "data", "--variant", "fosr", "--iters", "300", "--burnin", "100",
           "--out", tmp / "plain"});
  REQUIRE(r.code == 0);
  CHECK_FALSE(fs::exists(tmp.path / "plain" / "labels.csv"));
  CHECK_FALSE(fs::exists(tmp.path / "plain" / "percent_zero.csv"));
  CHECK_FALSE(fs::exists(tmp.path / "plain" / "coclustering.csv"));

  r = run({"fit", "--data", tmp / "data", "--variant", "fosr-dppm", "--iters", "300", "--burnin", "100",
           "--out", tmp / "dppm"});
  REQUIRE(r.code == 0);
  CHECK(slurp(tmp.path / "dppm" / "percent_zero.csv").find("x15") != std::string::npos);

  // fewer than 40 stored draws: summaries are skipped with a note
  r = run({"fit", "--data", tmp / "data", "--iters", "30", "--burnin", "10", "--out", tmp / "short"});
  REQUIRE(r.code == 0);
  CHECK(r.err.find("curve_summary") != std::string::npos);
}

TEST_CASE("fit reports missing inputs and bad schemas") {
  TempDir tmp("fosr_cli_missing");
  REQUIRE(run({"simulate", "--n", "10", "--out", tmp / "data"}).code == 0);
  fs::remove(tmp.path / "data" / "X.csv");
  auto r = run({"fit", "--data", tmp / "data", "--iters", "20", "--burnin", "10", "--out", tmp / "o"});
  CHECK(r.code != 0);
  CHECK(r.err.find((tmp.path / "data" / "X.csv").string()) != std::string::npos);

  std::ofstream(tmp.path / "data" / "X.csv") << "x1,x2\n1,2\n3\n";
  r = run({"fit", "--data", tmp / "data", "--iters", "20", "--burnin", "10", "--out", tmp / "o"});
  CHECK(r.code != 0);
  CHECK(r.err.find("row") != std::string::npos);

  r = run({"fit", "--data", tmp / "data", "--variant", "nope", "--out", tmp / "o"});
  CHECK(r.code != 0);
}

TEST_CASE("config file supplies flags and explicit flags win") {
  TempDir tmp("fosr_cli_config");
  std::ofstream(tmp.path / "sim.json") << R"({"design": 2, "n": 12, "seed": 4, "T": 9})";
  auto r = run({"simulate", "--config", tmp / "sim.json", "--n", "14", "--out", tmp / "data"});
  REQUIRE(r.code == 0);
  const CsvTable y = read_csv(tmp.path / "data" / "Y.csv");
  CHECK(y.values.rows() == 14);
  CHECK(y.values.cols() == 9);
  std::ofstream(tmp.path / "bad.json") << "{not json";
  CHECK(run({"simulate", "--config", tmp / "bad.json", "--out", tmp / "x"}).code != 0);
}

TEST_CASE("study tables have the documented shape and ignore the worker count") {
  TempDir tmp("fosr_cli_study");
  const std::vector<std::string> base{"study", "--designs", "1", "--ns", "30", "--variants", "fosr,fosr-dp",
                                      "--replicates", "3", "--iters", "120", "--burnin", "60", "--seed", "5"};
  auto args = base;
  args.insert(args.end(), {"--workers", "1", "--out", tmp / "w1"});
  REQUIRE(run(args).code == 0);
  args = base;
  args.insert(args.end(), {"--workers", "3", "--out", tmp / "w3"});
  REQUIRE(run(args).code == 0);
  check_same_tree(tmp.path / "w1", tmp.path / "w3");

  std::ifstream table(tmp.path / "w1" / "mse_summary.csv");
  std::string line;
  int rows = 0;
  std::getline(table, line);
  CHECK(line == "design,variant,N30_mean,N30_se,N30_status");
  while (std::getline(table, line)) {
    ++rows;
    CHECK(line.find("complete") != std::string::npos);
  }
  CHECK(rows == 2);
  CHECK(fs::exists(tmp.path / "w1" / "ari_summary.csv"));
  CHECK(fs::exists(tmp.path / "w1" / "replicates.csv"));
}
