#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <nlohmann/json.hpp>
#include <sstream>

#include "cli.hpp"
#include "fixtures.hpp"
#include "grid.hpp"
#include "owbf/errors.hpp"
#include "owbf/image_io.hpp"
#include "owbf/parallel.hpp"

namespace owbf {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result owbf_run(std::vector<std::string> args) {
  args.insert(args.begin(), "owbf");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<json> json_lines(const std::string& text) {
  std::vector<json> rows;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) rows.push_back(json::parse(line));
  }
  return rows;
}

// CSV without quoting, which is all the reports here produce.
std::vector<std::map<std::string, std::string>> csv_rows(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::stringstream ss(s);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    if (!s.empty() && s.back() == ',') cells.push_back("");
    return cells;
  };
  const auto header = split(line);
  std::vector<std::map<std::string, std::string>> rows;
  while (std::getline(in, line)) {
    const auto cells = split(line);
    std::map<std::string, std::string> row;
    for (std::size_t i = 0; i < header.size() && i < cells.size(); ++i) row[header[i]] = cells[i];
    rows.push_back(row);
  }
  return rows;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("owbf_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override {
    fs::remove_all(dir_);
    set_max_threads(0);
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  std::string cameraman() const { return (test::data_dir() / "cameraman.pgm").string(); }
  // 128x128 integer scene written as PGM, plus its noisy PFM.
  void make_scene(double sigma = 20.0) {
    ImageF clean = test::scene(128, 128, 5);
    for (double& v : clean.pixels()) v = std::round(v);
    write_image(clean, path("clean.pgm"));
    ASSERT_EQ(owbf_run({"add-noise", "--in", path("clean.pgm"), "--out", path("noisy.pfm"), "--sigma",
                        std::to_string(sigma), "--seed", "9"})
                  .code,
              0);
  }
  fs::path dir_;
};

TEST(CliGrid, ParsesListsAndRanges) {
  EXPECT_EQ(cli::parse_values("2,3,4"), (std::vector<double>{2, 3, 4}));
  EXPECT_EQ(cli::parse_values("2:6"), (std::vector<double>{2, 3, 4, 5, 6}));
  const auto r = cli::parse_values("10:100:10");
  ASSERT_EQ(r.size(), 10u);
  EXPECT_EQ(r.back(), 100.0);
  EXPECT_EQ(cli::parse_values("1, 5:6"), (std::vector<double>{1, 5, 6}));
  EXPECT_EQ(cli::parse_values("0.5:1.5:0.5"), (std::vector<double>{0.5, 1.0, 1.5}));
  EXPECT_EQ(cli::parse_pair("5,30"), (std::pair<double, double>{5, 30}));
  for (const char* bad : {"", "a", "1,,2", "3:1", "1:2:0", "1:2:3:4", "1e999"}) {
    EXPECT_THROW(cli::parse_values(bad), ParameterError) << bad;
  }
  EXPECT_THROW(cli::parse_pair("5"), ParameterError);
  EXPECT_THROW(cli::parse_pair("5,30,1"), ParameterError);
}

TEST_F(Cli, HelpAndUsageErrors) {
  const Result help = owbf_run({"--help"});
  EXPECT_EQ(help.code, 0);
  for (const char* cmd : {"add-noise", "denoise", "metrics", "sweep", "bench", "--threads", "--format"}) {
    EXPECT_NE(help.out.find(cmd), std::string::npos) << cmd;
  }
  const Result none = owbf_run({});
  EXPECT_EQ(none.code, 2);
  const Result unknown = owbf_run({"denoise", "--in", "x.pgm", "--filter", "nlm"});
  EXPECT_EQ(unknown.code, 2);
  EXPECT_EQ(std::count(unknown.err.begin(), unknown.err.end(), '\n'), 1);
}

TEST_F(Cli, AddNoiseZeroSigmaReportsInf) {
  const Result r = owbf_run({"add-noise", "--in", cameraman(), "--out", path("n.pfm"), "--sigma", "0"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("psnr_db  inf"), std::string::npos) << r.out;
  const Result j =
      owbf_run({"--format", "jsonl", "add-noise", "--in", cameraman(), "--out", path("n.pfm"), "--sigma", "0"});
  EXPECT_EQ(json_lines(j.out).at(0)["psnr_db"], "inf");
  EXPECT_EQ(read_image(path("n.pfm")), read_image(cameraman()));
}

TEST_F(Cli, AddNoiseIsByteIdenticalAcrossRuns) {
  const std::vector<std::string> base = {"add-noise", "--in", cameraman(), "--sigma", "30", "--seed", "7"};
  auto a = base;
  a.insert(a.end(), {"--out", path("a.pfm")});
  auto b = base;
  b.insert(b.end(), {"--out", path("b.pfm"), "--threads", "1"});
  ASSERT_EQ(owbf_run(a).code, 0);
  ASSERT_EQ(owbf_run(b).code, 0);
  EXPECT_EQ(slurp(path("a.pfm")), slurp(path("b.pfm")));
}

TEST_F(Cli, AddNoiseCameramanPsnr) {
  const Result r = owbf_run({"--format", "jsonl", "add-noise", "--in", cameraman(), "--out", path("n.pfm"),
                             "--sigma", "30"});
  ASSERT_EQ(r.code, 0) << r.err;
  const double db = json_lines(r.out).at(0)["psnr_db"];
  EXPECT_GE(db, 18.4);
  EXPECT_LE(db, 18.8);
}

TEST_F(Cli, DenoiseDiagnostics) {
  make_scene();
  const Result r = owbf_run({"denoise", "--in", path("noisy.pfm"), "--out", path("d.pfm"), "--sigma", "20",
                             "--sigma-s", "2", "--sigma-r", "30", "--clean", path("clean.pgm")});
  ASSERT_EQ(r.code, 0) << r.err;
  const json d = json_lines(r.out).at(0);
  for (const char* key : {"N", "T", "theta", "sure_sbf", "sure_rbf", "sure_wbf", "psnr_db", "timings"}) {
    EXPECT_TRUE(d.contains(key)) << key;
  }
  EXPECT_EQ(d["theta"].size(), 2u);
  EXPECT_LE(d["sure_wbf"].get<double>(), std::min(d["sure_sbf"].get<double>(), d["sure_rbf"].get<double>()) + 1e-9);
  EXPECT_TRUE(fs::exists(path("d.pfm")));

  // Without a clean image the PSNR field is absent, not zero.
  const Result bare = owbf_run({"denoise", "--in", path("noisy.pfm"), "--sigma", "20"});
  ASSERT_EQ(bare.code, 0) << bare.err;
  EXPECT_FALSE(json_lines(bare.out).at(0).contains("psnr_db"));
}

TEST_F(Cli, DenoiseFastAgreesWithDirect) {
  make_scene();
  for (const char* filter : {"sbf", "rbf", "wbf"}) {
    const Result r = owbf_run({"denoise", "--in", path("noisy.pfm"), "--filter", filter, "--sigma", "20",
                               "--sigma-s", "3", "--sigma-r", "30", "--compare-direct"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_LT(json_lines(r.out).at(0)["max_diff_direct"].get<double>(), 0.1) << filter;
  }
}

TEST_F(Cli, DenoiseConstantImage) {
  write_image(ImageF(40, 30, 117.0), path("flat.pgm"));
  for (const char* filter : {"sbf", "rbf", "wbf"}) {
    for (const char* impl : {"fast", "direct"}) {
      const std::string out = path(std::string(filter) + impl + ".pgm");
      const Result r = owbf_run({"denoise", "--in", path("flat.pgm"), "--out", out, "--filter", filter, "--impl",
                                 impl, "--sigma", "10", "--fd-oracle"});
      ASSERT_EQ(r.code, 0) << r.err;
      EXPECT_EQ(slurp(out), slurp(path("flat.pgm"))) << filter << " " << impl;
    }
  }
}

TEST_F(Cli, DirectWbfRequiresFdOracle) {
  make_scene();
  const Result r = owbf_run({"denoise", "--in", path("noisy.pfm"), "--impl", "direct", "--sigma", "20"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("--fd-oracle"), std::string::npos);
  EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);
  const Result ok = owbf_run({"denoise", "--in", path("noisy.pfm"), "--impl", "direct", "--sigma", "20",
                              "--fd-oracle", "--sigma-s", "1.5"});
  EXPECT_EQ(ok.code, 0) << ok.err;
}

TEST_F(Cli, ErrorsAreOneLine) {
  make_scene();
  const std::vector<std::vector<std::string>> cases = {
      {"denoise", "--in", path("missing.pgm"), "--sigma", "20"},
      {"denoise", "--in", path("noisy.pfm"), "--filter", "sbf", "--sigma-s", "-1"},
      {"denoise", "--in", path("noisy.pfm"), "--sigma", "20", "--out", path("x.png")},
      {"denoise", "--in", path("noisy.pfm"), "--filter", "sbf", "--sigma-r", "0.5"},
      {"metrics", path("noisy.pfm"), cameraman()},
      {"sweep", "--in", path("noisy.pfm"), "--sigma", "20", "--sigma-s", "3:1"},
      {"--threads", "-2", "metrics", path("noisy.pfm"), path("noisy.pfm")},
  };
  for (const auto& args : cases) {
    const Result r = owbf_run(args);
    EXPECT_EQ(r.code, 1) << args[1] << " " << r.err;
    EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1) << r.err;
    EXPECT_EQ(r.err.rfind("owbf: error: ", 0), 0u) << r.err;
  }
}

TEST_F(Cli, MetricsCommand) {
  write_image(ImageF(8, 8, 30.0), path("a.pgm"));
  write_image(ImageF(8, 8, 0.0), path("b.pgm"));
  const Result r = owbf_run({"--format", "jsonl", "metrics", path("a.pgm"), path("b.pgm")});
  ASSERT_EQ(r.code, 0) << r.err;
  const json m = json_lines(r.out).at(0);
  EXPECT_EQ(m["mse"].get<double>(), 900.0);
  EXPECT_NEAR(m["psnr_db"].get<double>(), 18.588, 1e-3);
}

TEST_F(Cli, SweepSinglePointMatchesDenoise) {
  make_scene();
  const Result s = owbf_run({"sweep", "--in", path("noisy.pfm"), "--clean", path("clean.pgm"), "--sigma", "20",
                             "--sigma-s", "3", "--sigma-r", "30", "--filters", "wbf"});
  ASSERT_EQ(s.code, 0) << s.err;
  const auto rows = csv_rows(s.out);
  ASSERT_EQ(rows.size(), 1u);
  const Result d = owbf_run({"denoise", "--in", path("noisy.pfm"), "--clean", path("clean.pgm"), "--sigma", "20",
                             "--sigma-s", "3", "--sigma-r", "30"});
  const json j = json_lines(d.out).at(0);
  EXPECT_EQ(std::stod(rows[0].at("psnr_db")), j["psnr_db"].get<double>());
  EXPECT_EQ(std::stod(rows[0].at("sure")), j["sure_wbf"].get<double>());
  EXPECT_EQ(std::stod(rows[0].at("theta1")), j["theta"][0].get<double>());
  EXPECT_EQ(std::stoi(rows[0].at("N")), j["N"].get<int>());
  EXPECT_EQ(rows[0].at("best_psnr"), "true");
  EXPECT_EQ(rows[0].at("best_sure"), "true");
}

TEST_F(Cli, SweepFlagsOneBestRowPerFilter) {
  make_scene(25.0);
  const Result s = owbf_run({"sweep", "--in", path("noisy.pfm"), "--clean", path("clean.pgm"), "--sigma", "25",
                             "--sigma-s", "2:4", "--sigma-r", "20:60:20"});
  ASSERT_EQ(s.code, 0) << s.err;
  const auto rows = csv_rows(s.out);
  ASSERT_EQ(rows.size(), 27u);
  for (const char* filter : {"sbf", "rbf", "wbf"}) {
    int best_psnr = 0;
    int best_sure = 0;
    double top = -1e9;
    double psnr_of_best = 0.0;
    double psnr_of_best_sure = 0.0;
    for (const auto& row : rows) {
      if (row.at("filter") != filter) continue;
      const double db = std::stod(row.at("psnr_db"));
      top = std::max(top, db);
      if (row.at("best_psnr") == "true") {
        ++best_psnr;
        psnr_of_best = db;
      }
      if (row.at("best_sure") == "true") {
        ++best_sure;
        psnr_of_best_sure = db;
      }
    }
    EXPECT_EQ(best_psnr, 1);
    EXPECT_EQ(best_sure, 1);
    EXPECT_EQ(psnr_of_best, top);
    if (std::string(filter) == "wbf") EXPECT_LE(psnr_of_best - psnr_of_best_sure, 0.2);
  }
}

TEST_F(Cli, SweepWithoutCleanHasNoPsnrColumns) {
  make_scene();
  const Result s = owbf_run({"sweep", "--in", path("noisy.pfm"), "--sigma", "20", "--sigma-s", "2",
                             "--sigma-r", "30"});
  ASSERT_EQ(s.code, 0) << s.err;
  EXPECT_EQ(s.out.find("psnr"), std::string::npos);
}

TEST_F(Cli, BenchReportsMeanAndMin) {
  make_scene();
  const Result b = owbf_run({"--format", "csv", "bench", "--in", path("clean.pgm"), "--params", "2,15",
                             "--params", "1.5,30", "--repeats", "3"});
  ASSERT_EQ(b.code, 0) << b.err;
  const auto rows = csv_rows(b.out);
  ASSERT_EQ(rows.size(), 2u);
  for (const auto& row : rows) {
    for (const char* key : {"fast_wbf_ms.mean", "fast_wbf_ms.min", "direct_wbf_ms.mean", "direct_wbf_ms.min",
                            "direct_estimates_ms.mean", "speedup", "max_diff_estimates"}) {
      EXPECT_TRUE(row.count(key)) << key;
    }
    EXPECT_LE(std::stod(row.at("fast_wbf_ms.min")), std::stod(row.at("fast_wbf_ms.mean")));
    EXPECT_LT(std::stod(row.at("max_diff_estimates")), 0.1);
    EXPECT_EQ(row.at("repeats"), "3");
  }
}

TEST_F(Cli, OutputsIdenticalForAnyThreadCount) {
  make_scene();
  for (const char* t : {"1", "2", "4"}) {
    const Result r = owbf_run({"--threads", t, "denoise", "--in", path("noisy.pfm"), "--out",
                               path(std::string("d") + t + ".pfm"), "--sigma", "20"});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  EXPECT_EQ(slurp(path("d1.pfm")), slurp(path("d2.pfm")));
  EXPECT_EQ(slurp(path("d1.pfm")), slurp(path("d4.pfm")));
}

TEST_F(Cli, ThreadsFallBackToEnvironment) {
  write_image(ImageF(8, 8, 1.0), path("a.pgm"));
  ::setenv("OWBF_THREADS", "3", 1);
  const Result r = owbf_run({"metrics", path("a.pgm"), path("a.pgm")});
  ::unsetenv("OWBF_THREADS");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(max_threads(), 3);
  ASSERT_EQ(owbf_run({"--threads", "2", "metrics", path("a.pgm"), path("a.pgm")}).code, 0);
  EXPECT_EQ(max_threads(), 2);
}

TEST_F(Cli, ReportFileAndFormats) {
  make_scene();
  const Result r = owbf_run({"--format", "csv", "--report", path("r.csv"), "denoise", "--in", path("noisy.pfm"),
                             "--sigma", "20"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  const auto rows = csv_rows(slurp(path("r.csv")));
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].at("filter"), "wbf");
  EXPECT_TRUE(rows[0].count("theta1"));
  EXPECT_TRUE(rows[0].count("timings.total_ms"));
}

}  // namespace
}  // namespace owbf
