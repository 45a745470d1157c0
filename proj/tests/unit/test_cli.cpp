#include <gtest/gtest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include "pdfevent/data.hpp"
#include "pdfevent_cli/app.hpp"
#include "pdfevent_cli/config.hpp"

using namespace pdfevent;
namespace fs = std::filesystem;

namespace {

constexpr const char* kConfig = R"({
  "seed": 3,
  "data": {"synth": {"num_series": 8, "length": 256, "mean_event_duration": 40, "mean_gap": 40}},
  "objective": "regression",
  "pdf": {"kind": "gaussian", "sigma": 2, "day_length": 64},
  "model": {"hidden": [4], "kernel_size": 3},
  "train": {"epochs": 2, "batch_size": 2, "learning_rate": 0.01},
  "decode": {"alpha": 4},
  "metric": {"tolerances": [2, 5]},
  "folds": 4,
  "grid": {"sigma": [null, 1, 4]}
})";

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("pdfevent_cli_" + std::string(
        ::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    write("config.json", kConfig);
  }
  void TearDown() override { fs::remove_all(dir_); }

  void write(const std::string& name, const std::string& text) { std::ofstream(dir_ / name) << text; }

  int run(std::vector<std::string> args) {
    out_.str({});
    err_.str({});
    return cli::run(args, out_, err_);
  }

  std::string config() const { return (dir_ / "config.json").string(); }
  fs::path out(const std::string& name) const { return dir_ / name; }

  fs::path dir_;
  std::ostringstream out_;
  std::ostringstream err_;
};

}  // namespace

TEST_F(Cli, SynthWritesSeriesAndEvents) {
  ASSERT_EQ(run({"synth", "--config", config(), "--out", out("a").string()}), 0) << err_.str();
  EXPECT_TRUE(fs::exists(out("a") / "series" / "series_000.csv"));
  EXPECT_TRUE(fs::exists(out("a") / "series" / "series_007.csv"));
  const auto events = data::load_events(out("a") / "events.csv");
  EXPECT_EQ(events.size(), 8u);
  EXPECT_NE(out_.str().find("series 8"), std::string::npos);
}

TEST_F(Cli, SeedOverrideChangesData) {
  ASSERT_EQ(run({"synth", "--config", config(), "--out", out("a").string()}), 0);
  ASSERT_EQ(run({"synth", "--config", config(), "--out", out("b").string(), "--seed", "99"}), 0);
  EXPECT_NE(read_file(out("a") / "series" / "series_000.csv"), read_file(out("b") / "series" / "series_000.csv"));
}

TEST_F(Cli, EncodePrintsGamma) {
  ASSERT_EQ(run({"encode", "--config", config(), "--out", out("e").string()}), 0) << err_.str();
  EXPECT_EQ(out_.str().rfind("gamma ", 0), 0u);
  const auto target = data::load_series(out("e") / "targets" / "series_000.csv");
  EXPECT_EQ(target.channels.size(), 2u);
}

TEST_F(Cli, TrainDecodeEvalPipeline) {
  ASSERT_EQ(run({"train", "--config", config(), "--out", out("t").string()}), 0) << err_.str();
  ASSERT_TRUE(fs::exists(out("t") / "model.ckpt"));
  EXPECT_NE(read_file(out("t") / "trace.csv").find("epoch,loss,val_edap"), std::string::npos);
  ASSERT_EQ(run({"decode", "--config", config(), "--out", out("d").string(), "--checkpoint",
                 (out("t") / "model.ckpt").string()}),
            0)
      << err_.str();
  ASSERT_TRUE(fs::exists(out("d") / "events.csv"));
  ASSERT_EQ(run({"eval", "--config", config(), "--out", out("r").string(), "--predictions",
                 (out("d") / "events.csv").string(), "--prf-tolerance", "5"}),
            0)
      << err_.str();
  const auto report = read_file(out("r") / "report.csv");
  EXPECT_EQ(report.rfind("class,tolerance,ap\n", 0), 0u);
  EXPECT_NE(report.find("\nmean,,"), std::string::npos);
  EXPECT_NE(out_.str().find("edap "), std::string::npos);
  EXPECT_NE(out_.str().find("f1 "), std::string::npos);
}

TEST_F(Cli, CvReportsAreReproducible) {
  ASSERT_EQ(run({"cv", "--config", config(), "--out", out("x").string()}), 0) << err_.str();
  ASSERT_EQ(run({"cv", "--config", config(), "--out", out("y").string(), "--jobs", "2"}), 0) << err_.str();
  EXPECT_EQ(read_file(out("x") / "report.csv"), read_file(out("y") / "report.csv"));
  EXPECT_EQ(read_file(out("x") / "events.csv"), read_file(out("y") / "events.csv"));
  EXPECT_TRUE(fs::exists(out("x") / "folds.csv"));
  EXPECT_TRUE(fs::exists(out("x") / "predictions" / "series_003.csv"));
}

TEST_F(Cli, GridFromSavedPredictions) {
  ASSERT_EQ(run({"cv", "--config", config(), "--out", out("x").string()}), 0) << err_.str();
  ASSERT_EQ(run({"grid", "--config", config(), "--out", out("g").string(), "--predictions",
                 (out("x") / "predictions").string()}),
            0)
      << err_.str();
  const auto table = read_file(out("g") / "grid.csv");
  EXPECT_EQ(std::count(table.begin(), table.end(), '\n'), 4);
  EXPECT_NE(table.find("0.5,none,"), std::string::npos);
  EXPECT_NE(out_.str().find("best mu"), std::string::npos);
}

TEST_F(Cli, OutDirFromEnvironment) {
  ::setenv("PDFEVENT_OUT_DIR", out("env").c_str(), 1);
  const int code = run({"synth", "--config", config()});
  ::unsetenv("PDFEVENT_OUT_DIR");
  ASSERT_EQ(code, 0) << err_.str();
  EXPECT_TRUE(fs::exists(out("env") / "events.csv"));
}

TEST_F(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run({}), 2);
  EXPECT_EQ(run({"synth"}), 2);
  EXPECT_EQ(run({"bogus", "--config", config()}), 2);
  EXPECT_EQ(run({"synth", "--config", (dir_ / "missing.json").string()}), 2);
}

TEST_F(Cli, InvalidConfigExitsTwo) {
  write("bad_key.json", R"({"data": {"synth": {}}, "pdf": {"day_length": 64}, "metric": {"tolerances": [1]},
                           "unknown": 1})");
  EXPECT_EQ(run({"cv", "--config", (dir_ / "bad_key.json").string()}), 2);
  EXPECT_NE(err_.str().find("unknown"), std::string::npos);
  write("bad_json.json", "{ not json");
  EXPECT_EQ(run({"cv", "--config", (dir_ / "bad_json.json").string()}), 2);
  write("bad_pdf.json", R"({"data": {"synth": {}}, "pdf": {"kind": "gaussian", "sigma": 2, "width": 4,
                            "day_length": 64}, "metric": {"tolerances": [1]}})");
  EXPECT_EQ(run({"encode", "--config", (dir_ / "bad_pdf.json").string(), "--out", out("p").string()}), 2);
}

TEST_F(Cli, DataErrorsExitThree) {
  write("missing_series.json", R"({"data": {"series": ["nowhere.csv"], "events": "nowhere_events.csv"}, "pdf": {"day_length": 64},
                                  "metric": {"tolerances": [1]}})");
  EXPECT_EQ(run({"synth", "--config", (dir_ / "missing_series.json").string(), "--out", out("m").string()}), 3);
  EXPECT_EQ(run({"decode", "--config", config(), "--out", out("m").string(), "--checkpoint",
                 (dir_ / "none.ckpt").string()}),
            3);
}

TEST_F(Cli, DivergenceExitsFour) {
  std::string text = kConfig;
  text.replace(text.find("0.01"), 4, "1e200");
  write("diverge.json", text);
  EXPECT_EQ(run({"train", "--config", (dir_ / "diverge.json").string(), "--out", out("v").string()}), 4)
      << err_.str();
}

TEST_F(Cli, BinaryExitStatus) {
  const std::string base = std::string(PDFEVENT_CLI_PATH) + " synth --config ";
  const int ok = std::system((base + config() + " --out " + out("bin").string() + " > /dev/null").c_str());
  ASSERT_TRUE(WIFEXITED(ok));
  EXPECT_EQ(WEXITSTATUS(ok), 0);
  const int bad = std::system((base + (dir_ / "absent.json").string() + " 2> /dev/null").c_str());
  ASSERT_TRUE(WIFEXITED(bad));
  EXPECT_EQ(WEXITSTATUS(bad), 2);
}

TEST(Tolerances, UnitConversion) {
  EXPECT_EQ(cli::tolerances_in_steps({1, 2}, "steps", 5.0), (std::vector<Step>{1, 2}));
  EXPECT_EQ(cli::tolerances_in_steps({60, 120}, "seconds", 5.0), (std::vector<Step>{12, 24}));
  EXPECT_EQ(cli::tolerances_in_steps({1}, "minutes", 5.0), (std::vector<Step>{12}));
  EXPECT_THROW(cli::tolerances_in_steps({1}, "hours", 5.0), Error);
}
