#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "responsekit/io.hpp"

using responsekit::io::json;
namespace cli = responsekit::cli;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("responsekit-cli-" +
                                        std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }

  fs::path write_config(const std::string& name, const json& j) const {
    const fs::path file = dir_ / name;
    std::ofstream(file) << j.dump(2);
    return file;
  }

  Outcome run(std::vector<std::string> args) const {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
  }

  Outcome run_config(const std::string& command, const json& config, const std::string& out_name,
                 std::vector<std::string> extra = {}) const {
    const fs::path file = write_config(out_name + ".json", config);
    std::vector<std::string> args{command, "--config", file.string(), "--out", (dir_ / out_name).string()};
    args.insert(args.end(), extra.begin(), extra.end());
    return run(args);
  }

  std::string slurp(const fs::path& relative) const {
    std::ifstream in(dir_ / relative);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }

  fs::path dir_;
};

json two_segment_path() {
  return json{{"times", {0, 1, 2}}, {"values", {{0, 0}, {1, 0}, {1, 1}}}};
}

json ou_config() {
  return json{{"srnn", {{"gamma", {{1.0}}}, {"sigma", {{0.5}}}, {"init", {{"kind", "stationary"}}}}},
              {"s", 0.25},
              {"lags", {0.25, 0.5, 1.0}},
              {"dt", 0.01},
              {"samples", 2000},
              {"T", 1.0}};
}

std::vector<std::vector<double>> parse_csv(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST_F(CliTest, SignatureOfTwoSegmentPath) {
  const Outcome r = run_config("sig", json{{"path", two_segment_path()}, {"level", 2}}, "sig");
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const json j = json::parse(slurp("sig/signature.json"));
  EXPECT_EQ(j["dim"], 2);
  EXPECT_EQ(j["level"], 2);
  EXPECT_DOUBLE_EQ(j["words"]["1,2"].get<double>(), 1.0);
  EXPECT_DOUBLE_EQ(j["words"]["2,1"].get<double>(), 0.0);
  EXPECT_EQ(j["levels"].size(), 3u);
}

TEST_F(CliTest, UnknownCommandReportsJson) {
  const Outcome r = run({"frobnicate"});
  EXPECT_EQ(r.code, cli::kExitError);
  const json e = json::parse(r.err);
  EXPECT_EQ(e["error"]["code"], "unknown_command");
}

TEST_F(CliTest, ConfigErrorsNameTheField) {
  const Outcome r = run_config("simulate", json{{"srnn", {{"gamma", {{1.0}}}}}, {"T", 1.0}, {"dt", 0.1}}, "bad");
  EXPECT_EQ(r.code, cli::kExitError);
  const json e = json::parse(r.err);
  EXPECT_EQ(e["error"]["code"], "config_error");
  EXPECT_EQ(e["error"]["field"], "srnn.sigma");

  const Outcome missing = run({"sig"});
  EXPECT_EQ(missing.code, cli::kExitError);
  EXPECT_EQ(json::parse(missing.err)["error"]["field"], "config");
}

TEST_F(CliTest, InvalidJsonIsAConfigError) {
  const fs::path file = dir_ / "broken.json";
  std::ofstream(file) << "{\"path\": [";
  const Outcome r = run({"sig", "--config", file.string(), "--out", (dir_ / "broken").string()});
  EXPECT_EQ(r.code, cli::kExitError);
  EXPECT_EQ(json::parse(r.err)["error"]["code"], "config_error");
}

TEST_F(CliTest, ConfigRoundTripIsCanonical) {
  const json config{{"level", 2}, {"path", two_segment_path()}, {"seed", 17}};
  ASSERT_EQ(run_config("sig", config, "first").code, cli::kExitOk);
  const std::string canonical = slurp("first/config.json");
  const json parsed = json::parse(canonical);
  EXPECT_EQ(parsed["seed"], 17);
  EXPECT_EQ(parsed["command"], "sig");
  ASSERT_EQ(run_config("sig", parsed, "second").code, cli::kExitOk);
  EXPECT_EQ(slurp("second/config.json"), canonical);
}

TEST_F(CliTest, SimulationIsDeterministic) {
  json config = ou_config();
  config["T"] = 0.5;
  config["samples"] = 100;
  ASSERT_EQ(run_config("simulate", config, "a", {"--seed", "5"}).code, cli::kExitOk);
  ASSERT_EQ(run_config("simulate", config, "b", {"--seed", "5"}).code, cli::kExitOk);
  ASSERT_EQ(run_config("simulate", config, "c", {"--seed", "6"}).code, cli::kExitOk);
  EXPECT_EQ(slurp("a/trajectory.csv"), slurp("b/trajectory.csv"));
  EXPECT_EQ(slurp("a/output_functional.json"), slurp("b/output_functional.json"));
  EXPECT_NE(slurp("a/trajectory.csv"), slurp("c/trajectory.csv"));
  EXPECT_EQ(parse_csv(slurp("a/trajectory.csv")).size(), 51u);
}

TEST_F(CliTest, RespondMatchesAnalyticOu) {
  const Outcome r = run_config("respond", ou_config(), "respond");
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const auto rows = parse_csv(slurp("respond/impulse.csv"));
  ASSERT_EQ(rows.size(), 3u);
  for (const auto& row : rows) {
    EXPECT_NEAR(row[7], std::exp(-row[0]), 1e-12);
    EXPECT_NEAR(row[2], row[7], 3.0 * row[3] + 5e-3);
  }
  const auto fdt = parse_csv(slurp("respond/fdt.csv"));
  ASSERT_EQ(fdt.size(), 3u);
  for (const auto& row : fdt) EXPECT_NEAR(row[1], row[2], 3.0 * std::hypot(row[3], row[4]) + 0.01);
}

TEST_F(CliTest, KernelGram) {
  json paths = json::array();
  for (int i = 0; i < 4; ++i)
    paths.push_back(json{{"times", {0.0, 0.5, 1.0}}, {"values", {{0.0}, {0.3 * i}, {-0.1 * i}}}});
  const Outcome r = run_config("kernel", json{{"paths", paths}}, "kernel");
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const auto rows = parse_csv("header\n" + slurp("kernel/gram.csv"));
  ASSERT_EQ(rows.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    ASSERT_EQ(rows[i].size(), 4u);
    EXPECT_DOUBLE_EQ(rows[0][i], 1.0);
    for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(rows[i][j], rows[j][i]);
  }
}

TEST_F(CliTest, FitThenPredict) {
  json paths = json::array();
  json targets = json::array();
  for (int i = 0; i < 6; ++i) {
    paths.push_back(json{{"times", {0.0, 1.0}}, {"values", {{0.0}, {0.2 * i}}}});
    targets.push_back(0.2 * i);
  }
  const Outcome f = run_config("fit", json{{"lambda", 1e-8}, {"data", {{"paths", paths}, {"targets", targets}}}}, "fit");
  ASSERT_EQ(f.code, cli::kExitOk) << f.err;
  const json summary = json::parse(slurp("fit/fit.json"));
  EXPECT_LT(summary["train_rmse"].get<double>(), 1e-6);

  const Outcome p = run_config("predict",
                           json{{"model", (dir_ / "fit/model.json").string()}, {"paths", json::array({paths[3]})}},
                           "predict");
  ASSERT_EQ(p.code, cli::kExitOk) << p.err;
  std::istringstream csv(slurp("predict/predictions.csv"));
  std::string header, row;
  std::getline(csv, header);
  std::getline(csv, row);
  EXPECT_EQ(header, "name,prediction");
  EXPECT_NEAR(std::stod(row.substr(row.find(',') + 1)), 0.6, 1e-6);
}

TEST_F(CliTest, VolterraCompose) {
  const json exp_kernel{{"exponential", {{"rate", 1.0}, {"t_end", 1.0}, {"segments", 10}}}};
  const json config{{"mode", "compose"}, {"kernels", exp_kernel}, {"inner", exp_kernel},
                    {"gamma", {{"times", {0.0, 1.0}}, {"values", {{1.0}, {1.0}}}}}};
  const Outcome r = run_config("volterra", config, "volterra");
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const json composed = json::parse(slurp("volterra/composed.json"));
  EXPECT_EQ(composed["orders"], 2);
  EXPECT_EQ(parse_csv(slurp("volterra/series.csv")).size(), 11u);

  const Outcome bad = run_config("volterra", json{{"mode", "invert"}, {"kernels", exp_kernel}}, "bad");
  EXPECT_EQ(bad.code, cli::kExitError);
  EXPECT_EQ(json::parse(bad.err)["error"]["field"], "mode");
}

TEST_F(CliTest, ReproIsDeterministic) {
  const json config{{"criteria", {1, 2, 10}}};
  const Outcome a = run_config("repro", config, "repro-a", {"--seed", "99"});
  const Outcome b = run_config("repro", config, "repro-b", {"--seed", "99"});
  ASSERT_EQ(a.code, cli::kExitOk) << a.out;
  ASSERT_EQ(b.code, cli::kExitOk) << b.out;
  const json ja = json::parse(slurp("repro-a/repro.json"));
  const json jb = json::parse(slurp("repro-b/repro.json"));
  ASSERT_EQ(ja["criteria"].size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(ja["criteria"][i]["detail"], jb["criteria"][i]["detail"]);
    EXPECT_TRUE(ja["criteria"][i]["passed"].get<bool>());
  }
  EXPECT_NE(slurp("repro-a/repro.txt").find("3/3"), std::string::npos);
}
