#include <filesystem>
#include <random>

#include "doctest.h"
#include "regpipe/pipeline.hpp"
#include "support.hpp"

using namespace regpipe;
using namespace regpipe::pipeline;
namespace fs = std::filesystem;

namespace {
struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("regpipe_unit_" + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

PipelineConfig fixture_config(const fs::path& workspace) {
  auto cfg = load_config_file(testing::fixtures_dir() / "pipeline.cfg");
  cfg.workspace = workspace;
  return cfg;
}
}  // namespace

TEST_CASE("config loading") {
  auto cfg = load_config_file(testing::fixtures_dir() / "pipeline.cfg");
  CHECK(cfg.regulation == testing::fixtures_dir() / "F1.txt");
  CHECK(cfg.queries.size() == 2);
  CHECK(cfg.k == 3);
  CHECK(cfg.extra_telemetry == std::vector<std::string>{"obstacle distance"});
  CHECK(cfg.backend == "mock:" + (testing::fixtures_dir() / "mock").string());

  CHECK_THROWS_AS(load_config("[inputs]\nbogus = 1\n", "/"), PipelineError);
  CHECK_THROWS_AS(load_config("[chunking]\ndepth = many\n", "/"), PipelineError);
  CHECK_THROWS_AS(load_config_file("/nonexistent/missing.cfg"), PipelineError);
  CHECK_FALSE(config_reference().empty());
}

TEST_CASE("fixture run succeeds") {
  TempDir tmp;
  auto report = run_pipeline(fixture_config(tmp.path));
  CHECK(report.exit_code == 0);
  REQUIRE(report.stages.size() == 11);
  for (const auto& s : report.stages) CHECK(s.status == StageStatus::Ok);
  for (auto name : kArtifactNames) CHECK(fs::exists(tmp.path / std::string(name)));
  auto trace = testing::slurp(tmp.path / "11_trace.txt");
  CHECK(trace == "1;Vehicle.Chassis.Brake.PedalPosition;100\n");
}

TEST_CASE("non-conforming instance gates later stages") {
  TempDir tmp;
  auto cfg = fixture_config(tmp.path);
  cfg.instance = testing::fixtures_dir() / "I1_no_sensors.xml";
  auto report = run_pipeline(cfg);
  CHECK(report.exit_code == 1);
  REQUIRE(report.stages.size() == 11);
  CHECK(report.stages[6].status == StageStatus::Failed);
  for (std::size_t i = 7; i < 11; ++i) CHECK(report.stages[i].status == StageStatus::Skipped);
  CHECK_FALSE(fs::exists(tmp.path / "08_sim_script.txt"));
}

TEST_CASE("missing input stops before any stage") {
  TempDir tmp;
  auto cfg = fixture_config(tmp.path);
  cfg.vss_catalog = tmp.path / "absent.vss";
  auto report = run_pipeline(cfg);
  CHECK(report.exit_code == 2);
  CHECK(report.stages.empty());
  CHECK_FALSE(report.diagnostics.empty());
}

TEST_CASE("generation failure exits 3") {
  TempDir tmp;
  auto cfg = fixture_config(tmp.path);
  cfg.scenario_key = "nothing";
  auto report = run_pipeline(cfg);
  CHECK(report.exit_code == 3);
}
