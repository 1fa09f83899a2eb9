#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "regpipe/error.hpp"

namespace regpipe::pipeline {

enum class PipelineErrc { ConfigError, MissingInput };
using PipelineError = KindedError<PipelineErrc>;

// `[section]` headers followed by `key = value` lines; `#` comments.
// Keys listed as repeatable may occur several times.
struct ConfigFile {
  std::map<std::string, std::vector<std::pair<std::string, std::string>>> sections;

  std::vector<std::string> values(std::string_view section, std::string_view key) const;
  std::optional<std::string> value(std::string_view section, std::string_view key) const;
};

ConfigFile parse_config_text(std::string_view text);

struct PipelineConfig {
  std::filesystem::path workspace;
  std::string backend;  // empty when no generator is configured

  std::filesystem::path regulation;
  std::optional<std::filesystem::path> metamodel;
  std::optional<std::filesystem::path> instance;
  std::optional<std::filesystem::path> constraints;
  std::filesystem::path vss_catalog;
  std::optional<std::filesystem::path> aliases;
  std::filesystem::path rules;
  std::filesystem::path events;
  std::optional<std::filesystem::path> sim_template;
  std::optional<std::filesystem::path> control_template;

  std::size_t granularity = 1;
  std::size_t depth = 2;
  std::size_t budget = 512;

  std::size_t k = 5;
  std::vector<std::string> queries;
  double w_bm25 = 0.7;
  double w_ref = 0.2;
  double w_num = 0.1;

  std::size_t consensus_n = 5;
  std::size_t min_valid = 1;
  std::string scenario_key = "scenario";
  std::string metamodel_key = "metamodel";
  std::string instance_key = "instance";
  std::string constraints_key = "constraints";

  double threshold = 0.5;
  std::vector<std::string> extra_telemetry;
  std::vector<std::string> extra_actuation;
};

// Relative paths resolve against `base_dir` (the config file's directory).
PipelineConfig load_config(std::string_view text, const std::filesystem::path& base_dir);
PipelineConfig load_config_file(const std::filesystem::path& file);
std::string_view config_reference();

enum class StageStatus { Ok, Failed, Skipped };
std::string_view to_string(StageStatus s);

enum class FailureKind { None, Validation, Input, Generation };

struct StageResult {
  int number = 0;
  std::string name;
  StageStatus status = StageStatus::Skipped;
  FailureKind failure = FailureKind::None;
  std::vector<std::filesystem::path> artifacts;
  std::vector<std::string> diagnostics;
};

inline constexpr std::array<std::string_view, 11> kArtifactNames = {
    "01_regdoc.txt",       "02_chunks.txt",     "03_retrieval.txt",   "04_scenario.txt",
    "05_scenario_report.txt", "06_metamodel.txt", "07_consistency.txt", "08_sim_script.txt",
    "09_mappings.txt",     "10_control_code.txt", "11_trace.txt"};

struct RunReport {
  std::vector<StageResult> stages;
  std::vector<std::string> diagnostics;  // problems found before any stage ran
  int exit_code = 0;
};

// Checks inputs, clears stale artifacts, and runs the stage graph. Input
// problems found before the first stage yield exit code 2 and no stages.
RunReport run_pipeline(const PipelineConfig& config);
std::string format_summary(const RunReport& report);

}  // namespace regpipe::pipeline

namespace regpipe {
template <>
std::string_view error_kind_name(pipeline::PipelineErrc kind) noexcept;
}  // namespace regpipe
