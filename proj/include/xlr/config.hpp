#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "xlr/corpus/types.hpp"
#include "xlr/eval/report.hpp"
#include "xlr/llm/request.hpp"
#include "xlr/sandbox/profile.hpp"

namespace xlr {

struct LlmConfig {
  std::string backend = "http";  // "http" or "scripted"
  std::string base_url;
  std::string path = "/v1/chat/completions";
  std::string model;
  std::string api_key_env = "XLR_API_KEY";
  double timeout_s = 120.0;
  std::filesystem::path transcript;  // scripted backend
  int max_in_flight = 4;
  double requests_per_minute = 60.0;
  int max_attempts = 4;
  int initial_backoff_ms = 500;
  std::map<std::string, llm::StageParams> stages;  // descriptor, transferability, testgen, ...

  llm::StageParams stage(const std::string& name) const;
};

struct PipelineConfig {
  LanguageId source_lang{"cpp"};
  std::vector<LanguageId> target_langs;
  double tau = 0.90;
  int m = 5;
  int n = 5;
  int input_batch = 10;
  int input_rounds = 3;
  int trigger_budget = 10;
  int context_radius = 3;
  int workers = 4;
  int sandbox_workers = 4;
};

struct PathsConfig {
  std::filesystem::path input;
  std::filesystem::path templates;
  std::filesystem::path cache;
  std::filesystem::path journals;  // directory; one journal per target language
  std::filesystem::path curriculum;
  std::filesystem::path suites;
  std::filesystem::path scratch;
};

struct Config {
  std::map<LanguageId, sandbox::ToolchainProfile> toolchains;
  LlmConfig llm;
  PipelineConfig pipeline;
  PathsConfig paths;
  std::optional<eval::LinterSpec> linter;
};

extern const std::vector<std::string> kStageNames;

// Parses the config document. Relative paths resolve against `base_dir`.
// Every problem found is collected; throws ConfigError listing all of them.
Config parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir);
Config load_config(const std::filesystem::path& path);

// Diagnostics for a run against `target` (profile present, coverage for the
// source, ...). Empty when runnable.
std::vector<std::string> check_run(const Config& config, const LanguageId& target);

}  // namespace xlr
