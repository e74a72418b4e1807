#include "xlr/config.hpp"

#include <algorithm>
#include <fstream>

#include "xlr/error.hpp"

namespace xlr {

const std::vector<std::string> kStageNames = {"descriptor", "transferability", "testgen", "translate",
                                              "behavior",   "trigger_inputs",  "inject"};

llm::StageParams LlmConfig::stage(const std::string& name) const {
  auto it = stages.find(name);
  return it == stages.end() ? llm::StageParams{} : it->second;
}

namespace {

// Field readers that record a diagnostic instead of throwing.
class Reader {
 public:
  Reader(const nlohmann::json& j, std::string where, std::vector<std::string>& diags)
      : j_(j), where_(std::move(where)), diags_(diags) {}

  template <typename T>
  void get(const char* key, T& out, const char* type_name) {
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
      diags_.push_back(where_ + "." + key + ": expected " + type_name);
    }
  }

  void positive(const char* key, int& out) {
    get(key, out, "integer");
    if (j_.contains(key) && out < 1) diags_.push_back(where_ + "." + key + ": must be >= 1");
  }

  void path(const char* key, std::filesystem::path& out, const std::filesystem::path& base) {
    std::string s;
    get(key, s, "string");
    if (!s.empty()) out = std::filesystem::path(s).is_absolute() ? std::filesystem::path(s) : base / s;
  }

 private:
  const nlohmann::json& j_;
  std::string where_;
  std::vector<std::string>& diags_;
};

const nlohmann::json& section(const nlohmann::json& doc, const char* name, std::vector<std::string>& diags) {
  static const nlohmann::json kEmpty = nlohmann::json::object();
  if (!doc.contains(name)) return kEmpty;
  if (!doc[name].is_object()) {
    diags.push_back(std::string(name) + ": expected object");
    return kEmpty;
  }
  return doc[name];
}

}  // namespace

Config parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir) {
  std::vector<std::string> diags;
  Config c;
  if (!doc.is_object()) throw ConfigError({"config: expected a JSON object"});

  const auto& toolchains = section(doc, "toolchains", diags);
  if (toolchains.empty()) diags.push_back("toolchains: at least one profile required");
  for (const auto& [name, j] : toolchains.items()) {
    auto profile = sandbox::profile_from_json(name, j, "toolchains." + name, diags);
    c.toolchains.emplace(LanguageId(name), std::move(profile));
  }

  const auto& llm = section(doc, "llm", diags);
  Reader l(llm, "llm", diags);
  l.get("backend", c.llm.backend, "string");
  if (c.llm.backend != "http" && c.llm.backend != "scripted") {
    diags.push_back("llm.backend: must be \"http\" or \"scripted\"");
  }
  l.get("base_url", c.llm.base_url, "string");
  l.get("path", c.llm.path, "string");
  l.get("model", c.llm.model, "string");
  l.get("api_key_env", c.llm.api_key_env, "string");
  l.get("timeout_s", c.llm.timeout_s, "number");
  l.path("transcript", c.llm.transcript, base_dir);
  l.positive("max_in_flight", c.llm.max_in_flight);
  l.get("requests_per_minute", c.llm.requests_per_minute, "number");
  l.positive("max_attempts", c.llm.max_attempts);
  l.get("initial_backoff_ms", c.llm.initial_backoff_ms, "integer");
  if (llm.contains("stages")) {
    if (!llm["stages"].is_object()) diags.push_back("llm.stages: expected object");
    for (const auto& [name, j] : llm["stages"].items()) {
      const std::string where = "llm.stages." + name;
      if (std::find(kStageNames.begin(), kStageNames.end(), name) == kStageNames.end()) {
        diags.push_back(where + ": unknown stage");
        continue;
      }
      llm::StageParams p;
      Reader s(j, where, diags);
      s.get("temperature", p.temperature, "number");
      s.positive("max_tokens", p.max_tokens);
      s.get("parse_retries", p.parse_retries, "integer");
      if (p.temperature < 0) diags.push_back(where + ".temperature: must be >= 0");
      if (p.parse_retries < 0) diags.push_back(where + ".parse_retries: must be >= 0");
      c.llm.stages[name] = p;
    }
  }

  const auto& pipe = section(doc, "pipeline", diags);
  Reader p(pipe, "pipeline", diags);
  std::string source = c.pipeline.source_lang.name();
  p.get("source_lang", source, "string");
  c.pipeline.source_lang = LanguageId(source);
  std::vector<std::string> targets;
  p.get("target_langs", targets, "list of strings");
  for (auto& t : targets) c.pipeline.target_langs.emplace_back(std::move(t));
  p.get("tau", c.pipeline.tau, "number");
  if (c.pipeline.tau < 0 || c.pipeline.tau > 1) diags.push_back("pipeline.tau: must be within [0, 1]");
  p.positive("m", c.pipeline.m);
  p.positive("n", c.pipeline.n);
  p.positive("input_batch", c.pipeline.input_batch);
  p.positive("input_rounds", c.pipeline.input_rounds);
  p.get("trigger_budget", c.pipeline.trigger_budget, "integer");
  if (c.pipeline.trigger_budget < 0) diags.push_back("pipeline.trigger_budget: must be >= 0");
  p.get("context_radius", c.pipeline.context_radius, "integer");
  if (c.pipeline.context_radius < 0) diags.push_back("pipeline.context_radius: must be >= 0");
  p.positive("workers", c.pipeline.workers);
  p.positive("sandbox_workers", c.pipeline.sandbox_workers);

  if (!c.toolchains.empty() && !c.toolchains.contains(c.pipeline.source_lang)) {
    diags.push_back("pipeline.source_lang: no toolchain profile named \"" + source + "\"");
  }
  for (const auto& t : c.pipeline.target_langs) {
    if (!c.toolchains.contains(t)) diags.push_back("pipeline.target_langs: no toolchain profile named \"" + t.name() + "\"");
  }

  const auto& paths = section(doc, "paths", diags);
  Reader pa(paths, "paths", diags);
  pa.path("input", c.paths.input, base_dir);
  pa.path("templates", c.paths.templates, base_dir);
  pa.path("cache", c.paths.cache, base_dir);
  pa.path("journals", c.paths.journals, base_dir);
  pa.path("curriculum", c.paths.curriculum, base_dir);
  pa.path("suites", c.paths.suites, base_dir);
  pa.path("scratch", c.paths.scratch, base_dir);
  if (c.paths.scratch.empty()) c.paths.scratch = std::filesystem::temp_directory_path() / "xlr-scratch";

  if (doc.contains("eval")) {
    const auto& ev = section(doc, "eval", diags);
    if (ev.contains("linter")) {
      eval::LinterSpec spec;
      Reader li(ev["linter"], "eval.linter", diags);
      li.get("cmd", spec.cmd, "list of strings");
      li.get("file_ext", spec.file_ext, "string");
      li.get("violation_key", spec.violation_key, "string");
      li.get("category_prefix", spec.category_prefix, "string");
      li.get("timeout_s", spec.timeout_s, "number");
      if (spec.cmd.empty()) diags.push_back("eval.linter.cmd: must be non-empty");
      c.linter = std::move(spec);
    }
  }

  for (const auto& key : doc.items()) {
    static const std::vector<std::string> kSections = {"toolchains", "llm", "pipeline", "paths", "eval"};
    if (std::find(kSections.begin(), kSections.end(), key.key()) == kSections.end()) {
      diags.push_back(key.key() + ": unknown section");
    }
  }
  if (!diags.empty()) throw ConfigError(std::move(diags));
  return c;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError({path.string() + ": cannot read config file"});
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError({path.string() + ": " + e.what()});
  }
  return parse_config(doc, std::filesystem::absolute(path).parent_path());
}

std::vector<std::string> check_run(const Config& config, const LanguageId& target) {
  std::vector<std::string> diags;
  const auto& source = config.pipeline.source_lang;
  if (!config.toolchains.contains(target)) {
    diags.push_back("--target-lang: no toolchain profile named \"" + target.name() + "\"");
  }
  if (target == source) diags.push_back("--target-lang: target must differ from pipeline.source_lang");
  if (auto it = config.toolchains.find(source); it != config.toolchains.end() && !it->second.coverage) {
    diags.push_back("toolchains." + source.name() + ".coverage: required for the source language");
  }
  if (config.paths.input.empty()) diags.push_back("paths.input: required");
  if (config.paths.templates.empty()) diags.push_back("paths.templates: required");
  if (config.llm.backend == "scripted" && config.llm.transcript.empty()) {
    diags.push_back("llm.transcript: required by the scripted backend");
  }
  return diags;
}

}  // namespace xlr
