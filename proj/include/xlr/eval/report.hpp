#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "xlr/corpus/types.hpp"
#include "xlr/sandbox/sandbox.hpp"

namespace xlr::eval {

struct TestIO {
  std::string input;
  std::string expected;
};

// One task's generated patches, index 0 being the top-1. Correctness comes
// either from `passed` directly or from running `tests`.
struct PatchSet {
  std::string task_id;
  std::vector<std::string> patches;
  std::vector<bool> passed;  // empty when unknown
  std::vector<TestIO> tests;
  std::optional<std::string> reference;  // developer fix, for BLEU/ROUGE

  int n() const { return static_cast<int>(patches.size()); }
};

// JSONL: {task_id, patches, passed?, tests?: [{input, expected}], reference?}.
std::vector<PatchSet> read_patch_sets(const std::filesystem::path& path);

struct CompilationRates {
  double cr_target = 0;  // percentage
  double cr_source = 0;  // percentage
};

// Over the top-1 patches: cr_target counts patches valid in the target
// language; cr_source counts patches invalid in the target but valid in the
// source language.
CompilationRates compilation_rates(const std::vector<PatchSet>& sets, sandbox::SyntaxChecker& checker,
                                   const LanguageId& target, const LanguageId& source);

// External style checker. `cmd` is an argv template with a {file}
// placeholder; the tool must print JSON. Every object carrying
// `violation_key` whose value starts with `category_prefix` counts once.
struct LinterSpec {
  std::vector<std::string> cmd;
  std::string file_ext = ".rb";
  std::string violation_key = "cop_name";
  std::string category_prefix = "Style/";
  double timeout_s = 60.0;
};

std::size_t count_violations(const nlohmann::json& report, const std::string& key, const std::string& prefix);

// Style violations per thousand non-blank lines over all patches. nullopt when
// the linter is not installed. Throws PreconditionError "no code" for an empty
// list or no non-blank lines, ParseError when the linter output is not JSON.
std::optional<double> svd(const std::vector<std::string>& patches, const LinterSpec& linter,
                          const std::filesystem::path& scratch_root);

struct MetricReport {
  std::size_t tasks = 0;
  std::map<int, double> pass_at;  // k -> percentage, mean over tasks
  std::optional<double> cr_target;
  std::optional<double> cr_source;
  std::optional<double> svd;
  std::optional<double> bleu4;   // mean over tasks with a reference
  std::optional<double> rouge1;
};

struct EvalOptions {
  LanguageId target;
  LanguageId source;
  std::vector<int> ks = {1, 3, 5};
  std::optional<LinterSpec> linter;
  std::filesystem::path scratch_root = std::filesystem::temp_directory_path();
};

// Per-patch correctness: `passed` when given, else all tests pass under the
// target toolchain.
std::vector<bool> correctness(const PatchSet& set, sandbox::Sandbox* sandbox, const LanguageId& target);

// Pass@k is omitted unless every task carries `passed` or `tests`.
// `sandbox` may be null when no task needs running; compilation rates are
// then omitted.
MetricReport evaluate(const std::vector<PatchSet>& sets, sandbox::Sandbox* sandbox, const EvalOptions& options);

nlohmann::json to_json(const MetricReport& r);

// Aligned text table: Model | P@1 | P@3 | P@5 | CR_T | CR_S, then SVD,
// BLEU-4 and ROUGE-1 when present. Absent values print as "-".
std::string render_table(const MetricReport& r, const std::string& label);

}  // namespace xlr::eval
