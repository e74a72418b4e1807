#pragma once

#include <filesystem>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <span>
#include <string>
#include <string_view>

#include "xlr/sandbox/process.hpp"
#include "xlr/sandbox/profile.hpp"

namespace xlr::sandbox {

struct SyntaxResult {
  bool ok = false;
  std::string diagnostics;
};

struct ExecutionOutcome {
  Category category = Category::kPass;
  std::string stdout_text;  // normalized
  std::string stderr_text;
  int exit_code = 0;
  double duration_s = 0.0;
};

struct CoverageReport {
  double line_pct = 0.0;
  double branch_pct = 0.0;
  std::size_t lines_total = 0;
  std::size_t branches_total = 0;
};

// Pure classification with precedence timeout > crash > exception >
// (wrong_output | pass). Abnormal termination (signal or nonzero exit) is an
// exception when stderr matches a hint pattern, or the exit code is a hinted
// one, and a crash otherwise. Without `expected`, normal termination is a pass.
Category classify(const ProcessResult& result, const ClassifierHints& hints,
                  const std::optional<std::string>& expected, const std::string& normalized_stdout);

// Extracts the summary block for `source_name` from gcov -b output. Branch
// coverage is read from "Taken at least once" when present, else from
// "Branches executed"; a file with no branches reports 100%. Throws ParseError
// carrying the raw output when the block is missing.
CoverageReport parse_gcov_summary(std::string_view output, std::string_view source_name);

// Syntax checking as a capability, so metrics can be tested against fakes.
class SyntaxChecker {
 public:
  virtual ~SyntaxChecker() = default;
  virtual SyntaxResult syntax_check(std::string_view program, const LanguageId& lang) = 0;
};

struct SandboxOptions {
  std::filesystem::path scratch_root = std::filesystem::temp_directory_path() / "xlr-scratch";
  int workers = 4;  // concurrent child processes
};

// Compiles and runs single-file programs for every registered toolchain.
// Builds are cached by (language, program) content hash; every run gets a
// fresh scratch directory. Safe for concurrent use.
class Sandbox : public SyntaxChecker {
 public:
  Sandbox(std::map<LanguageId, ToolchainProfile> profiles, SandboxOptions options = {});
  ~Sandbox() override;

  bool has_profile(const LanguageId& lang) const;
  const ToolchainProfile& profile(const LanguageId& lang) const;

  SyntaxResult syntax_check(std::string_view program, const LanguageId& lang) override;

  ExecutionOutcome execute(std::string_view program, const LanguageId& lang, std::string_view input,
                           const std::optional<std::string>& expected = std::nullopt);

  // Instrumented build run on every input in turn; counts accumulate.
  CoverageReport measure_coverage(std::string_view program, const LanguageId& lang,
                                  std::span<const std::string> inputs);

 private:
  struct Artifact;
  std::shared_ptr<const Artifact> build(std::string_view program, const LanguageId& lang);
  ProcessResult run_limited(const std::vector<std::string>& argv, const std::filesystem::path& cwd,
                            const std::filesystem::path& io_dir, std::string_view input,
                            const ProcessLimits& limits);

  std::map<LanguageId, ToolchainProfile> profiles_;
  SandboxOptions options_;
  std::counting_semaphore<> slots_;
  std::unique_ptr<ScratchDir> build_root_;
  std::mutex mu_;
  std::map<std::string, std::shared_future<std::shared_ptr<const Artifact>>> builds_;
  std::map<std::string, SyntaxResult> syntax_cache_;
};

// Output normalization applied before every comparison (see text.hpp).
std::string normalize_stdout(std::string_view s);

}  // namespace xlr::sandbox
