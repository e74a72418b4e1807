#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "xlr/corpus/types.hpp"

namespace xlr::sandbox {

enum class Category { kPass, kWrongOutput, kCrash, kException, kTimeout, kCompileError };

std::string_view to_string(Category c);
std::optional<Category> category_from_string(std::string_view s);

// How a toolchain reports a runtime error, as opposed to simply dying.
struct ClassifierHints {
  std::vector<std::string> exception_stderr_patterns;  // ECMAScript regexes
  std::vector<int> exception_exit_codes;
};

struct CoverageProfile {
  std::vector<std::string> compile_cmd;  // instrumented build
  std::vector<std::string> report_cmd;   // gcov-style summary on stdout
};

// Command templates are argv vectors; {src}, {bin}, {input} and {dir} are
// replaced by absolute paths of the source file, the built binary, a file
// holding the stdin text, and the working directory.
struct ToolchainProfile {
  LanguageId lang;
  std::string source_ext;                 // ".cpp", ".rs", ...
  std::vector<std::string> compile_cmd;   // empty: interpreted
  std::vector<std::string> syntax_cmd;    // parse-only check for interpreted languages
  std::vector<std::string> run_cmd;
  double compile_timeout_s = 60.0;
  double run_timeout_s = 10.0;
  std::uint64_t memory_limit_bytes = 512ull << 20;
  ClassifierHints hints;
  std::optional<CoverageProfile> coverage;

  bool compiled() const { return !compile_cmd.empty(); }
};

// Field-level problems ("run_cmd: must be non-empty"); empty when valid.
std::vector<std::string> check(const ToolchainProfile& profile);

// Parses one `toolchains.<name>` config object. Appends diagnostics prefixed
// with `where` instead of throwing.
ToolchainProfile profile_from_json(const std::string& name, const nlohmann::json& j,
                                   const std::string& where, std::vector<std::string>& diagnostics);

std::vector<std::string> substitute(const std::vector<std::string>& tmpl,
                                    const std::map<std::string, std::string>& values);

}  // namespace xlr::sandbox
