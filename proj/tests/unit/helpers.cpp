#include "helpers.hpp"

#include <unistd.h>

namespace xlr::testing {

std::map<LanguageId, sandbox::ToolchainProfile> host_profiles(double run_timeout_s) {
  const nlohmann::json doc = {
      {"cpp",
       {{"source_ext", ".cpp"},
        {"compile_cmd", {"g++", "-std=c++17", "-O2", "-o", "{bin}", "{src}"}},
        {"run_cmd", {"{bin}"}},
        {"run_timeout", run_timeout_s},
        {"classifier", {{"exception_stderr", {"terminate called after throwing"}}}},
        {"coverage",
         {{"compile_cmd", {"g++", "-std=c++17", "-O0", "--coverage", "-fno-exceptions", "-o", "{bin}", "{src}"}},
          {"report_cmd", {"gcov", "-b", "-c", "-n", "main.cpp"}}}}}},
      {"python",
       {{"source_ext", ".py"},
        {"syntax_cmd", {"python3", "-m", "py_compile", "{src}"}},
        {"run_cmd", {"python3", "{src}"}},
        {"run_timeout", run_timeout_s},
        {"classifier", {{"exception_stderr", {"Traceback \\(most recent call last\\)"}}}}}},
      {"rust",
       {{"source_ext", ".rs"},
        {"compile_cmd", {"rustc", "--edition", "2021", "-o", "{bin}", "{src}"}},
        {"run_cmd", {"{bin}"}},
        {"run_timeout", run_timeout_s},
        {"classifier", {{"exception_stderr", {"panicked at"}}, {"exception_exit_codes", {101}}}}}},
  };
  std::map<LanguageId, sandbox::ToolchainProfile> out;
  std::vector<std::string> diags;
  for (const auto& [name, j] : doc.items()) {
    out.emplace(LanguageId(name), sandbox::profile_from_json(name, j, name, diags));
  }
  if (!diags.empty()) throw std::runtime_error("bad test profiles: " + diags.front());
  return out;
}

std::filesystem::path scratch_root() {
  return std::filesystem::temp_directory_path() / ("xlr-test-" + std::to_string(::getpid()));
}

}  // namespace xlr::testing
