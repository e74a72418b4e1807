#include "xlr/sandbox/profile.hpp"

#include <regex>

namespace xlr::sandbox {

namespace {
constexpr std::pair<Category, std::string_view> kNames[] = {
    {Category::kPass, "pass"},           {Category::kWrongOutput, "wrong_output"},
    {Category::kCrash, "crash"},         {Category::kException, "exception"},
    {Category::kTimeout, "timeout"},     {Category::kCompileError, "compile_error"},
};

std::vector<std::string> string_list(const nlohmann::json& j, const std::string& where,
                                     std::vector<std::string>& diagnostics) {
  if (!j.is_array()) {
    diagnostics.push_back(where + ": expected an array of strings");
    return {};
  }
  std::vector<std::string> out;
  for (const auto& item : j) {
    if (!item.is_string()) {
      diagnostics.push_back(where + ": expected an array of strings");
      return {};
    }
    out.push_back(item.get<std::string>());
  }
  return out;
}
}  // namespace

std::string_view to_string(Category c) {
  for (const auto& [cat, name] : kNames) {
    if (cat == c) return name;
  }
  return "unknown";
}

std::optional<Category> category_from_string(std::string_view s) {
  for (const auto& [cat, name] : kNames) {
    if (name == s) return cat;
  }
  return std::nullopt;
}

std::vector<std::string> check(const ToolchainProfile& p) {
  std::vector<std::string> out;
  if (p.run_cmd.empty()) out.emplace_back("run_cmd: must be non-empty");
  if (p.source_ext.empty()) out.emplace_back("source_ext: must be non-empty");
  if (p.compile_timeout_s <= 0) out.emplace_back("compile_timeout: must be > 0");
  if (p.run_timeout_s <= 0) out.emplace_back("run_timeout: must be > 0");
  if (p.coverage && (p.coverage->compile_cmd.empty() || p.coverage->report_cmd.empty())) {
    out.emplace_back("coverage: compile_cmd and report_cmd must be non-empty");
  }
  for (const auto& pattern : p.hints.exception_stderr_patterns) {
    try {
      std::regex re(pattern);
    } catch (const std::regex_error&) {
      out.push_back("classifier.exception_stderr: invalid regex '" + pattern + "'");
    }
  }
  return out;
}

ToolchainProfile profile_from_json(const std::string& name, const nlohmann::json& j,
                                   const std::string& where, std::vector<std::string>& diagnostics) {
  ToolchainProfile p;
  p.lang = LanguageId(name);
  if (!j.is_object()) {
    diagnostics.push_back(where + ": expected an object");
    return p;
  }
  if (j.contains("source_ext") && j["source_ext"].is_string()) p.source_ext = j["source_ext"];
  if (j.contains("compile_cmd")) p.compile_cmd = string_list(j["compile_cmd"], where + ".compile_cmd", diagnostics);
  if (j.contains("syntax_cmd")) p.syntax_cmd = string_list(j["syntax_cmd"], where + ".syntax_cmd", diagnostics);
  if (j.contains("run_cmd")) {
    p.run_cmd = string_list(j["run_cmd"], where + ".run_cmd", diagnostics);
  }
  auto number = [&](const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number()) {
      diagnostics.push_back(where + "." + key + ": expected a number");
      return fallback;
    }
    return j[key].get<double>();
  };
  p.compile_timeout_s = number("compile_timeout", p.compile_timeout_s);
  p.run_timeout_s = number("run_timeout", p.run_timeout_s);
  p.memory_limit_bytes = static_cast<std::uint64_t>(
      number("memory_limit_mb", static_cast<double>(p.memory_limit_bytes >> 20))) << 20;
  if (j.contains("classifier")) {
    const auto& c = j["classifier"];
    if (c.contains("exception_stderr")) {
      p.hints.exception_stderr_patterns =
          string_list(c["exception_stderr"], where + ".classifier.exception_stderr", diagnostics);
    }
    if (c.contains("exception_exit_codes")) {
      for (const auto& code : c["exception_exit_codes"]) {
        if (code.is_number_integer()) p.hints.exception_exit_codes.push_back(code.get<int>());
        else diagnostics.push_back(where + ".classifier.exception_exit_codes: expected integers");
      }
    }
  }
  if (j.contains("coverage")) {
    const auto& c = j["coverage"];
    CoverageProfile cov;
    if (c.contains("compile_cmd")) cov.compile_cmd = string_list(c["compile_cmd"], where + ".coverage.compile_cmd", diagnostics);
    if (c.contains("report_cmd")) cov.report_cmd = string_list(c["report_cmd"], where + ".coverage.report_cmd", diagnostics);
    p.coverage = std::move(cov);
  }
  for (const auto& d : check(p)) diagnostics.push_back(where + "." + d);
  return p;
}

std::vector<std::string> substitute(const std::vector<std::string>& tmpl,
                                    const std::map<std::string, std::string>& values) {
  std::vector<std::string> out;
  out.reserve(tmpl.size());
  for (std::string arg : tmpl) {
    for (const auto& [key, value] : values) {
      const std::string token = "{" + key + "}";
      std::size_t pos = 0;
      while ((pos = arg.find(token, pos)) != std::string::npos) {
        arg.replace(pos, token.size(), value);
        pos += value.size();
      }
    }
    out.push_back(std::move(arg));
  }
  return out;
}

}  // namespace xlr::sandbox
