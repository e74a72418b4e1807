#include "xlr/translate/translate.hpp"

#include "xlr/llm/extract.hpp"

namespace xlr::translate {

using sandbox::Category;

TranslationAttempt validate_candidate(std::uint32_t attempt_index, std::string candidate, const LanguageId& target,
                                      const testgen::TestSuite& suite, sandbox::Sandbox& sandbox) {
  TranslationAttempt a;
  a.attempt_index = attempt_index;
  a.candidate = std::move(candidate);
  if (auto syntax = sandbox.syntax_check(a.candidate, target); !syntax.ok) {
    a.status = "compile_error";
    a.diagnostics = syntax.diagnostics.substr(0, 2000);
    a.validation.assign(suite.cases.size(), Category::kCompileError);
    return a;
  }
  bool all = true;
  for (const auto& c : suite.cases) {
    auto outcome = sandbox.execute(a.candidate, target, c.input, c.expected);
    a.validation.push_back(outcome.category);
    all = all && outcome.category == Category::kPass;
  }
  a.passed = all;
  a.status = all ? "passed" : "failed_tests";
  return a;
}

TranslationResult translate_fixed(const corpus::SourcePair& pair, const descriptor::DefectDescriptor& desc,
                                  const LanguageId& target, const testgen::TestSuite& suite, llm::Client& client,
                                  sandbox::Sandbox& sandbox, int m, const llm::StageParams& params) {
  if (suite.cases.empty()) throw PreconditionError("translate_fixed: empty suite");
  if (m < 1) throw PreconditionError("translate_fixed: m must be >= 1");

  llm::CompletionRequest req;
  req.template_id = "translate";
  req.bindings = {{"fixed_src", pair.fixed},
                  {"diff_hunks", descriptor::render_unified(desc.diff)},
                  {"defect_type", desc.defect_type},
                  {"root_cause", desc.root_cause},
                  {"source_lang", pair.lang.name()},
                  {"target_lang", target.name()}};
  req.temperature = params.temperature;
  req.max_tokens = params.max_tokens;

  TranslationResult result;
  for (int j = 1; j <= m; ++j) {
    req.sample_index = static_cast<std::uint32_t>(j);
    const std::string reply = client.complete(req);
    auto code = llm::last_code_block(reply);
    if (!code) {
      TranslationAttempt a;
      a.attempt_index = static_cast<std::uint32_t>(j);
      a.status = "extraction_failed";
      result.attempts.push_back(std::move(a));
      continue;
    }
    auto attempt = validate_candidate(static_cast<std::uint32_t>(j), std::move(*code), target, suite, sandbox);
    const bool passed = attempt.passed;
    result.attempts.push_back(std::move(attempt));
    if (passed) {
      result.selected = static_cast<std::uint32_t>(j);
      result.program = result.attempts.back().candidate;
      break;
    }
  }
  return result;
}

nlohmann::json summary_json(const TranslationAttempt& a) {
  std::size_t passing = 0;
  for (auto c : a.validation) passing += c == Category::kPass;
  nlohmann::json failures = nlohmann::json::object();
  for (auto c : a.validation) {
    if (c != Category::kPass) failures[std::string(to_string(c))] = failures.value(std::string(to_string(c)), 0) + 1;
  }
  return {{"attempt", a.attempt_index},
          {"status", a.status},
          {"cases_passed", passing},
          {"cases_total", a.validation.size()},
          {"failures", std::move(failures)},
          {"diagnostics", a.diagnostics}};
}

}  // namespace xlr::translate
