#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "xlr/corpus/types.hpp"
#include "xlr/descriptor/descriptor.hpp"
#include "xlr/llm/client.hpp"
#include "xlr/sandbox/sandbox.hpp"
#include "xlr/testgen/testgen.hpp"

namespace xlr::translate {

struct TranslationAttempt {
  std::uint32_t attempt_index = 0;  // j, 1-based
  std::string candidate;            // empty when extraction failed
  std::string status;               // "passed", "extraction_failed", "compile_error", "failed_tests"
  std::vector<sandbox::Category> validation;  // one per suite case, in suite order
  bool passed = false;
  std::string diagnostics;  // compiler output when status is compile_error
};

struct TranslationResult {
  std::optional<std::string> program;  // P_tgt^fixed
  std::uint32_t selected = 0;          // j*, 0 when every attempt failed
  std::vector<TranslationAttempt> attempts;
};

// Checks a candidate against every suite case.
TranslationAttempt validate_candidate(std::uint32_t attempt_index, std::string candidate, const LanguageId& target,
                                      const testgen::TestSuite& suite, sandbox::Sandbox& sandbox);

// Requests attempts j = 1..m one at a time (sample_index = j) from template
// "translate" and stops at the first candidate that passes the whole suite.
TranslationResult translate_fixed(const corpus::SourcePair& pair, const descriptor::DefectDescriptor& desc,
                                  const LanguageId& target, const testgen::TestSuite& suite, llm::Client& client,
                                  sandbox::Sandbox& sandbox, int m, const llm::StageParams& params);

nlohmann::json summary_json(const TranslationAttempt& a);

}  // namespace xlr::translate
