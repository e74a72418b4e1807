#pragma once

#include <string>

#include <json.hpp>

#include "xlr/corpus/types.hpp"
#include "xlr/descriptor/diff.hpp"
#include "xlr/error.hpp"
#include "xlr/llm/client.hpp"
#include "xlr/llm/request.hpp"

namespace xlr::descriptor {

struct DefectDescriptor {
  std::string defect_type;  // free text, e.g. "Off-by-one"
  std::string root_cause;   // one sentence
  PatchDiff diff;           // always computed locally

  bool operator==(const DefectDescriptor&) const = default;
};

struct TransferabilityVerdict {
  bool transferable = false;
  std::string rationale;
  LanguageId target_lang;
};

// The model's reply could not be turned into a descriptor within the retry
// budget.
class DescriptorError : public Error {
 public:
  using Error::Error;
};

// Prompts template "descriptor" with {buggy}, {fixed}, {diff} and expects a
// JSON block {"defect_type": ..., "root_cause": ...}. Throws DescriptorError
// when no attempt yields both fields non-empty.
DefectDescriptor build_descriptor(const corpus::SourcePair& pair, llm::Client& client,
                                  const llm::StageParams& params, std::size_t context_radius = 3);

// Prompts template "transferability" and expects {"transferable": bool,
// "rationale": text}. Unparseable after retries: not transferable, rationale
// "verdict unparseable".
TransferabilityVerdict assess_transferability(const DefectDescriptor& desc, const LanguageId& source,
                                              const LanguageId& target, llm::Client& client,
                                              const llm::StageParams& params);

nlohmann::json to_json(const DefectDescriptor& d);
DefectDescriptor descriptor_from_json(const nlohmann::json& j);
nlohmann::json to_json(const TransferabilityVerdict& v);

}  // namespace xlr::descriptor
