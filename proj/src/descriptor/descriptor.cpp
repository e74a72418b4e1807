#include "xlr/descriptor/descriptor.hpp"

#include "xlr/llm/structured.hpp"
#include "xlr/text.hpp"

namespace xlr::descriptor {

namespace {
std::optional<std::string> nonempty_string(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_string()) return std::nullopt;
  std::string s = text::trim(j[key].get<std::string>());
  if (s.empty()) return std::nullopt;
  return s;
}
}  // namespace

DefectDescriptor build_descriptor(const corpus::SourcePair& pair, llm::Client& client,
                                  const llm::StageParams& params, std::size_t context_radius) {
  PatchDiff diff = compute_diff(pair.buggy, pair.fixed, context_radius);

  llm::CompletionRequest req;
  req.template_id = "descriptor";
  req.bindings = {{"buggy", pair.buggy},
                  {"fixed", pair.fixed},
                  {"diff", render_unified(diff)},
                  {"source_lang", pair.lang.name()}};
  req.temperature = params.temperature;
  req.max_tokens = params.max_tokens;

  using Labels = std::pair<std::string, std::string>;
  auto labels = llm::request_structured<Labels>(
      client, req, params.parse_retries, [](const nlohmann::json& j) -> std::optional<Labels> {
        auto type = nonempty_string(j, "defect_type");
        auto cause = nonempty_string(j, "root_cause");
        if (!type || !cause) return std::nullopt;
        return Labels{*type, *cause};
      });
  if (!labels) {
    throw DescriptorError("descriptor reply unparseable after " + std::to_string(params.parse_retries + 1) +
                          " attempts");
  }
  return {labels->first, labels->second, std::move(diff)};
}

TransferabilityVerdict assess_transferability(const DefectDescriptor& desc, const LanguageId& source,
                                              const LanguageId& target, llm::Client& client,
                                              const llm::StageParams& params) {
  llm::CompletionRequest req;
  req.template_id = "transferability";
  req.bindings = {{"defect_type", desc.defect_type},
                  {"root_cause", desc.root_cause},
                  {"diff", render_unified(desc.diff)},
                  {"source_lang", source.name()},
                  {"target_lang", target.name()}};
  req.temperature = params.temperature;
  req.max_tokens = params.max_tokens;

  auto verdict = llm::request_structured<TransferabilityVerdict>(
      client, req, params.parse_retries,
      [&](const nlohmann::json& j) -> std::optional<TransferabilityVerdict> {
        if (!j.contains("transferable") || !j["transferable"].is_boolean()) return std::nullopt;
        TransferabilityVerdict v{j["transferable"].get<bool>(), nonempty_string(j, "rationale").value_or(""),
                                 target};
        if (!v.transferable && v.rationale.empty()) return std::nullopt;
        return v;
      });
  if (!verdict) return {false, "verdict unparseable", target};
  return *verdict;
}

nlohmann::json to_json(const DefectDescriptor& d) {
  return {{"defect_type", d.defect_type}, {"root_cause", d.root_cause}, {"diff", to_json(d.diff)}};
}

DefectDescriptor descriptor_from_json(const nlohmann::json& j) {
  try {
    return {j.at("defect_type").get<std::string>(), j.at("root_cause").get<std::string>(),
            patch_from_json(j.at("diff"))};
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("descriptor: ") + e.what());
  }
}

nlohmann::json to_json(const TransferabilityVerdict& v) {
  return {{"transferable", v.transferable}, {"rationale", v.rationale}, {"target_lang", v.target_lang.name()}};
}

}  // namespace xlr::descriptor
