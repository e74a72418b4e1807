#include "xlr/llm/request.hpp"

#include "xlr/error.hpp"
#include "xlr/hash.hpp"

namespace xlr::llm {

nlohmann::json to_json(const CompletionRequest& req) {
  return {{"template_id", req.template_id},
          {"bindings", req.bindings},
          {"temperature", req.temperature},
          {"max_tokens", req.max_tokens},
          {"sample_index", req.sample_index}};
}

CompletionRequest request_from_json(const nlohmann::json& j) {
  try {
    CompletionRequest req;
    req.template_id = j.at("template_id").get<std::string>();
    req.bindings = j.at("bindings").get<Bindings>();
    req.temperature = j.at("temperature").get<double>();
    req.max_tokens = j.at("max_tokens").get<int>();
    req.sample_index = j.at("sample_index").get<std::uint32_t>();
    return req;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("completion request: ") + e.what());
  }
}

std::string fingerprint(const CompletionRequest& req) { return sha256_hex(to_json(req).dump()); }

}  // namespace xlr::llm
