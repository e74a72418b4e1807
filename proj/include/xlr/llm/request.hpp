#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "xlr/llm/template.hpp"

namespace xlr::llm {

struct CompletionRequest {
  std::string template_id;
  Bindings bindings;
  double temperature = 1.0;
  int max_tokens = 2048;
  std::uint32_t sample_index = 0;

  bool operator==(const CompletionRequest&) const = default;
};

nlohmann::json to_json(const CompletionRequest& req);
CompletionRequest request_from_json(const nlohmann::json& j);

// SHA-256 of the canonical JSON form (keys sorted, compact).
std::string fingerprint(const CompletionRequest& req);

// Sampling parameters for one pipeline stage.
struct StageParams {
  double temperature = 1.0;
  int max_tokens = 2048;
  // Extra attempts when a structured reply cannot be parsed.
  int parse_retries = 2;
};

}  // namespace xlr::llm
