#pragma once

#include <functional>
#include <optional>

#include <json.hpp>

#include "xlr/llm/client.hpp"
#include "xlr/llm/extract.hpp"

namespace xlr::llm {

// Asks for a structured reply until `parse` accepts one. Attempt k (0-based)
// is sent with sample_index = base.sample_index + k, so every retry is its own
// cache entry. Returns nullopt after 1 + retries rejected replies; transport
// and replay errors propagate.
template <typename T>
std::optional<T> request_structured(Client& client, CompletionRequest base, int retries,
                                    const std::function<std::optional<T>(const nlohmann::json&)>& parse) {
  const auto first = base.sample_index;
  for (int attempt = 0; attempt <= retries; ++attempt) {
    base.sample_index = first + static_cast<std::uint32_t>(attempt);
    const std::string reply = client.complete(base);
    if (auto block = last_structured_block(reply)) {
      if (auto value = parse(*block)) return value;
    }
  }
  return std::nullopt;
}

}  // namespace xlr::llm
