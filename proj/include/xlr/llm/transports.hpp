#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "xlr/llm/client.hpp"

namespace xlr::llm {

struct HttpEndpoint {
  // e.g. "https://api.example.com" or "http://127.0.0.1:8080"
  std::string base_url;
  std::string path = "/v1/chat/completions";
  std::string model;
  // Name of the environment variable holding the bearer token; may be empty.
  std::string api_key_env;
  int timeout_seconds = 120;
};

// OpenAI-compatible chat-completion endpoint. HTTP 429, 5xx and connection
// failures are transient; other non-2xx replies are not.
class HttpChatTransport : public Transport {
 public:
  explicit HttpChatTransport(HttpEndpoint endpoint);
  std::string send(const CompletionRequest& req, const std::string& prompt) override;

 private:
  HttpEndpoint endpoint_;
  std::string api_key_;
};

// Answers from a hand-written transcript, used to author replay caches for
// fixtures without a live model. Transcript JSON:
//   {"entries": [{"template": id, "contains": substring of the rendered prompt,
//                 "sample_index": optional int, "reply" | "reply_file": ...}]}
// The first matching entry wins; no match is a non-transient TransportError.
class ScriptedTransport : public Transport {
 public:
  explicit ScriptedTransport(const std::filesystem::path& transcript);
  std::string send(const CompletionRequest& req, const std::string& prompt) override;

 private:
  struct Entry {
    std::string template_id;
    std::string contains;
    std::optional<std::uint32_t> sample_index;
    std::string reply;
  };
  std::vector<Entry> entries_;
};

}  // namespace xlr::llm
