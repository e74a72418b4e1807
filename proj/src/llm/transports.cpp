#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "xlr/llm/transports.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace xlr::llm {

HttpChatTransport::HttpChatTransport(HttpEndpoint endpoint) : endpoint_(std::move(endpoint)) {
  if (endpoint_.base_url.empty()) throw PreconditionError("llm endpoint URL is not configured");
  if (!endpoint_.api_key_env.empty()) {
    if (const char* key = std::getenv(endpoint_.api_key_env.c_str())) api_key_ = key;
  }
}

std::string HttpChatTransport::send(const CompletionRequest& req, const std::string& prompt) {
  httplib::Client cli(endpoint_.base_url);
  cli.set_connection_timeout(endpoint_.timeout_seconds, 0);
  cli.set_read_timeout(endpoint_.timeout_seconds, 0);
  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

  nlohmann::json body = {{"model", endpoint_.model},
                         {"messages", {{{"role", "user"}, {"content", prompt}}}},
                         {"temperature", req.temperature},
                         {"max_tokens", req.max_tokens}};
  auto res = cli.Post(endpoint_.path, headers, body.dump(), "application/json");
  if (!res) {
    throw TransportError("llm transport: " + httplib::to_string(res.error()), true);
  }
  if (res->status == 429 || res->status >= 500) {
    throw TransportError("llm transport: HTTP " + std::to_string(res->status), true);
  }
  if (res->status < 200 || res->status >= 300) {
    throw TransportError("llm transport: HTTP " + std::to_string(res->status) + ": " + res->body, false);
  }
  auto j = nlohmann::json::parse(res->body, nullptr, false);
  if (j.is_discarded()) throw TransportError("llm transport: reply is not JSON", false);
  try {
    return j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw TransportError(std::string("llm transport: unexpected reply shape: ") + e.what(), false);
  }
}

ScriptedTransport::ScriptedTransport(const std::filesystem::path& transcript) {
  std::ifstream in(transcript, std::ios::binary);
  if (!in) throw EnvironmentError("cannot read transcript: " + transcript.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
    for (const auto& e : j.at("entries")) {
      Entry entry;
      entry.template_id = e.at("template").get<std::string>();
      entry.contains = e.value("contains", std::string{});
      if (e.contains("sample_index")) entry.sample_index = e.at("sample_index").get<std::uint32_t>();
      if (e.contains("reply_file")) {
        const auto p = transcript.parent_path() / e.at("reply_file").get<std::string>();
        std::ifstream rf(p, std::ios::binary);
        if (!rf) throw EnvironmentError("cannot read reply file: " + p.string());
        std::ostringstream ss;
        ss << rf.rdbuf();
        entry.reply = ss.str();
      } else {
        entry.reply = e.at("reply").get<std::string>();
      }
      entries_.push_back(std::move(entry));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(transcript.string() + ": " + e.what());
  }
}

std::string ScriptedTransport::send(const CompletionRequest& req, const std::string& prompt) {
  for (const auto& e : entries_) {
    if (e.template_id != req.template_id) continue;
    if (e.sample_index && *e.sample_index != req.sample_index) continue;
    if (!e.contains.empty() && prompt.find(e.contains) == std::string::npos) continue;
    return e.reply;
  }
  throw TransportError("scripted transport: no entry for template '" + req.template_id +
                           "' sample " + std::to_string(req.sample_index),
                       false);
}

}  // namespace xlr::llm
