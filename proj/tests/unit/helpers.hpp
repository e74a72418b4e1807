#pragma once

#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "xlr/llm/client.hpp"
#include "xlr/sandbox/sandbox.hpp"

namespace xlr::testing {

// Answers from a function of the request and remembers every request.
class MockClient : public llm::Client {
 public:
  using Fn = std::function<std::string(const llm::CompletionRequest&)>;
  explicit MockClient(Fn fn) : fn_(std::move(fn)) {}

  std::string complete(const llm::CompletionRequest& req) override {
    {
      std::lock_guard lock(mu_);
      requests_.push_back(req);
    }
    return fn_(req);
  }

  std::vector<llm::CompletionRequest> requests() const {
    std::lock_guard lock(mu_);
    return requests_;
  }

  int count(const std::string& template_id) const {
    std::lock_guard lock(mu_);
    int n = 0;
    for (const auto& r : requests_) n += r.template_id == template_id;
    return n;
  }

 private:
  Fn fn_;
  mutable std::mutex mu_;
  std::vector<llm::CompletionRequest> requests_;
};

inline std::string json_reply(const nlohmann::json& j) { return "```json\n" + j.dump() + "\n```\n"; }
inline std::string code_reply(const std::string& code) { return "```\n" + code + "```\n"; }

// cpp (with gcov coverage), python and rust profiles as in the example config.
std::map<LanguageId, sandbox::ToolchainProfile> host_profiles(double run_timeout_s = 10.0);

std::filesystem::path scratch_root();

inline const LanguageId kCpp{"cpp"};
inline const LanguageId kPython{"python"};
inline const LanguageId kRust{"rust"};

}  // namespace xlr::testing
