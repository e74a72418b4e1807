#include "xlr/llm/cache.hpp"

#include <string>

#include "xlr/error.hpp"

namespace xlr::llm {

ReplayCache::ReplayCache(std::filesystem::path path) : path_(std::move(path)) {
  if (std::filesystem::exists(*path_)) {
    std::ifstream in(*path_, std::ios::binary);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      try {
        const auto j = nlohmann::json::parse(line);
        CacheEntry e{j.at("fingerprint").get<std::string>(), request_from_json(j.at("request")),
                     j.at("reply").get<std::string>()};
        if (fingerprint(e.request) != e.fingerprint) {
          throw ParseError("fingerprint does not match stored request");
        }
        insert_checked(std::move(e));
      } catch (const std::exception& e) {
        throw ParseError(path_->string() + ":" + std::to_string(lineno) + ": " + e.what());
      }
    }
  } else if (path_->has_parent_path()) {
    std::filesystem::create_directories(path_->parent_path());
  }
  out_.open(*path_, std::ios::binary | std::ios::app);
  if (!out_) throw EnvironmentError("cannot open replay cache for append: " + path_->string());
}

void ReplayCache::insert_checked(CacheEntry entry) {
  auto it = entries_.find(entry.fingerprint);
  if (it != entries_.end()) {
    if (!(it->second.request == entry.request)) {
      throw ParseError("fingerprint collision: " + entry.fingerprint);
    }
    it->second.reply = std::move(entry.reply);
    return;
  }
  std::string key = entry.fingerprint;
  entries_.emplace(std::move(key), std::move(entry));
}

std::optional<std::string> ReplayCache::find(const CompletionRequest& req) const {
  const std::string fp = fingerprint(req);
  std::shared_lock lock(mu_);
  auto it = entries_.find(fp);
  if (it == entries_.end()) return std::nullopt;
  if (!(it->second.request == req)) throw ParseError("fingerprint collision: " + fp);
  return it->second.reply;
}

void ReplayCache::put(const CompletionRequest& req, const std::string& reply) {
  CacheEntry e{fingerprint(req), req, reply};
  std::unique_lock lock(mu_);
  if (out_.is_open()) {
    nlohmann::json j = {{"fingerprint", e.fingerprint}, {"request", to_json(req)}, {"reply", reply}};
    out_ << j.dump() << '\n';
    out_.flush();
    if (!out_) throw EnvironmentError("replay cache write failed");
  }
  insert_checked(std::move(e));
}

std::size_t ReplayCache::size() const {
  std::shared_lock lock(mu_);
  return entries_.size();
}

std::vector<CacheEntry> ReplayCache::entries() const {
  std::shared_lock lock(mu_);
  std::vector<CacheEntry> out;
  out.reserve(entries_.size());
  for (const auto& [fp, e] : entries_) out.push_back(e);
  return out;
}

}  // namespace xlr::llm
