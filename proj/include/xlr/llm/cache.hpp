#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "xlr/llm/request.hpp"

namespace xlr::llm {

struct CacheEntry {
  std::string fingerprint;
  CompletionRequest request;
  std::string reply;
};

// Fingerprint -> reply map persisted as JSONL {fingerprint, request, reply}.
// The full request is stored so a fingerprint collision is detected rather
// than served. Concurrent reads, serialized writes.
class ReplayCache {
 public:
  // In-memory cache, nothing persisted.
  ReplayCache() = default;
  // Loads `path` if it exists; later put() calls append to it. Throws
  // ParseError on a malformed line, a fingerprint that does not match its
  // request, or two different requests under one fingerprint.
  explicit ReplayCache(std::filesystem::path path);

  ReplayCache(const ReplayCache&) = delete;
  ReplayCache& operator=(const ReplayCache&) = delete;

  std::optional<std::string> find(const CompletionRequest& req) const;
  void put(const CompletionRequest& req, const std::string& reply);

  std::size_t size() const;
  std::vector<CacheEntry> entries() const;

 private:
  void insert_checked(CacheEntry entry);

  std::optional<std::filesystem::path> path_;
  mutable std::shared_mutex mu_;
  std::map<std::string, CacheEntry> entries_;
  std::ofstream out_;
};

}  // namespace xlr::llm
