#pragma once

#include <string>
#include <string_view>

namespace xlr {

// Lowercase hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

// Incremental SHA-256 for hashing several fields without concatenating them.
// Each field is length-prefixed so ("ab","c") and ("a","bc") differ.
class FieldHasher {
 public:
  FieldHasher();
  ~FieldHasher();
  FieldHasher(const FieldHasher&) = delete;
  FieldHasher& operator=(const FieldHasher&) = delete;

  FieldHasher& add(std::string_view field);
  std::string hex();

 private:
  struct Impl;
  Impl* impl_;
};

}  // namespace xlr
