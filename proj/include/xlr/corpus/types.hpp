#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

namespace xlr {

// Names a toolchain profile ("cpp", "rust", "ruby", ...). Which languages
// exist is decided by configuration, not code.
class LanguageId {
 public:
  LanguageId() = default;
  explicit LanguageId(std::string name) : name_(std::move(name)) {}

  const std::string& name() const { return name_; }
  bool empty() const { return name_.empty(); }

  auto operator<=>(const LanguageId&) const = default;

 private:
  std::string name_;
};

namespace corpus {

struct SourcePair {
  std::string id;
  LanguageId lang;
  std::string buggy;
  std::string fixed;
  nlohmann::json meta;  // free-form, null when absent

  bool operator==(const SourcePair&) const = default;
};

// Which translation attempt and injection candidate produced a target pair.
struct Provenance {
  std::uint32_t translation_attempt = 0;  // j*, 1-based
  std::uint32_t injection_candidate = 0;  // winning candidate index, 1-based

  bool operator==(const Provenance&) const = default;
};

struct TargetPair {
  std::string source_id;
  LanguageId lang;
  std::string buggy;
  std::string fixed;
  Provenance provenance;

  bool operator==(const TargetPair&) const = default;
};

struct ParallelQuad {
  SourcePair src;
  TargetPair tgt;
};

// Id of the target-side pair derived from a source pair: "<source_id>/<lang>".
std::string target_pair_id(const TargetPair& tgt);

// Throws PreconditionError when buggy/fixed are empty or equal modulo
// newline style and trailing whitespace.
void validate(const SourcePair& pair);
void validate(const TargetPair& pair);
void validate(const ParallelQuad& quad);

nlohmann::json to_json(const SourcePair& p);
SourcePair source_pair_from_json(const nlohmann::json& j);
nlohmann::json to_json(const TargetPair& p);
TargetPair target_pair_from_json(const nlohmann::json& j);

}  // namespace corpus
}  // namespace xlr
