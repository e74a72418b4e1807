#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace xlr::descriptor {

// Half-open line range [start, start + count), 0-based.
struct LineRange {
  std::size_t start = 0;
  std::size_t count = 0;

  bool operator==(const LineRange&) const = default;
};

struct Hunk {
  LineRange buggy;
  LineRange fixed;
  std::vector<std::string> removed;
  std::vector<std::string> added;
  // Unchanged lines surrounding the hunk in the buggy text, at most
  // context_radius on each side. Used for prompts only; apply() ignores them.
  std::vector<std::string> context_before;
  std::vector<std::string> context_after;

  bool operator==(const Hunk&) const = default;
};

// Line-granular patch from a buggy text to a fixed text. Hunks are sorted and
// disjoint, and apply(buggy, diff) reproduces the fixed text exactly.
struct PatchDiff {
  std::vector<Hunk> hunks;
  std::size_t context_radius = 3;

  bool operator==(const PatchDiff&) const = default;
};

// Shortest edit script (Myers) over lines; adjacent changed lines are grouped
// into one hunk. Throws PreconditionError on empty input or identical texts.
PatchDiff compute_diff(std::string_view buggy, std::string_view fixed,
                       std::size_t context_radius = 3);

// Throws ParseError when a hunk's removed lines do not match `buggy`.
std::string apply(std::string_view buggy, const PatchDiff& diff);

// Unified-diff rendering with 1-based @@ headers, for prompt embedding.
std::string render_unified(const PatchDiff& diff);

nlohmann::json to_json(const PatchDiff& diff);
PatchDiff patch_from_json(const nlohmann::json& j);

}  // namespace xlr::descriptor
