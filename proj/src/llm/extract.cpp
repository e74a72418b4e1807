#include "xlr/llm/extract.hpp"

#include "xlr/text.hpp"

namespace xlr::llm {

std::vector<FencedBlock> fenced_blocks(std::string_view reply) {
  std::vector<FencedBlock> blocks;
  const auto lines = text::split_lines(text::normalize_newlines(reply));
  bool open = false;
  FencedBlock current;
  for (const auto& raw : lines) {
    const std::string line = text::trim(raw);
    if (line.rfind("```", 0) == 0) {
      if (!open) {
        open = true;
        current = {text::trim(line.substr(3)), ""};
      } else {
        open = false;
        blocks.push_back(std::move(current));
        current = {};
      }
      continue;
    }
    if (open) {
      current.body += raw;
      current.body += '\n';
    }
  }
  return blocks;
}

std::optional<std::string> last_code_block(std::string_view reply) {
  auto blocks = fenced_blocks(reply);
  if (blocks.empty()) return std::nullopt;
  return std::move(blocks.back().body);
}

std::optional<nlohmann::json> last_structured_block(std::string_view reply) {
  const auto blocks = fenced_blocks(reply);
  auto parse_object = [](const std::string& body) -> std::optional<nlohmann::json> {
    auto j = nlohmann::json::parse(body, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded() || !j.is_object()) return std::nullopt;
    return j;
  };
  for (auto it = blocks.rbegin(); it != blocks.rend(); ++it) {
    if (text::to_lower(it->info) != "json") continue;
    if (auto j = parse_object(it->body)) return j;
  }
  for (auto it = blocks.rbegin(); it != blocks.rend(); ++it) {
    if (auto j = parse_object(it->body)) return j;
  }
  return std::nullopt;
}

}  // namespace xlr::llm
