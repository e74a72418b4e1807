#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace xlr::llm {

struct FencedBlock {
  std::string info;  // text after the opening ``` (language tag), trimmed
  std::string body;
};

std::vector<FencedBlock> fenced_blocks(std::string_view reply);

// Program text of the last fenced block; nullopt when the reply has none.
std::optional<std::string> last_code_block(std::string_view reply);

// The last ```json block that parses; failing that, the last block of any
// tag that parses as a JSON object.
std::optional<nlohmann::json> last_structured_block(std::string_view reply);

}  // namespace xlr::llm
