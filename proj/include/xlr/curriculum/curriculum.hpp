#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "xlr/corpus/journal.hpp"
#include "xlr/error.hpp"
#include "xlr/llm/template.hpp"

namespace xlr::curriculum {

struct StageRecord {
  int stage = 1;
  std::string prompt;
  std::string completion;
  std::vector<std::string> pair_ids;  // source id first, then target pair id

  bool operator==(const StageRecord&) const = default;
};

// No eligible pairs for the requested stage.
class EligibilityError : public Error {
 public:
  using Error::Error;
};

// Stage 1: every transferable source pair, template "stage1" ({src_buggy},
// {source_lang}) -> src fixed.
// Stage 2: every verified quad, template "stage2" ({src_buggy}, {src_fixed},
// {tgt_buggy}, {source_lang}, {target_lang}) -> tgt fixed.
// Stage 3: every verified target pair, template "stage3" ({tgt_buggy},
// {target_lang}) -> tgt fixed.
// Records are ordered by pair id. Throws EligibilityError when empty.
std::vector<StageRecord> build_stage(int stage, const corpus::CorpusView& corpus, const llm::TemplateStore& templates);

nlohmann::json to_json(const StageRecord& r);
StageRecord stage_record_from_json(const nlohmann::json& j);

// Hash of the corpus contents the stages are built from.
std::string corpus_hash(const corpus::CorpusView& corpus);

// Writes <out_dir>/stage<k>.jsonl and merges its entry into
// <out_dir>/manifest.json. Returns the number of records.
std::size_t emit_stage(int stage, const corpus::CorpusView& corpus, const llm::TemplateStore& templates,
                       const std::filesystem::path& out_dir);

}  // namespace xlr::curriculum
