#include "xlr/curriculum/curriculum.hpp"

#include <fstream>
#include <sstream>

#include "xlr/hash.hpp"

namespace xlr::curriculum {

std::vector<StageRecord> build_stage(int stage, const corpus::CorpusView& corpus,
                                     const llm::TemplateStore& templates) {
  std::vector<StageRecord> out;
  const std::string tmpl = "stage" + std::to_string(stage);
  switch (stage) {
    case 1:
      for (const auto& id : corpus.transferable) {
        const auto& src = corpus.sources.at(id);
        out.push_back({1, templates.render(tmpl, {{"src_buggy", src.buggy}, {"source_lang", src.lang.name()}}),
                       src.fixed, {id}});
      }
      break;
    case 2:
      for (const auto& [id, tgt] : corpus.verified) {
        const auto& src = corpus.sources.at(tgt.source_id);
        out.push_back({2,
                       templates.render(tmpl, {{"src_buggy", src.buggy},
                                               {"src_fixed", src.fixed},
                                               {"tgt_buggy", tgt.buggy},
                                               {"source_lang", src.lang.name()},
                                               {"target_lang", tgt.lang.name()}}),
                       tgt.fixed,
                       {tgt.source_id, corpus::target_pair_id(tgt)}});
      }
      break;
    case 3:
      for (const auto& [id, tgt] : corpus.verified) {
        out.push_back({3, templates.render(tmpl, {{"tgt_buggy", tgt.buggy}, {"target_lang", tgt.lang.name()}}),
                       tgt.fixed, {corpus::target_pair_id(tgt)}});
      }
      break;
    default:
      throw PreconditionError("curriculum stage must be 1, 2 or 3");
  }
  if (out.empty()) {
    throw EligibilityError("stage " + std::to_string(stage) + ": no eligible pairs (" +
                           (stage == 1 ? "needs a transferable source pair" : "needs a verified quad") + ")");
  }
  return out;
}

nlohmann::json to_json(const StageRecord& r) {
  return {{"stage", r.stage}, {"prompt", r.prompt}, {"completion", r.completion}, {"pair_ids", r.pair_ids}};
}

StageRecord stage_record_from_json(const nlohmann::json& j) {
  try {
    return {j.at("stage").get<int>(), j.at("prompt").get<std::string>(), j.at("completion").get<std::string>(),
            j.at("pair_ids").get<std::vector<std::string>>()};
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("stage record: ") + e.what());
  }
}

std::string corpus_hash(const corpus::CorpusView& corpus) {
  FieldHasher h;
  h.add("sources");
  for (const auto& [id, p] : corpus.sources) h.add(corpus::to_json(p).dump());
  h.add("transferable");
  for (const auto& id : corpus.transferable) h.add(id);
  h.add("verified");
  for (const auto& [id, t] : corpus.verified) h.add(corpus::to_json(t).dump());
  return h.hex();
}

std::size_t emit_stage(int stage, const corpus::CorpusView& corpus, const llm::TemplateStore& templates,
                       const std::filesystem::path& out_dir) {
  auto records = build_stage(stage, corpus, templates);
  std::filesystem::create_directories(out_dir);

  const std::string name = "stage" + std::to_string(stage) + ".jsonl";
  std::ostringstream body;
  for (const auto& r : records) body << to_json(r).dump() << '\n';
  const std::string data = body.str();
  {
    std::ofstream out(out_dir / name, std::ios::binary | std::ios::trunc);
    out << data;
    if (!out) throw EnvironmentError("failed writing " + (out_dir / name).string());
  }

  const auto manifest_path = out_dir / "manifest.json";
  nlohmann::json manifest = nlohmann::json::object();
  if (std::ifstream in(manifest_path); in) {
    try {
      manifest = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception&) {
      manifest = nlohmann::json::object();
    }
  }
  const std::string key = "stage" + std::to_string(stage);
  manifest["corpus_hash"] = corpus_hash(corpus);
  manifest["template_hash"] = templates.hash_of({"stage1", "stage2", "stage3"});
  manifest["stages"][key] = {{"file", name}, {"count", records.size()}, {"sha256", sha256_hex(data)}};
  std::ofstream out(manifest_path, std::ios::binary | std::ios::trunc);
  out << manifest.dump(2) << '\n';
  if (!out) throw EnvironmentError("failed writing " + manifest_path.string());
  return records.size();
}

}  // namespace xlr::curriculum
