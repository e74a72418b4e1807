#include "xlr/corpus/types.hpp"

#include "xlr/error.hpp"
#include "xlr/text.hpp"

namespace xlr::corpus {

namespace {
void check_texts(std::string_view what, std::string_view buggy, std::string_view fixed) {
  if (buggy.empty() || fixed.empty()) {
    throw PreconditionError(std::string(what) + ": buggy and fixed must be non-empty");
  }
  if (text::equivalent_modulo_trailing_whitespace(buggy, fixed)) {
    throw PreconditionError(std::string(what) + ": no diff");
  }
}
}  // namespace

std::string target_pair_id(const TargetPair& tgt) { return tgt.source_id + "/" + tgt.lang.name(); }

void validate(const SourcePair& pair) { check_texts("source pair " + pair.id, pair.buggy, pair.fixed); }

void validate(const TargetPair& pair) {
  check_texts("target pair " + pair.source_id, pair.buggy, pair.fixed);
}

void validate(const ParallelQuad& quad) {
  validate(quad.src);
  validate(quad.tgt);
  if (quad.tgt.source_id != quad.src.id) throw PreconditionError("quad: source id mismatch");
  if (quad.tgt.lang == quad.src.lang) throw PreconditionError("quad: languages must differ");
}

nlohmann::json to_json(const SourcePair& p) {
  return {{"id", p.id}, {"lang", p.lang.name()}, {"buggy", p.buggy}, {"fixed", p.fixed}, {"meta", p.meta}};
}

SourcePair source_pair_from_json(const nlohmann::json& j) {
  try {
    return {j.at("id").get<std::string>(), LanguageId(j.at("lang").get<std::string>()),
            j.at("buggy").get<std::string>(), j.at("fixed").get<std::string>(),
            j.value("meta", nlohmann::json())};
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("source pair: ") + e.what());
  }
}

nlohmann::json to_json(const TargetPair& p) {
  return {{"source_id", p.source_id},
          {"lang", p.lang.name()},
          {"buggy", p.buggy},
          {"fixed", p.fixed},
          {"provenance",
           {{"translation_attempt", p.provenance.translation_attempt},
            {"injection_candidate", p.provenance.injection_candidate}}}};
}

TargetPair target_pair_from_json(const nlohmann::json& j) {
  try {
    TargetPair p;
    p.source_id = j.at("source_id").get<std::string>();
    p.lang = LanguageId(j.at("lang").get<std::string>());
    p.buggy = j.at("buggy").get<std::string>();
    p.fixed = j.at("fixed").get<std::string>();
    const auto& prov = j.at("provenance");
    p.provenance.translation_attempt = prov.at("translation_attempt").get<std::uint32_t>();
    p.provenance.injection_candidate = prov.at("injection_candidate").get<std::uint32_t>();
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("target pair: ") + e.what());
  }
}

}  // namespace xlr::corpus
