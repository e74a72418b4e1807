#include "xlr/corpus/ingest.hpp"

#include <fstream>
#include <map>

#include "xlr/error.hpp"
#include "xlr/hash.hpp"
#include "xlr/text.hpp"

namespace xlr::corpus {

std::string content_id(const LanguageId& lang, std::string_view buggy, std::string_view fixed) {
  return FieldHasher().add(lang.name()).add(buggy).add(fixed).hex().substr(0, 16);
}

IngestResult ingest(const std::filesystem::path& path, const LanguageId& lang) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw EnvironmentError("cannot read input file: " + path.string());
  return ingest(in, lang);
}

IngestResult ingest(std::istream& in, const LanguageId& lang) {
  IngestResult result;
  std::map<std::string, std::size_t> seen_content;
  std::map<std::string, std::size_t> seen_ids;
  std::string line;
  while (std::getline(in, line)) {
    const std::size_t lineno = ++result.lines;
    auto reject = [&](std::string reason) { result.diagnostics.push_back({lineno, std::move(reason)}); };

    if (text::trim(line).empty()) {
      reject("blank line");
      continue;
    }
    auto j = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded() || !j.is_object()) {
      reject("malformed JSON record");
      continue;
    }
    std::string missing;
    for (const char* field : {"lang", "buggy", "fixed"}) {
      if (!j.contains(field) || !j[field].is_string()) missing += missing.empty() ? field : std::string(", ") + field;
    }
    if (!missing.empty()) {
      reject("missing or non-string field: " + missing);
      continue;
    }
    if (j["lang"].get<std::string>() != lang.name()) {
      reject("language mismatch: expected '" + lang.name() + "', got '" + j["lang"].get<std::string>() + "'");
      continue;
    }
    SourcePair pair;
    pair.lang = lang;
    pair.buggy = text::normalize_newlines(j["buggy"].get<std::string>());
    pair.fixed = text::normalize_newlines(j["fixed"].get<std::string>());
    pair.meta = j.value("meta", nlohmann::json());
    if (pair.buggy.empty() || pair.fixed.empty()) {
      reject("empty program text");
      continue;
    }
    if (text::equivalent_modulo_trailing_whitespace(pair.buggy, pair.fixed)) {
      reject("no diff");
      continue;
    }
    const std::string hash = content_id(lang, pair.buggy, pair.fixed);
    if (auto it = seen_content.find(hash); it != seen_content.end()) {
      reject("duplicate of line " + std::to_string(it->second));
      continue;
    }
    if (j.contains("id") && !j["id"].is_null()) {
      if (!j["id"].is_string() || j["id"].get<std::string>().empty()) {
        reject("id must be a non-empty string");
        continue;
      }
      pair.id = j["id"].get<std::string>();
    } else {
      pair.id = hash;
    }
    if (auto it = seen_ids.find(pair.id); it != seen_ids.end()) {
      reject("duplicate id '" + pair.id + "' (first on line " + std::to_string(it->second) + ")");
      continue;
    }
    seen_content.emplace(hash, lineno);
    seen_ids.emplace(pair.id, lineno);
    result.pairs.push_back(std::move(pair));
  }
  return result;
}

}  // namespace xlr::corpus
