#pragma once

#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include "xlr/corpus/types.hpp"

namespace xlr::corpus {

struct Diagnostic {
  std::size_t line = 0;  // 1-based
  std::string reason;
};

// pairs.size() + diagnostics.size() == lines, always.
struct IngestResult {
  std::vector<SourcePair> pairs;
  std::vector<Diagnostic> diagnostics;
  std::size_t lines = 0;
};

// Stable id over (lang, buggy, fixed): 16 hex digits of SHA-256.
std::string content_id(const LanguageId& lang, std::string_view buggy, std::string_view fixed);

// Reads JSONL records {id?, lang, buggy, fixed, meta?} in file order. Texts
// are newline-normalized (CRLF -> LF). A line is rejected with a diagnostic
// when it is not a JSON object, misses a field, names another language, has
// empty texts, has no diff modulo trailing whitespace ("no diff"), or repeats
// the content or id of an earlier line. Throws EnvironmentError when the file
// cannot be read.
IngestResult ingest(const std::filesystem::path& path, const LanguageId& lang);
IngestResult ingest(std::istream& in, const LanguageId& lang);

}  // namespace xlr::corpus
