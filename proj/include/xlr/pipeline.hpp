#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "xlr/config.hpp"
#include "xlr/corpus/ingest.hpp"
#include "xlr/corpus/journal.hpp"
#include "xlr/llm/client.hpp"
#include "xlr/sandbox/sandbox.hpp"

namespace xlr::pipeline {

// Attrition profile read off a journal.
struct Funnel {
  std::size_t ingested = 0;
  std::size_t transferable = 0;
  std::size_t suites_admitted = 0;
  std::size_t translated = 0;
  std::size_t quads = 0;

  bool operator==(const Funnel&) const = default;
};

Funnel funnel_from_records(const std::vector<corpus::PipelineRecord>& records);
std::string render_funnel(const Funnel& f);

struct RunOptions {
  LanguageId target;
  int workers = 4;
  std::function<void(const std::string&)> progress;  // may be empty
};

struct RunSummary {
  Funnel funnel;
  std::size_t pairs_processed = 0;  // pairs that received new records
  std::size_t records_written = 0;
  std::vector<corpus::Diagnostic> ingest_diagnostics;
  // Pairs left non-terminal by an infrastructure failure, with the reason.
  std::vector<std::pair<std::string, std::string>> incomplete;
  std::optional<std::string> replay_miss;  // fingerprint; the run stopped early
  bool nothing_to_do = false;
};


// Ingests config.paths.input, then drives every pair that is new or
// non-terminal in the journal through the remaining stages. Pairs run on
// `options.workers` threads; each pair's records are committed as one batch,
// in ingestion order, so the journal does not depend on scheduling.
RunSummary run_pipeline(const Config& config, corpus::Journal& journal, llm::Client& client,
                        sandbox::Sandbox& sandbox, const RunOptions& options);

// Re-checks a quad from its stored artifacts: the target fixed program passes
// the whole suite and the buggy one fails at least one trigger input against
// it. Returns the problems found.
std::vector<std::string> verify_quad(const corpus::TargetPair& tgt, const std::vector<std::string>& suite_inputs,
                                     const std::vector<std::string>& suite_expected,
                                     const std::vector<std::string>& trigger, sandbox::Sandbox& sandbox);

// Multi-line description of everything the journal holds about a pair.
std::string render_lineage(const std::vector<corpus::PipelineRecord>& lineage);

}  // namespace xlr::pipeline
