#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "xlr/corpus/types.hpp"
#include "xlr/descriptor/descriptor.hpp"
#include "xlr/llm/client.hpp"
#include "xlr/sandbox/sandbox.hpp"
#include "xlr/testgen/testgen.hpp"

namespace xlr::inject {

using sandbox::Category;
using sandbox::ExecutionOutcome;

struct BehaviorSpec {
  std::string trigger_condition;
  Category expected_category = Category::kWrongOutput;
  std::string expected_failure;  // the model's description, kept for prompting
};

struct BehaviorResult {
  BehaviorSpec spec;
  std::vector<std::string> warnings;
};

// Maps free text ("incorrect output", "segfault", "panic", ...) to a failure
// category. Never returns pass or compile_error.
std::optional<Category> map_failure_category(std::string_view text);

// Template "behavior", reply {"trigger_condition": ..., "expected_failure":
// {"category": ..., "description": ...}} (a plain string is accepted for
// expected_failure). A category that cannot be mapped after the retries
// becomes wrong_output with a warning.
BehaviorResult describe_behavior(const descriptor::DefectDescriptor& desc, const LanguageId& source,
                                 llm::Client& client, const llm::StageParams& params);

struct InputSets {
  std::vector<std::string> trigger;
  std::vector<std::string> regression;
};

struct InputSetResult {
  InputSets sets;
  // Outcome of the buggy source program on each trigger input, classified
  // against the fixed program's output.
  std::map<std::string, ExecutionOutcome> src_buggy;
  std::vector<std::string> diagnostics;
  bool discarded = false;
  std::string reason;  // set when discarded
};

// Runs every input on both source programs. The buggy run is classified with
// the fixed run's stdout as expected output, so a trigger is any input where
// that classification is not pass. Inputs on which the fixed program itself
// does not terminate normally are excluded. Throws
// testgen::SourceCompileError when the buggy source does not compile.
InputSetResult classify_inputs(const corpus::SourcePair& pair, const std::vector<std::string>& inputs,
                               sandbox::Sandbox& sandbox);

// Template "trigger_inputs" proposes up to `budget` inputs guided by the
// spec; they come first, followed by the suite's inputs, then classify_inputs.
InputSetResult construct_input_sets(const corpus::SourcePair& pair, const BehaviorSpec& spec,
                                    const testgen::TestSuite& suite, llm::Client& client, sandbox::Sandbox& sandbox,
                                    int budget, const llm::StageParams& params);

enum class CandidateStatus { kOk, kSyntaxError, kIdentical, kExtractionFailed };
std::string_view to_string(CandidateStatus s);

struct Candidate {
  std::uint32_t index = 0;  // i, 1-based
  std::string program;
  CandidateStatus status = CandidateStatus::kOk;
};

// n requests to template "inject" with sample_index = 1..n.
std::vector<Candidate> generate_candidates(const std::string& tgt_fixed, const descriptor::DefectDescriptor& desc,
                                           const BehaviorSpec& spec, const LanguageId& target, llm::Client& client,
                                           sandbox::Sandbox& sandbox, int n, const llm::StageParams& params);

struct CandidateScore {
  std::uint32_t candidate_index = 0;
  int n_defect = 0;
  int n_reg = 0;

  bool operator==(const CandidateScore&) const = default;
};

// Outcomes of P_tgt^fixed on every trigger and regression input; computed
// once per pair and shared by all candidates.
std::map<std::string, ExecutionOutcome> reference_outcomes(const std::string& tgt_fixed, const LanguageId& target,
                                                           const InputSets& sets, sandbox::Sandbox& sandbox);

// n_defect: trigger inputs where the candidate lands in the same category as
// the buggy source program. The candidate is judged against the target fixed
// program's output, so wrong_output means "differs from P_tgt^fixed".
// n_reg: regression inputs where both the candidate and P_tgt^fixed terminate
// normally with equal output. Candidates that are not kOk score (0, 0)
// without running.
CandidateScore score_candidate(const Candidate& candidate, const LanguageId& target, const InputSets& sets,
                               const std::map<std::string, ExecutionOutcome>& src_buggy,
                               const std::map<std::string, ExecutionOutcome>& reference, sandbox::Sandbox& sandbox);

// Position in `scores` of the lexicographic maximum of (n_defect, n_reg),
// lowest candidate_index first among equals; nullopt when the best n_defect
// is 0. Throws PreconditionError on an empty list.
std::optional<std::size_t> select_buggy(std::span<const CandidateScore> scores);

nlohmann::json to_json(const BehaviorSpec& spec);
nlohmann::json to_json(const CandidateScore& s);

}  // namespace xlr::inject
