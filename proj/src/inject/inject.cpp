#include "xlr/inject/inject.hpp"

#include <algorithm>
#include <set>

#include "xlr/llm/extract.hpp"
#include "xlr/llm/structured.hpp"
#include "xlr/text.hpp"

namespace xlr::inject {

namespace {

struct Keyword {
  std::string_view word;
  Category category;
};

constexpr Keyword kKeywords[] = {
    {"wrong_output", Category::kWrongOutput},
    {"wrong output", Category::kWrongOutput},
    {"incorrect output", Category::kWrongOutput},
    {"incorrect result", Category::kWrongOutput},
    {"wrong answer", Category::kWrongOutput},
    {"wrong result", Category::kWrongOutput},
    {"crash", Category::kCrash},
    {"segfault", Category::kCrash},
    {"segmentation", Category::kCrash},
    {"abort", Category::kCrash},
    {"exception", Category::kException},
    {"runtime error", Category::kException},
    {"panic", Category::kException},
    {"raise", Category::kException},
    {"timeout", Category::kTimeout},
    {"time limit", Category::kTimeout},
    {"infinite loop", Category::kTimeout},
    {"never terminates", Category::kTimeout},
};

llm::CompletionRequest stage_request(std::string id, llm::Bindings bindings, const llm::StageParams& params) {
  llm::CompletionRequest req;
  req.template_id = std::move(id);
  req.bindings = std::move(bindings);
  req.temperature = params.temperature;
  req.max_tokens = params.max_tokens;
  return req;
}

std::string string_field(const nlohmann::json& j, const char* key) {
  if (!j.is_object() || !j.contains(key) || !j[key].is_string()) return {};
  return text::trim(j[key].get<std::string>());
}

}  // namespace

std::optional<Category> map_failure_category(std::string_view raw) {
  const std::string t = text::to_lower(text::trim(raw));
  if (t.empty()) return std::nullopt;
  for (auto c : {Category::kWrongOutput, Category::kCrash, Category::kException, Category::kTimeout}) {
    if (t == sandbox::to_string(c)) return c;
  }
  // Earliest keyword in the text wins: "crash caused by an exception" is a crash.
  std::optional<Category> best;
  std::size_t best_pos = std::string::npos;
  for (const auto& k : kKeywords) {
    auto pos = t.find(k.word);
    if (pos < best_pos) {
      best_pos = pos;
      best = k.category;
    }
  }
  return best;
}

BehaviorResult describe_behavior(const descriptor::DefectDescriptor& desc, const LanguageId& source,
                                 llm::Client& client, const llm::StageParams& params) {
  auto req = stage_request("behavior",
                           {{"defect_type", desc.defect_type},
                            {"root_cause", desc.root_cause},
                            {"diff", descriptor::render_unified(desc.diff)},
                            {"source_lang", source.name()}},
                           params);

  BehaviorResult result;
  std::optional<BehaviorSpec> partial;  // parsed, but the category did not map
  for (int attempt = 0; attempt <= params.parse_retries; ++attempt) {
    req.sample_index = static_cast<std::uint32_t>(attempt);
    auto block = llm::last_structured_block(client.complete(req));
    if (!block) continue;
    BehaviorSpec spec;
    spec.trigger_condition = string_field(*block, "trigger_condition");
    std::string category_text;
    if (block->contains("expected_failure")) {
      const auto& ef = (*block)["expected_failure"];
      if (ef.is_string()) {
        category_text = text::trim(ef.get<std::string>());
        spec.expected_failure = category_text;
      } else {
        category_text = string_field(ef, "category");
        spec.expected_failure = string_field(ef, "description");
        if (spec.expected_failure.empty()) spec.expected_failure = category_text;
      }
    }
    if (spec.trigger_condition.empty() || spec.expected_failure.empty()) continue;
    if (auto c = map_failure_category(category_text)) {
      spec.expected_category = *c;
      result.spec = std::move(spec);
      return result;
    }
    if (!partial) partial = std::move(spec);
  }
  if (partial) {
    result.spec = std::move(*partial);
    result.warnings.push_back("expected failure category unmappable; defaulting to wrong_output");
  } else {
    result.spec = {desc.root_cause, Category::kWrongOutput, "incorrect output"};
    result.warnings.push_back("behavior reply unparseable; using the root cause as trigger condition and wrong_output");
  }
  result.spec.expected_category = Category::kWrongOutput;
  return result;
}

InputSetResult classify_inputs(const corpus::SourcePair& pair, const std::vector<std::string>& inputs,
                               sandbox::Sandbox& sandbox) {
  if (auto syntax = sandbox.syntax_check(pair.buggy, pair.lang); !syntax.ok) {
    throw testgen::SourceCompileError("buggy source program does not compile: " + syntax.diagnostics);
  }
  InputSetResult r;
  std::set<std::string> seen;
  for (const auto& input : inputs) {
    if (!seen.insert(input).second) continue;
    auto fixed = sandbox.execute(pair.fixed, pair.lang, input);
    if (fixed.category != Category::kPass) {
      r.diagnostics.push_back("fixed source " + std::string(to_string(fixed.category)) + " on input, excluded");
      continue;
    }
    auto buggy = sandbox.execute(pair.buggy, pair.lang, input, fixed.stdout_text);
    if (buggy.category == Category::kPass) {
      r.sets.regression.push_back(input);
    } else {
      r.sets.trigger.push_back(input);
      r.src_buggy.emplace(input, std::move(buggy));
    }
  }
  if (r.sets.trigger.empty()) {
    r.discarded = true;
    r.reason = "no trigger inputs";
  }
  return r;
}

InputSetResult construct_input_sets(const corpus::SourcePair& pair, const BehaviorSpec& spec,
                                    const testgen::TestSuite& suite, llm::Client& client, sandbox::Sandbox& sandbox,
                                    int budget, const llm::StageParams& params) {
  std::vector<std::string> inputs;
  if (budget > 0) {
    auto req = stage_request("trigger_inputs",
                             {{"buggy", pair.buggy},
                              {"fixed", pair.fixed},
                              {"trigger_condition", spec.trigger_condition},
                              {"expected_failure", spec.expected_failure},
                              {"source_lang", pair.lang.name()},
                              {"count", std::to_string(budget)}},
                             params);
    using Inputs = std::vector<std::string>;
    auto proposed = llm::request_structured<Inputs>(
        client, req, params.parse_retries, [&](const nlohmann::json& j) -> std::optional<Inputs> {
          if (!j.contains("inputs") || !j["inputs"].is_array()) return std::nullopt;
          Inputs out;
          for (const auto& v : j["inputs"]) {
            if (v.is_string() && static_cast<int>(out.size()) < budget) out.push_back(v.get<std::string>());
          }
          return out;
        });
    if (proposed) inputs = std::move(*proposed);
  }
  for (const auto& c : suite.cases) inputs.push_back(c.input);
  auto r = classify_inputs(pair, inputs, sandbox);
  return r;
}

std::string_view to_string(CandidateStatus s) {
  switch (s) {
    case CandidateStatus::kOk: return "ok";
    case CandidateStatus::kSyntaxError: return "syntax_error";
    case CandidateStatus::kIdentical: return "identical";
    case CandidateStatus::kExtractionFailed: return "extraction_failed";
  }
  return "?";
}

std::vector<Candidate> generate_candidates(const std::string& tgt_fixed, const descriptor::DefectDescriptor& desc,
                                           const BehaviorSpec& spec, const LanguageId& target, llm::Client& client,
                                           sandbox::Sandbox& sandbox, int n, const llm::StageParams& params) {
  if (n < 1) throw PreconditionError("generate_candidates: n must be >= 1");
  auto req = stage_request("inject",
                           {{"tgt_fixed", tgt_fixed},
                            {"defect_type", desc.defect_type},
                            {"root_cause", desc.root_cause},
                            {"diff_hunks", descriptor::render_unified(desc.diff)},
                            {"trigger_condition", spec.trigger_condition},
                            {"expected_failure", std::string(to_string(spec.expected_category)) + ": " +
                                                     spec.expected_failure},
                            {"target_lang", target.name()}},
                           params);
  std::vector<Candidate> out;
  for (int i = 1; i <= n; ++i) {
    req.sample_index = static_cast<std::uint32_t>(i);
    Candidate c;
    c.index = static_cast<std::uint32_t>(i);
    auto code = llm::last_code_block(client.complete(req));
    if (!code) {
      c.status = CandidateStatus::kExtractionFailed;
    } else {
      c.program = std::move(*code);
      if (text::equivalent_modulo_trailing_whitespace(c.program, tgt_fixed)) {
        c.status = CandidateStatus::kIdentical;
      } else if (!sandbox.syntax_check(c.program, target).ok) {
        c.status = CandidateStatus::kSyntaxError;
      }
    }
    out.push_back(std::move(c));
  }
  return out;
}

std::map<std::string, ExecutionOutcome> reference_outcomes(const std::string& tgt_fixed, const LanguageId& target,
                                                           const InputSets& sets, sandbox::Sandbox& sandbox) {
  std::map<std::string, ExecutionOutcome> out;
  for (const auto* list : {&sets.trigger, &sets.regression}) {
    for (const auto& input : *list) {
      if (!out.contains(input)) out.emplace(input, sandbox.execute(tgt_fixed, target, input));
    }
  }
  return out;
}

CandidateScore score_candidate(const Candidate& candidate, const LanguageId& target, const InputSets& sets,
                               const std::map<std::string, ExecutionOutcome>& src_buggy,
                               const std::map<std::string, ExecutionOutcome>& reference, sandbox::Sandbox& sandbox) {
  CandidateScore score{candidate.index, 0, 0};
  if (candidate.status != CandidateStatus::kOk) return score;

  auto run = [&](const std::string& input) {
    const auto& ref = reference.at(input);
    std::optional<std::string> expected;
    if (ref.category == Category::kPass) expected = ref.stdout_text;
    return std::pair{sandbox.execute(candidate.program, target, input, expected), ref.category == Category::kPass};
  };

  for (const auto& t : sets.trigger) {
    auto it = src_buggy.find(t);
    if (it == src_buggy.end()) throw PreconditionError("score_candidate: no source outcome for a trigger input");
    auto outcome = run(t).first;
    score.n_defect += outcome.category == it->second.category;
  }
  for (const auto& r : sets.regression) {
    auto [outcome, ref_normal] = run(r);
    score.n_reg += ref_normal && outcome.category == Category::kPass;
  }
  return score;
}

std::optional<std::size_t> select_buggy(std::span<const CandidateScore> scores) {
  if (scores.empty()) throw PreconditionError("select_buggy: no scores");
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    const auto& a = scores[i];
    const auto& b = scores[best];
    if (std::tie(a.n_defect, a.n_reg) > std::tie(b.n_defect, b.n_reg) ||
        (std::tie(a.n_defect, a.n_reg) == std::tie(b.n_defect, b.n_reg) && a.candidate_index < b.candidate_index)) {
      best = i;
    }
  }
  if (scores[best].n_defect == 0) return std::nullopt;
  return best;
}

nlohmann::json to_json(const BehaviorSpec& spec) {
  return {{"trigger_condition", spec.trigger_condition},
          {"expected_category", std::string(to_string(spec.expected_category))},
          {"expected_failure", spec.expected_failure}};
}

nlohmann::json to_json(const CandidateScore& s) {
  return {{"candidate", s.candidate_index}, {"n_defect", s.n_defect}, {"n_reg", s.n_reg}};
}

}  // namespace xlr::inject
