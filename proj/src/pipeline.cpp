#include "xlr/pipeline.hpp"

#include <atomic>
#include <condition_variable>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "xlr/corpus/ingest.hpp"
#include "xlr/descriptor/descriptor.hpp"
#include "xlr/hash.hpp"
#include "xlr/inject/inject.hpp"
#include "xlr/testgen/testgen.hpp"
#include "xlr/translate/translate.hpp"

namespace xlr::pipeline {

using corpus::PipelineRecord;
using corpus::Stage;
using nlohmann::json;

Funnel funnel_from_records(const std::vector<PipelineRecord>& records) {
  Funnel f;
  for (const auto& r : records) {
    switch (r.stage) {
      case Stage::kIngested: ++f.ingested; break;
      case Stage::kTransferable: ++f.transferable; break;
      case Stage::kTestsGenerated: ++f.suites_admitted; break;
      case Stage::kTranslated: ++f.translated; break;
      case Stage::kQuadVerified: ++f.quads; break;
      default: break;
    }
  }
  return f;
}

std::string render_funnel(const Funnel& f) {
  std::ostringstream out;
  out << "ingested        " << f.ingested << '\n'
      << "transferable    " << f.transferable << '\n'
      << "suites-admitted " << f.suites_admitted << '\n'
      << "translated      " << f.translated << '\n'
      << "quads           " << f.quads << '\n';
  return out.str();
}

std::vector<std::string> verify_quad(const corpus::TargetPair& tgt, const std::vector<std::string>& suite_inputs,
                                     const std::vector<std::string>& suite_expected,
                                     const std::vector<std::string>& trigger, sandbox::Sandbox& sandbox) {
  std::vector<std::string> problems;
  try {
    corpus::validate(tgt);
  } catch (const PreconditionError& e) {
    problems.emplace_back(e.what());
  }
  for (std::size_t i = 0; i < suite_inputs.size(); ++i) {
    auto o = sandbox.execute(tgt.fixed, tgt.lang, suite_inputs[i], suite_expected.at(i));
    if (o.category != sandbox::Category::kPass) {
      problems.push_back("target fixed program: suite case " + std::to_string(i + 1) + " " +
                         std::string(to_string(o.category)));
    }
  }
  bool observable = false;
  for (const auto& t : trigger) {
    auto ref = sandbox.execute(tgt.fixed, tgt.lang, t);
    std::optional<std::string> expected;
    if (ref.category == sandbox::Category::kPass) expected = ref.stdout_text;
    auto b = sandbox.execute(tgt.buggy, tgt.lang, t, expected);
    if (b.category != ref.category || (expected && b.category != sandbox::Category::kPass)) {
      observable = true;
      break;
    }
  }
  if (!observable) problems.emplace_back("target buggy program behaves like the fixed one on every trigger input");
  return problems;
}

namespace {

struct PairWork {
  corpus::SourcePair pair;
  std::vector<PipelineRecord> history;
};

struct PairOutcome {
  std::vector<PipelineRecord> records;
  std::optional<std::string> incomplete;
  std::optional<std::string> replay_miss;
};

std::string file_stem_for(const std::string& id) {
  const bool plain = !id.empty() && std::all_of(id.begin(), id.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '-' || c == '.';
  }) && id.front() != '.';
  return plain ? id : sha256_hex(id).substr(0, 16);
}

class PairRunner {
 public:
  PairRunner(const Config& config, const LanguageId& target, llm::Client& client, sandbox::Sandbox& sandbox,
             PairWork work)
      : config_(config), target_(target), client_(client), sandbox_(sandbox), work_(std::move(work)) {
    if (!work_.history.empty()) stage_ = work_.history.back().stage;
  }

  PairOutcome run() {
    try {
      advance();
    } catch (const llm::ReplayMissError& e) {
      out_.replay_miss = e.fingerprint();
    } catch (const llm::TransportError& e) {
      out_.incomplete = std::string("model transport: ") + e.what();
    } catch (const EnvironmentError& e) {
      out_.incomplete = std::string("environment: ") + e.what();
    } catch (const Error& e) {
      out_.incomplete = e.what();
    } catch (const json::exception& e) {
      out_.incomplete = std::string("malformed journal payload: ") + e.what();
    }
    return std::move(out_);
  }

 private:
  void emit(Stage stage, json payload) {
    out_.records.push_back({work_.pair.id, stage, std::move(payload), 0});
    stage_ = stage;
  }

  const json& payload(Stage stage) const {
    for (const auto* list : {&out_.records, &work_.history}) {
      for (auto it = list->rbegin(); it != list->rend(); ++it) {
        if (it->stage == stage) return it->payload;
      }
    }
    throw ParseError("journal has no " + std::string(to_string(stage)) + " record for " + work_.pair.id);
  }

  void filtered(const std::string& at, const std::string& reason, json extra = json::object()) {
    extra["stage"] = at;
    extra["reason"] = reason;
    emit(Stage::kFilteredOut, std::move(extra));
  }

  void advance() {
    const auto& pair = work_.pair;
    const auto& llm = config_.llm;
    if (!stage_) emit(Stage::kIngested, {{"pair", corpus::to_json(pair)}});

    if (stage_ == Stage::kIngested) {
      try {
        auto desc = descriptor::build_descriptor(pair, client_, llm.stage("descriptor"),
                                                 static_cast<std::size_t>(config_.pipeline.context_radius));
        emit(Stage::kDescriptorBuilt, {{"descriptor", descriptor::to_json(desc)}});
      } catch (const descriptor::DescriptorError& e) {
        return filtered("descriptor", e.what());
      } catch (const PreconditionError& e) {
        return filtered("descriptor", e.what());
      }
    }
    const auto desc = descriptor::descriptor_from_json(payload(Stage::kDescriptorBuilt).at("descriptor"));

    if (stage_ == Stage::kDescriptorBuilt) {
      auto verdict = descriptor::assess_transferability(desc, pair.lang, target_, client_, llm.stage("transferability"));
      if (!verdict.transferable) return filtered("transferability", "not transferable", {{"verdict", to_json(verdict)}});
      emit(Stage::kTransferable, {{"verdict", to_json(verdict)}});
    }

    if (stage_ == Stage::kTransferable) {
      testgen::SuiteParams params{config_.pipeline.tau, config_.pipeline.input_batch, config_.pipeline.input_rounds,
                                  llm.stage("testgen")};
      testgen::SuiteOutcome suite;
      try {
        suite = testgen::generate_suite(pair, client_, sandbox_, params);
      } catch (const testgen::StageError& e) {
        return filtered("testgen", e.what());
      } catch (const testgen::SourceCompileError& e) {
        return filtered("testgen", e.what());
      }
      if (!suite.admitted) {
        return filtered("testgen", "coverage gate",
                        {{"line_pct", suite.suite.coverage.line_pct},
                         {"branch_pct", suite.suite.coverage.branch_pct},
                         {"tau", params.tau},
                         {"cases", suite.suite.cases.size()},
                         {"rounds", suite.rounds_used},
                         {"diagnostics", suite.diagnostics}});
      }
      if (!config_.paths.suites.empty()) {
        std::filesystem::create_directories(config_.paths.suites);
        testgen::write_suite(config_.paths.suites / (file_stem_for(pair.id) + ".jsonl"), suite.suite);
      }
      emit(Stage::kTestsGenerated,
           {{"suite", testgen::to_json(suite.suite)}, {"rounds", suite.rounds_used}, {"diagnostics", suite.diagnostics}});
    }
    const auto suite = testgen::suite_from_json(payload(Stage::kTestsGenerated).at("suite"));

    if (stage_ == Stage::kTestsGenerated) {
      auto result = translate::translate_fixed(pair, desc, target_, suite, client_, sandbox_, config_.pipeline.m,
                                               llm.stage("translate"));
      json attempts = json::array();
      for (const auto& a : result.attempts) attempts.push_back(translate::summary_json(a));
      if (!result.program) {
        emit(Stage::kTranslationFailed, {{"attempts", std::move(attempts)}, {"m", config_.pipeline.m}});
        return;
      }
      emit(Stage::kTranslated,
           {{"selected", result.selected}, {"program", *result.program}, {"attempts", std::move(attempts)}});
    }
    const json translated = payload(Stage::kTranslated);
    const std::string tgt_fixed = translated.at("program").get<std::string>();

    if (stage_ == Stage::kTranslated) {
      if (!inject_defect(desc, suite, tgt_fixed)) return;
    }

    if (stage_ == Stage::kInjected) {
      const json injected = payload(Stage::kInjected);
      corpus::TargetPair tgt{pair.id, target_, injected.at("buggy").get<std::string>(), tgt_fixed,
                             {translated.at("selected").get<std::uint32_t>(), injected.at("winner").get<std::uint32_t>()}};
      std::vector<std::string> expected;
      for (const auto& c : suite.cases) expected.push_back(c.expected);
      auto problems = verify_quad(tgt, suite.inputs(), expected,
                                  injected.at("trigger").get<std::vector<std::string>>(), sandbox_);
      if (!problems.empty()) {
        emit(Stage::kInjectionFailed, {{"reason", "verification failed"}, {"problems", problems}});
        return;
      }
      emit(Stage::kQuadVerified, {{"target", corpus::to_json(tgt)}});
    }
  }

  bool inject_defect(const descriptor::DefectDescriptor& desc, const testgen::TestSuite& suite,
                     const std::string& tgt_fixed) {
    const auto& pair = work_.pair;
    const auto& llm = config_.llm;
    auto behavior = inject::describe_behavior(desc, pair.lang, client_, llm.stage("behavior"));
    const json behavior_json = to_json(behavior.spec);

    inject::InputSetResult sets;
    try {
      sets = inject::construct_input_sets(pair, behavior.spec, suite, client_, sandbox_,
                                          config_.pipeline.trigger_budget, llm.stage("trigger_inputs"));
    } catch (const testgen::SourceCompileError& e) {
      emit(Stage::kInjectionFailed, {{"reason", e.what()}, {"behavior", behavior_json}});
      return false;
    }
    if (sets.discarded) {
      emit(Stage::kInjectionFailed, {{"reason", sets.reason},
                                     {"behavior", behavior_json},
                                     {"regression", sets.sets.regression.size()},
                                     {"diagnostics", sets.diagnostics}});
      return false;
    }

    auto candidates = inject::generate_candidates(tgt_fixed, desc, behavior.spec, target_, client_, sandbox_,
                                                  config_.pipeline.n, llm.stage("inject"));
    json statuses = json::array();
    bool any = false;
    for (const auto& c : candidates) {
      statuses.push_back({{"candidate", c.index}, {"status", std::string(to_string(c.status))}});
      any = any || c.status != inject::CandidateStatus::kExtractionFailed;
    }
    if (!any) {
      emit(Stage::kInjectionFailed, {{"reason", "no candidate could be extracted"}, {"candidates", statuses}});
      return false;
    }

    auto reference = inject::reference_outcomes(tgt_fixed, target_, sets.sets, sandbox_);
    std::vector<inject::CandidateScore> scores;
    json scores_json = json::array();
    for (const auto& c : candidates) {
      scores.push_back(inject::score_candidate(c, target_, sets.sets, sets.src_buggy, reference, sandbox_));
      scores_json.push_back(to_json(scores.back()));
    }
    json src_categories = json::object();
    for (const auto& [input, outcome] : sets.src_buggy) {
      src_categories[input] = std::string(to_string(outcome.category));
    }
    json common = {{"behavior", behavior_json},
                   {"warnings", behavior.warnings},
                   {"trigger", sets.sets.trigger},
                   {"regression", sets.sets.regression},
                   {"src_buggy_categories", std::move(src_categories)},
                   {"candidates", std::move(statuses)},
                   {"scores", std::move(scores_json)}};

    auto winner = inject::select_buggy(scores);
    if (!winner) {
      common["reason"] = "no candidate reproduces the defect";
      emit(Stage::kInjectionFailed, std::move(common));
      return false;
    }
    common["winner"] = candidates[*winner].index;
    common["buggy"] = candidates[*winner].program;
    emit(Stage::kInjected, std::move(common));
    return true;
  }

  const Config& config_;
  const LanguageId& target_;
  llm::Client& client_;
  sandbox::Sandbox& sandbox_;
  PairWork work_;
  std::optional<Stage> stage_;
  PairOutcome out_;
};

}  // namespace

RunSummary run_pipeline(const Config& config, corpus::Journal& journal, llm::Client& client,
                        sandbox::Sandbox& sandbox, const RunOptions& options) {
  RunSummary summary;
  auto ingested = corpus::ingest(config.paths.input, config.pipeline.source_lang);
  summary.ingest_diagnostics = ingested.diagnostics;

  const auto state = journal.snapshot();
  std::vector<PairWork> work;
  std::set<std::string> queued;
  for (auto& pair : ingested.pairs) {
    auto it = state->find(pair.id);
    if (it != state->end() && corpus::is_terminal(it->second.stage)) continue;
    if (!queued.insert(pair.id).second) continue;
    if (it == state->end()) {
      work.push_back({std::move(pair), {}});
    } else {
      auto lineage = journal.lineage(pair.id);
      auto stored = corpus::source_pair_from_json(lineage.front().payload.at("pair"));
      work.push_back({std::move(stored), std::move(lineage)});
    }
  }
  for (const auto& id : corpus::pending_pairs(*state)) {
    if (!queued.insert(id).second) continue;
    auto lineage = journal.lineage(id);
    auto stored = corpus::source_pair_from_json(lineage.front().payload.at("pair"));
    work.push_back({std::move(stored), std::move(lineage)});
  }

  if (work.empty()) {
    summary.nothing_to_do = true;
    summary.funnel = funnel_from_records(journal.records());
    return summary;
  }

  std::vector<std::optional<PairOutcome>> results(work.size());
  std::mutex mu;
  std::condition_variable cv;
  std::atomic<std::size_t> next{0};
  std::atomic<bool> abort{false};

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= work.size()) return;
      PairOutcome outcome;
      if (!abort.load()) {
        outcome = PairRunner(config, options.target, client, sandbox, work[i]).run();
        if (outcome.replay_miss) abort.store(true);
      }
      {
        std::lock_guard lock(mu);
        results[i] = std::move(outcome);
      }
      cv.notify_all();
    }
  };

  const int n_threads = std::max(1, std::min<int>(options.workers, static_cast<int>(work.size())));
  std::vector<std::jthread> threads;
  for (int t = 0; t < n_threads; ++t) threads.emplace_back(worker);

  for (std::size_t i = 0; i < work.size(); ++i) {
    PairOutcome outcome;
    {
      std::unique_lock lock(mu);
      cv.wait(lock, [&] { return results[i].has_value(); });
      outcome = std::move(*results[i]);
    }
    const auto& id = work[i].pair.id;
    if (!outcome.records.empty()) {
      summary.records_written += outcome.records.size();
      ++summary.pairs_processed;
      const auto last = outcome.records.back().stage;
      journal.append_batch(std::move(outcome.records));
      if (options.progress) options.progress(id + ": " + std::string(to_string(last)));
    }
    if (outcome.incomplete) {
      summary.incomplete.emplace_back(id, *outcome.incomplete);
      if (options.progress) options.progress(id + ": incomplete (" + *outcome.incomplete + ")");
    }
    if (outcome.replay_miss && !summary.replay_miss) summary.replay_miss = outcome.replay_miss;
  }
  threads.clear();

  summary.funnel = funnel_from_records(journal.records());
  return summary;
}

std::string render_lineage(const std::vector<PipelineRecord>& lineage) {
  std::ostringstream out;
  for (const auto& r : lineage) {
    const auto& p = r.payload;
    out << '#' << r.timestamp << ' ' << to_string(r.stage) << '\n';
    switch (r.stage) {
      case Stage::kIngested:
        out << "  lang: " << p.at("pair").value("lang", "") << '\n';
        break;
      case Stage::kDescriptorBuilt: {
        const auto& d = p.at("descriptor");
        out << "  defect_type: " << d.value("defect_type", "") << '\n'
            << "  root_cause: " << d.value("root_cause", "") << '\n'
            << "  hunks: " << d.at("diff").at("hunks").size() << '\n';
        break;
      }
      case Stage::kTransferable:
        out << "  rationale: " << p.at("verdict").value("rationale", "") << '\n';
        break;
      case Stage::kTestsGenerated: {
        const auto& s = p.at("suite");
        out << "  cases: " << s.at("cases").size() << ", line " << s.value("line_pct", 0.0) << "%, branch "
            << s.value("branch_pct", 0.0) << "%, tau " << s.value("tau", 0.0) << ", rounds " << p.value("rounds", 0)
            << '\n';
        break;
      }
      case Stage::kTranslated:
      case Stage::kTranslationFailed:
        if (r.stage == Stage::kTranslated) out << "  j*: " << p.value("selected", 0) << '\n';
        for (const auto& a : p.at("attempts")) {
          out << "  attempt " << a.value("attempt", 0) << ": " << a.value("status", "") << " ("
              << a.value("cases_passed", 0) << '/' << a.value("cases_total", 0) << ")\n";
        }
        break;
      case Stage::kInjected:
      case Stage::kInjectionFailed:
        if (p.contains("behavior")) {
          out << "  behavior: " << p["behavior"].value("expected_category", "") << " when "
              << p["behavior"].value("trigger_condition", "") << '\n';
        }
        if (p.contains("trigger")) {
          out << "  inputs: " << p["trigger"].size() << " trigger, " << p["regression"].size() << " regression\n";
        }
        if (p.contains("scores")) {
          const auto& statuses = p.at("candidates");
          for (std::size_t i = 0; i < p["scores"].size(); ++i) {
            const auto& s = p["scores"][i];
            out << "  candidate " << s.value("candidate", 0) << " (" << statuses.at(i).value("status", "")
                << "): n_defect " << s.value("n_defect", 0) << ", n_reg " << s.value("n_reg", 0) << '\n';
          }
        }
        if (p.contains("winner")) out << "  selected: candidate " << p["winner"] << '\n';
        if (p.contains("reason")) out << "  reason: " << p["reason"].get<std::string>() << '\n';
        break;
      case Stage::kFilteredOut:
        out << "  at: " << p.value("stage", "") << ", reason: " << p.value("reason", "") << '\n';
        if (p.contains("verdict")) out << "  rationale: " << p["verdict"].value("rationale", "") << '\n';
        if (p.contains("line_pct")) {
          out << "  line " << p["line_pct"] << "%, branch " << p["branch_pct"] << "%, tau " << p["tau"] << '\n';
        }
        break;
      case Stage::kQuadVerified: {
        const auto& t = p.at("target");
        out << "  target: " << t.value("lang", "") << ", provenance " << t.at("provenance").dump() << '\n';
        break;
      }
    }
  }
  return out.str();
}

}  // namespace xlr::pipeline
