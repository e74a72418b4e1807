// xlr: pipeline driver, curriculum emitter, evaluator and journal inspector.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>

#include "xlr/config.hpp"
#include "xlr/corpus/journal.hpp"
#include "xlr/curriculum/curriculum.hpp"
#include "xlr/error.hpp"
#include "xlr/eval/report.hpp"
#include "xlr/llm/cache.hpp"
#include "xlr/llm/client.hpp"
#include "xlr/llm/template.hpp"
#include "xlr/llm/transports.hpp"
#include "xlr/pipeline.hpp"
#include "xlr/sandbox/sandbox.hpp"

namespace {

enum Exit : int {
  kOk = 0,
  kInternal = 1,
  kUsage = 2,
  kConfig = 3,
  kReplayMiss = 4,
  kEnvironment = 5,
  kPartial = 6,
  kNotFound = 7,
  kIneligible = 8,
  kData = 9,
};

struct Common {
  std::string config;
  std::string journal;
  std::string target;
};

xlr::LanguageId pick_target(const xlr::Config& cfg, const std::string& flag) {
  if (!flag.empty()) return xlr::LanguageId(flag);
  if (cfg.pipeline.target_langs.empty()) {
    throw xlr::ConfigError({"pipeline.target_langs: empty and no --target-lang given"});
  }
  return cfg.pipeline.target_langs.front();
}

std::filesystem::path journal_path(const xlr::Config& cfg, const Common& c, const xlr::LanguageId& target) {
  if (!c.journal.empty()) return c.journal;
  if (cfg.paths.journals.empty()) throw xlr::ConfigError({"paths.journals: required when --journal is not given"});
  return cfg.paths.journals / ("journal." + target.name() + ".jsonl");
}

xlr::sandbox::Sandbox make_sandbox(const xlr::Config& cfg) {
  return xlr::sandbox::Sandbox(cfg.toolchains, {cfg.paths.scratch, cfg.pipeline.sandbox_workers});
}

int cmd_run(const Common& c, const std::string& mode, int workers, const std::string& cache_flag) {
  auto cfg = xlr::load_config(c.config);
  const auto target = pick_target(cfg, c.target);
  if (auto diags = xlr::check_run(cfg, target); !diags.empty()) throw xlr::ConfigError(diags);
  const std::filesystem::path cache_path = cache_flag.empty() ? cfg.paths.cache : std::filesystem::path(cache_flag);
  if (cache_path.empty()) throw xlr::ConfigError({"paths.cache: required when --cache is not given"});

  xlr::llm::TemplateStore templates(cfg.paths.templates);
  xlr::llm::ReplayCache cache(cache_path);
  std::unique_ptr<xlr::llm::Transport> transport;
  std::unique_ptr<xlr::llm::RateLimiter> limiter;
  const auto llm_mode = mode == "record" ? xlr::llm::Mode::kRecord : xlr::llm::Mode::kReplay;
  if (llm_mode == xlr::llm::Mode::kRecord) {
    if (cfg.llm.backend == "scripted") {
      transport = std::make_unique<xlr::llm::ScriptedTransport>(cfg.llm.transcript);
    } else {
      transport = std::make_unique<xlr::llm::HttpChatTransport>(xlr::llm::HttpEndpoint{
          cfg.llm.base_url, cfg.llm.path, cfg.llm.model, cfg.llm.api_key_env,
          static_cast<int>(cfg.llm.timeout_s)});
    }
    limiter = std::make_unique<xlr::llm::RateLimiter>(cfg.llm.max_in_flight, cfg.llm.requests_per_minute);
  }
  xlr::llm::RetryPolicy retry;
  retry.max_attempts = cfg.llm.max_attempts;
  retry.initial_backoff = std::chrono::milliseconds(cfg.llm.initial_backoff_ms);
  xlr::llm::CachingClient client(templates, cache, llm_mode, transport.get(), retry, limiter.get());

  auto sandbox = make_sandbox(cfg);
  const auto jpath = journal_path(cfg, c, target);
  if (jpath.has_parent_path()) std::filesystem::create_directories(jpath.parent_path());
  xlr::corpus::Journal journal(jpath);
  for (const auto& w : journal.warnings()) std::cerr << "warning: " << w << '\n';
  if (cfg.paths.suites.empty()) cfg.paths.suites = jpath.parent_path() / ("suites." + target.name());

  xlr::pipeline::RunOptions options;
  options.target = target;
  options.workers = workers > 0 ? workers : cfg.pipeline.workers;
  options.progress = [](const std::string& line) { std::cerr << line << '\n'; };
  auto summary = xlr::pipeline::run_pipeline(cfg, journal, client, sandbox, options);

  for (const auto& d : summary.ingest_diagnostics) {
    std::cerr << cfg.paths.input.string() << ':' << d.line << ": " << d.reason << '\n';
  }
  if (summary.nothing_to_do) std::cout << "nothing to do\n";
  std::cout << xlr::pipeline::render_funnel(summary.funnel);
  if (summary.replay_miss) {
    std::cerr << "replay miss: no recorded reply for fingerprint " << *summary.replay_miss << '\n';
    return kReplayMiss;
  }
  if (!summary.incomplete.empty()) {
    for (const auto& [id, why] : summary.incomplete) std::cerr << "incomplete: " << id << ": " << why << '\n';
    return kPartial;
  }
  return kOk;
}

int cmd_emit(const Common& c, const std::string& out_flag, std::vector<int> stages) {
  auto cfg = xlr::load_config(c.config);
  const auto target = pick_target(cfg, c.target);
  const auto jpath = journal_path(cfg, c, target);
  auto replayed = xlr::corpus::replay(jpath);
  for (const auto& w : replayed.warnings) std::cerr << "warning: " << w << '\n';
  const auto view = xlr::corpus::corpus_from_records(replayed.records);

  std::filesystem::path out = out_flag;
  if (out.empty()) {
    if (cfg.paths.curriculum.empty()) throw xlr::ConfigError({"paths.curriculum: required when --out is not given"});
    out = cfg.paths.curriculum / target.name();
  }
  xlr::llm::TemplateStore templates(cfg.paths.templates);
  if (stages.empty()) stages = {1, 2, 3};
  int rc = kOk;
  for (int s : stages) {
    try {
      auto n = xlr::curriculum::emit_stage(s, view, templates, out);
      std::cout << "stage" << s << ".jsonl " << n << " records\n";
    } catch (const xlr::curriculum::EligibilityError& e) {
      std::cerr << "error: " << e.what() << '\n';
      rc = kIneligible;
    }
  }
  return rc;
}

int cmd_evaluate(const std::string& config, const std::string& patches, const std::string& target_flag,
                 const std::string& source_flag, const std::string& json_out, const std::string& label) {
  auto cfg = xlr::load_config(config);
  xlr::eval::EvalOptions options;
  options.target = pick_target(cfg, target_flag);
  options.source = source_flag.empty() ? cfg.pipeline.source_lang : xlr::LanguageId(source_flag);
  options.linter = cfg.linter;
  options.scratch_root = cfg.paths.scratch;
  std::vector<std::string> diags;
  for (const auto& l : {options.target, options.source}) {
    if (!cfg.toolchains.contains(l)) diags.push_back("no toolchain profile named \"" + l.name() + "\"");
  }
  if (!diags.empty()) throw xlr::ConfigError(diags);

  auto sets = xlr::eval::read_patch_sets(patches);
  auto sandbox = make_sandbox(cfg);
  auto report = xlr::eval::evaluate(sets, &sandbox, options);
  std::cout << xlr::eval::render_table(report, label);
  if (!json_out.empty()) {
    std::ofstream out(json_out, std::ios::binary | std::ios::trunc);
    out << xlr::eval::to_json(report).dump(2) << '\n';
    if (!out) throw xlr::EnvironmentError("cannot write " + json_out);
  }
  return kOk;
}

int cmd_inspect(const Common& c, const std::string& pair) {
  auto cfg = xlr::load_config(c.config);
  const auto target = pick_target(cfg, c.target);
  auto replayed = xlr::corpus::replay(journal_path(cfg, c, target));
  for (const auto& w : replayed.warnings) std::cerr << "warning: " << w << '\n';
  if (pair.empty()) {
    std::cout << xlr::pipeline::render_funnel(xlr::pipeline::funnel_from_records(replayed.records));
    return kOk;
  }
  std::vector<xlr::corpus::PipelineRecord> lineage;
  for (auto& r : replayed.records) {
    if (r.pair_id == pair) lineage.push_back(std::move(r));
  }
  if (lineage.empty()) {
    std::cerr << "not found: no journal records for pair " << pair << '\n';
    return kNotFound;
  }
  std::cout << "pair " << pair << '\n' << xlr::pipeline::render_lineage(lineage);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cross-language repair-pair synthesis pipeline"};
  app.require_subcommand(1);

  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config, "Config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--journal", common.journal, "Journal file (default: <paths.journals>/journal.<target>.jsonl)");
    sub->add_option("--target-lang", common.target, "Target language (default: first of pipeline.target_langs)");
  };

  auto* run = app.add_subcommand("run", "Run or resume the synthesis pipeline");
  add_common(run);
  std::string mode = "replay";
  int workers = 0;
  std::string cache;
  run->add_option("--mode", mode, "replay or record")->check(CLI::IsMember({"replay", "record"}));
  run->add_option("--workers", workers, "Pairs processed concurrently (default: pipeline.workers)");
  run->add_option("--cache", cache, "Replay cache file (default: paths.cache)");

  auto* emit = app.add_subcommand("emit-curriculum", "Write stage1/2/3.jsonl and manifest.json");
  add_common(emit);
  std::string out;
  std::vector<int> stages;
  emit->add_option("--out", out, "Output directory (default: <paths.curriculum>/<target>)");
  emit->add_option("--stage", stages, "Stages to emit (default: 1 2 3)")->check(CLI::Range(1, 3));

  auto* evaluate = app.add_subcommand("evaluate", "Score a patch file: Pass@k, CR_T, CR_S, SVD, BLEU-4, ROUGE-1");
  std::string eval_config, patches, eval_target, eval_source, json_out, label = "model";
  evaluate->add_option("--config", eval_config, "Config file")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--patches", patches, "JSONL of {task_id, patches, passed?|tests?, reference?}")
      ->required()
      ->check(CLI::ExistingFile);
  evaluate->add_option("--target-lang", eval_target, "Language the patches should be written in");
  evaluate->add_option("--source-lang", eval_source, "Language checked for interference (default: pipeline.source_lang)");
  evaluate->add_option("--json", json_out, "Also write the report as JSON");
  evaluate->add_option("--label", label, "Row label in the table");

  auto* inspect = app.add_subcommand("inspect", "Show the funnel, or one pair's lineage");
  add_common(inspect);
  std::string pair;
  inspect->add_option("--pair", pair, "Pair id");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*run) return cmd_run(common, mode, workers, cache);
    if (*emit) return cmd_emit(common, out, stages);
    if (*evaluate) return cmd_evaluate(eval_config, patches, eval_target, eval_source, json_out, label);
    if (*inspect) return cmd_inspect(common, pair);
  } catch (const xlr::ConfigError& e) {
    std::cerr << "config error:\n";
    for (const auto& d : e.diagnostics()) std::cerr << "  " << d << '\n';
    return kConfig;
  } catch (const xlr::llm::ReplayMissError& e) {
    std::cerr << e.what() << '\n';
    return kReplayMiss;
  } catch (const xlr::EnvironmentError& e) {
    std::cerr << "environment error: " << e.what() << '\n';
    return kEnvironment;
  } catch (const xlr::JournalError& e) {
    std::cerr << "journal error: " << e.what() << '\n';
    return kData;
  } catch (const xlr::ParseError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const xlr::PreconditionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternal;
  }
  return kUsage;
}
