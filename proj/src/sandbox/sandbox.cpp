#include "xlr/sandbox/sandbox.hpp"

#include <cmath>
#include <fstream>
#include <regex>
#include <sstream>

#include "xlr/error.hpp"
#include "xlr/hash.hpp"
#include "xlr/text.hpp"

namespace xlr::sandbox {

namespace fs = std::filesystem;

struct Sandbox::Artifact {
  std::unique_ptr<ScratchDir> dir;
  fs::path src;
  fs::path bin;
  bool ok = false;
  std::string diagnostics;
};

namespace {

void write_file(const fs::path& p, std::string_view content) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw EnvironmentError("cannot write " + p.string());
}

std::string content_key(const LanguageId& lang, std::string_view program) {
  return FieldHasher().add(lang.name()).add(program).hex();
}

bool exited_cleanly(const ProcessResult& r) { return !r.timed_out && r.term_signal == 0 && r.exit_code == 0; }

}  // namespace

std::string normalize_stdout(std::string_view s) { return text::normalize_output(s); }

Category classify(const ProcessResult& result, const ClassifierHints& hints,
                  const std::optional<std::string>& expected, const std::string& normalized_stdout) {
  if (result.timed_out) return Category::kTimeout;
  if (result.term_signal == 0 && result.exit_code == 0) {
    if (!expected) return Category::kPass;
    return normalized_stdout == normalize_stdout(*expected) ? Category::kPass : Category::kWrongOutput;
  }
  // Abnormal termination. A structured runtime-error report makes it an
  // exception even when the runtime then aborts (C++ terminate -> SIGABRT).
  if (result.term_signal == 0) {
    for (int code : hints.exception_exit_codes) {
      if (code == result.exit_code) return Category::kException;
    }
  }
  for (const auto& pattern : hints.exception_stderr_patterns) {
    if (std::regex_search(result.stderr_text, std::regex(pattern))) return Category::kException;
  }
  return Category::kCrash;
}

CoverageReport parse_gcov_summary(std::string_view output, std::string_view source_name) {
  const auto lines = text::split_lines(output);
  static const std::regex kFile(R"(^File '(.*)'\s*$)");
  static const std::regex kStat(R"(^([A-Za-z ]+):\s*([0-9.]+)% of ([0-9]+)\s*$)");
  bool in_block = false;
  bool found = false;
  std::optional<std::pair<double, std::size_t>> lines_stat, branches_exec, taken;
  bool no_branches = false;
  bool no_lines = false;
  for (const auto& raw : lines) {
    std::smatch m;
    const std::string line = text::trim(raw);
    if (std::regex_match(line, m, kFile)) {
      if (found && in_block) break;
      in_block = fs::path(m[1].str()).filename() == fs::path(std::string(source_name)).filename();
      found = found || in_block;
      continue;
    }
    if (!in_block) continue;
    if (line == "No branches") no_branches = true;
    if (line == "No executable lines") no_lines = true;
    if (std::regex_match(line, m, kStat)) {
      const std::pair<double, std::size_t> stat{std::stod(m[2].str()), std::stoul(m[3].str())};
      const std::string key = m[1].str();
      if (key == "Lines executed") lines_stat = stat;
      else if (key == "Branches executed") branches_exec = stat;
      else if (key == "Taken at least once") taken = stat;
    }
  }
  if (!found || (!lines_stat && !no_lines)) {
    throw ParseError("unparseable coverage report for " + std::string(source_name) + ":\n" +
                     std::string(output));
  }
  // Recover exact counts from the rounded percentages.
  auto exact = [](const std::pair<double, std::size_t>& s) {
    if (s.second == 0) return 100.0;
    const double covered = std::round(s.first * static_cast<double>(s.second) / 100.0);
    return covered / static_cast<double>(s.second) * 100.0;
  };
  CoverageReport report;
  if (lines_stat) {
    report.line_pct = exact(*lines_stat);
    report.lines_total = lines_stat->second;
  } else {
    report.line_pct = 100.0;
  }
  const auto& branch = taken ? taken : branches_exec;
  if (branch && !no_branches) {
    report.branch_pct = exact(*branch);
    report.branches_total = branch->second;
  } else {
    report.branch_pct = 100.0;
  }
  return report;
}

Sandbox::Sandbox(std::map<LanguageId, ToolchainProfile> profiles, SandboxOptions options)
    : profiles_(std::move(profiles)),
      options_(std::move(options)),
      slots_(std::max(1, options_.workers)),
      build_root_(std::make_unique<ScratchDir>(options_.scratch_root)) {}

Sandbox::~Sandbox() = default;

bool Sandbox::has_profile(const LanguageId& lang) const { return profiles_.contains(lang); }

const ToolchainProfile& Sandbox::profile(const LanguageId& lang) const {
  auto it = profiles_.find(lang);
  if (it == profiles_.end()) {
    throw PreconditionError("no toolchain profile registered for language '" + lang.name() + "'");
  }
  return it->second;
}

ProcessResult Sandbox::run_limited(const std::vector<std::string>& argv, const fs::path& cwd,
                                   const fs::path& io_dir, std::string_view input,
                                   const ProcessLimits& limits) {
  slots_.acquire();
  try {
    auto r = run_process(argv, cwd, io_dir, input, limits);
    slots_.release();
    return r;
  } catch (...) {
    slots_.release();
    throw;
  }
}

std::shared_ptr<const Sandbox::Artifact> Sandbox::build(std::string_view program, const LanguageId& lang) {
  const auto& prof = profile(lang);
  const std::string key = content_key(lang, program);
  std::promise<std::shared_ptr<const Artifact>> promise;
  std::shared_future<std::shared_ptr<const Artifact>> pending;
  {
    std::lock_guard lock(mu_);
    if (auto it = builds_.find(key); it != builds_.end()) {
      pending = it->second;
    } else {
      builds_.emplace(key, promise.get_future().share());
    }
  }
  if (pending.valid()) return pending.get();

  try {
    auto art = std::make_shared<Artifact>();
    art->dir = std::make_unique<ScratchDir>(build_root_->path());
    art->src = art->dir->path() / ("main" + prof.source_ext);
    art->bin = art->dir->path() / "main";
    write_file(art->src, program);
    if (prof.compiled()) {
      const auto argv = substitute(prof.compile_cmd, {{"src", art->src.string()},
                                                      {"bin", art->bin.string()},
                                                      {"dir", art->dir->path().string()},
                                                      {"input", ""}});
      ProcessLimits limits;
      limits.wall_timeout_s = prof.compile_timeout_s;
      auto r = run_limited(argv, art->dir->path(), art->dir->path(), "", limits);
      art->ok = exited_cleanly(r);
      art->diagnostics = r.timed_out ? "compilation timed out" : r.stderr_text + r.stdout_text;
    } else {
      art->ok = true;
    }
    std::shared_ptr<const Artifact> result = std::move(art);
    promise.set_value(result);
    return result;
  } catch (...) {
    promise.set_exception(std::current_exception());
    std::lock_guard lock(mu_);
    builds_.erase(key);
    throw;
  }
}

SyntaxResult Sandbox::syntax_check(std::string_view program, const LanguageId& lang) {
  const auto& prof = profile(lang);
  const std::string key = content_key(lang, program);
  {
    std::lock_guard lock(mu_);
    if (auto it = syntax_cache_.find(key); it != syntax_cache_.end()) return it->second;
  }
  SyntaxResult result;
  if (prof.compiled()) {
    auto art = build(program, lang);
    result = {art->ok, art->diagnostics};
  } else if (prof.syntax_cmd.empty()) {
    result = {true, ""};
  } else {
    ScratchDir dir(options_.scratch_root);
    const fs::path src = dir.path() / ("main" + prof.source_ext);
    write_file(src, program);
    const auto argv = substitute(prof.syntax_cmd, {{"src", src.string()}, {"dir", dir.path().string()},
                                                   {"bin", ""}, {"input", ""}});
    ProcessLimits limits;
    limits.wall_timeout_s = prof.compile_timeout_s;
    auto r = run_limited(argv, dir.path(), dir.path(), "", limits);
    result = {exited_cleanly(r), r.timed_out ? "syntax check timed out" : r.stderr_text + r.stdout_text};
  }
  std::lock_guard lock(mu_);
  syntax_cache_.emplace(key, result);
  return result;
}

ExecutionOutcome Sandbox::execute(std::string_view program, const LanguageId& lang, std::string_view input,
                                  const std::optional<std::string>& expected) {
  const auto& prof = profile(lang);
  auto art = build(program, lang);
  ExecutionOutcome outcome;
  if (!art->ok) {
    outcome.category = Category::kCompileError;
    outcome.stderr_text = art->diagnostics;
    return outcome;
  }

  auto attempt = [&]() {
    ScratchDir run_dir(options_.scratch_root);
    const fs::path work = run_dir.path() / "work";
    fs::create_directory(work);
    const auto argv = substitute(prof.run_cmd, {{"src", art->src.string()},
                                                {"bin", art->bin.string()},
                                                {"input", (run_dir.path() / ".stdin").string()},
                                                {"dir", work.string()}});
    ProcessLimits limits;
    limits.wall_timeout_s = prof.run_timeout_s;
    limits.cpu_limit_s = prof.run_timeout_s + 1.0;
    limits.memory_bytes = prof.memory_limit_bytes;
    return run_limited(argv, work, run_dir.path(), input, limits);
  };

  ProcessResult r;
  try {
    r = attempt();
  } catch (const EnvironmentError&) {
    r = attempt();
  }
  outcome.stdout_text = normalize_stdout(r.stdout_text);
  outcome.stderr_text = r.stderr_text;
  outcome.exit_code = r.term_signal != 0 ? 128 + r.term_signal : r.exit_code;
  outcome.duration_s = r.duration_s;
  outcome.category = classify(r, prof.hints, expected, outcome.stdout_text);
  return outcome;
}

CoverageReport Sandbox::measure_coverage(std::string_view program, const LanguageId& lang,
                                         std::span<const std::string> inputs) {
  const auto& prof = profile(lang);
  if (!prof.coverage) {
    throw PreconditionError("language '" + lang.name() + "' has no coverage-instrumented profile");
  }
  if (inputs.empty()) throw PreconditionError("empty suite");

  ScratchDir dir(options_.scratch_root);
  const std::string name = "main" + prof.source_ext;
  const fs::path src = dir.path() / name;
  const fs::path bin = dir.path() / "main";
  write_file(src, program);
  std::map<std::string, std::string> values{
      {"src", src.string()}, {"bin", bin.string()}, {"dir", dir.path().string()}, {"input", ""}};

  ProcessLimits build_limits;
  build_limits.wall_timeout_s = prof.compile_timeout_s;
  auto compiled = run_limited(substitute(prof.coverage->compile_cmd, values), dir.path(), dir.path(), "",
                              build_limits);
  if (!exited_cleanly(compiled)) {
    throw Error("coverage build failed:\n" + compiled.stderr_text);
  }

  const fs::path work = dir.path() / "work";
  fs::create_directory(work);
  ProcessLimits run_limits;
  run_limits.wall_timeout_s = prof.run_timeout_s;
  run_limits.cpu_limit_s = prof.run_timeout_s + 1.0;
  run_limits.memory_bytes = prof.memory_limit_bytes;
  for (const auto& input : inputs) {
    values["input"] = (dir.path() / ".stdin").string();
    values["dir"] = work.string();
    run_limited(substitute(prof.run_cmd, values), work, dir.path(), input, run_limits);
  }
  values["dir"] = dir.path().string();
  auto report = run_limited(substitute(prof.coverage->report_cmd, values), dir.path(), dir.path(), "",
                            build_limits);
  return parse_gcov_summary(report.stdout_text, name);
}

}  // namespace xlr::sandbox
