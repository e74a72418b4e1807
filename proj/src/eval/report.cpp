#include "xlr/eval/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "xlr/error.hpp"
#include "xlr/eval/metrics.hpp"
#include "xlr/sandbox/process.hpp"
#include "xlr/sandbox/profile.hpp"
#include "xlr/text.hpp"

namespace xlr::eval {

std::vector<PatchSet> read_patch_sets(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw EnvironmentError("cannot read patch file " + path.string());
  std::vector<PatchSet> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    try {
      auto j = nlohmann::json::parse(line);
      PatchSet s;
      s.task_id = j.at("task_id").get<std::string>();
      s.patches = j.at("patches").get<std::vector<std::string>>();
      if (j.contains("passed")) s.passed = j["passed"].get<std::vector<bool>>();
      if (j.contains("tests")) {
        for (const auto& t : j["tests"]) s.tests.push_back({t.at("input").get<std::string>(), t.at("expected").get<std::string>()});
      }
      if (j.contains("reference") && j["reference"].is_string()) s.reference = j["reference"].get<std::string>();
      if (s.patches.empty()) throw ParseError("no patches");
      if (!s.passed.empty() && s.passed.size() != s.patches.size()) throw ParseError("passed and patches differ in length");
      out.push_back(std::move(s));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    } catch (const ParseError& e) {
      throw ParseError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

CompilationRates compilation_rates(const std::vector<PatchSet>& sets, sandbox::SyntaxChecker& checker,
                                   const LanguageId& target, const LanguageId& source) {
  if (sets.empty()) throw PreconditionError("compilation_rates: no patch sets");
  std::size_t target_ok = 0, source_only = 0;
  for (const auto& s : sets) {
    if (s.patches.empty()) throw PreconditionError("compilation_rates: task " + s.task_id + " has no patches");
    const auto& top1 = s.patches.front();
    if (checker.syntax_check(top1, target).ok) {
      ++target_ok;
    } else if (checker.syntax_check(top1, source).ok) {
      ++source_only;
    }
  }
  const double total = static_cast<double>(sets.size());
  return {100.0 * static_cast<double>(target_ok) / total, 100.0 * static_cast<double>(source_only) / total};
}

std::size_t count_violations(const nlohmann::json& report, const std::string& key, const std::string& prefix) {
  std::size_t n = 0;
  if (report.is_object()) {
    if (auto it = report.find(key); it != report.end() && it->is_string() &&
                                    it->get<std::string>().starts_with(prefix)) {
      ++n;
    }
    for (const auto& [k, v] : report.items()) n += count_violations(v, key, prefix);
  } else if (report.is_array()) {
    for (const auto& v : report) n += count_violations(v, key, prefix);
  }
  return n;
}

std::optional<double> svd(const std::vector<std::string>& patches, const LinterSpec& linter,
                          const std::filesystem::path& scratch_root) {
  std::size_t loc = 0;
  for (const auto& p : patches) loc += text::count_nonblank_lines(p);
  if (loc == 0) throw PreconditionError("no code");
  if (linter.cmd.empty() || sandbox::find_executable(linter.cmd.front()).empty()) return std::nullopt;

  std::filesystem::create_directories(scratch_root);
  std::size_t violations = 0;
  for (std::size_t i = 0; i < patches.size(); ++i) {
    sandbox::ScratchDir dir(scratch_root);
    const auto file = dir.path() / ("patch" + std::to_string(i) + linter.file_ext);
    {
      std::ofstream out(file, std::ios::binary);
      out << patches[i];
    }
    auto argv = sandbox::substitute(linter.cmd, {{"file", file.string()}});
    sandbox::ProcessLimits limits;
    limits.wall_timeout_s = linter.timeout_s;
    auto r = sandbox::run_process(argv, dir.path(), dir.path(), "", limits);
    nlohmann::json report;
    try {
      report = nlohmann::json::parse(r.stdout_text);
    } catch (const nlohmann::json::exception&) {
      throw ParseError("linter output is not JSON: " + r.stdout_text.substr(0, 500));
    }
    violations += count_violations(report, linter.violation_key, linter.category_prefix);
  }
  return svd_density(violations, loc);
}

std::vector<bool> correctness(const PatchSet& set, sandbox::Sandbox* sandbox, const LanguageId& target) {
  if (!set.passed.empty()) return set.passed;
  if (set.tests.empty()) throw PreconditionError("task " + set.task_id + ": neither passed nor tests given");
  if (!sandbox) throw PreconditionError("task " + set.task_id + ": tests need a sandbox");
  std::vector<bool> out;
  for (const auto& p : set.patches) {
    bool ok = true;
    for (const auto& t : set.tests) {
      if (sandbox->execute(p, target, t.input, t.expected).category != sandbox::Category::kPass) {
        ok = false;
        break;
      }
    }
    out.push_back(ok);
  }
  return out;
}

MetricReport evaluate(const std::vector<PatchSet>& sets, sandbox::Sandbox* sandbox, const EvalOptions& options) {
  if (sets.empty()) throw PreconditionError("evaluate: no tasks");
  MetricReport r;
  r.tasks = sets.size();
  for (int k : options.ks) {
    for (const auto& s : sets) {
      if (s.passed.empty() && s.tests.empty()) continue;
      if (s.n() < k) throw PreconditionError("task " + s.task_id + " has " + std::to_string(s.n()) +
                                             " patches, fewer than k=" + std::to_string(k));
    }
  }
  const bool judged = std::all_of(sets.begin(), sets.end(),
                                  [](const PatchSet& s) { return !s.passed.empty() || !s.tests.empty(); });
  // Pass@k needs correctness for every task; without it the column is left out.
  if (judged) {
    std::map<int, double> sums;
    for (const auto& s : sets) {
      auto ok = correctness(s, sandbox, options.target);
      const int c = static_cast<int>(std::count(ok.begin(), ok.end(), true));
      for (int k : options.ks) sums[k] += pass_at_k(s.n(), c, k);
    }
    for (const auto& [k, sum] : sums) r.pass_at[k] = 100.0 * sum / static_cast<double>(sets.size());
  }

  if (sandbox) {
    auto cr = compilation_rates(sets, *sandbox, options.target, options.source);
    r.cr_target = cr.cr_target;
    r.cr_source = cr.cr_source;
  }
  if (options.linter) {
    std::vector<std::string> top1;
    for (const auto& s : sets) top1.push_back(s.patches.front());
    r.svd = svd(top1, *options.linter, options.scratch_root);
  }
  double bleu = 0, rouge = 0;
  std::size_t refs = 0;
  for (const auto& s : sets) {
    if (!s.reference) continue;
    auto sim = text_similarity(s.patches.front(), *s.reference);
    bleu += sim.bleu4;
    rouge += sim.rouge1;
    ++refs;
  }
  if (refs > 0) {
    r.bleu4 = bleu / static_cast<double>(refs);
    r.rouge1 = rouge / static_cast<double>(refs);
  }
  return r;
}

nlohmann::json to_json(const MetricReport& r) {
  nlohmann::json pass = nlohmann::json::object();
  for (const auto& [k, v] : r.pass_at) pass[std::to_string(k)] = v;
  auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  return {{"tasks", r.tasks},          {"pass_at", std::move(pass)}, {"cr_target", opt(r.cr_target)},
          {"cr_source", opt(r.cr_source)}, {"svd", opt(r.svd)},        {"bleu4", opt(r.bleu4)},
          {"rouge1", opt(r.rouge1)}};
}

std::string render_table(const MetricReport& r, const std::string& label) {
  std::vector<std::pair<std::string, std::optional<double>>> cols;
  for (const auto& [k, v] : r.pass_at) cols.emplace_back("P@" + std::to_string(k), v);
  if (r.pass_at.empty()) {
    for (int k : {1, 3, 5}) cols.emplace_back("P@" + std::to_string(k), std::nullopt);
  }
  cols.emplace_back("CR_T", r.cr_target);
  cols.emplace_back("CR_S", r.cr_source);
  if (r.svd) cols.emplace_back("SVD", r.svd);
  if (r.bleu4) cols.emplace_back("BLEU-4", r.bleu4);
  if (r.rouge1) cols.emplace_back("ROUGE-1", r.rouge1);

  std::vector<std::string> values;
  for (const auto& [name, v] : cols) {
    if (!v) {
      values.emplace_back("-");
      continue;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", *v);
    values.emplace_back(buf);
  }
  const std::size_t first = std::max<std::size_t>(label.size(), 5);
  std::ostringstream head, row;
  head << std::left << std::setw(static_cast<int>(first)) << "Model";
  row << std::left << std::setw(static_cast<int>(first)) << label;
  for (std::size_t i = 0; i < cols.size(); ++i) {
    const auto w = static_cast<int>(std::max(cols[i].first.size(), values[i].size()));
    head << " | " << std::right << std::setw(w) << cols[i].first;
    row << " | " << std::right << std::setw(w) << values[i];
  }
  const std::string h = head.str();
  return h + "\n" + std::string(h.size(), '-') + "\n" + row.str() + "\n";
}

}  // namespace xlr::eval
