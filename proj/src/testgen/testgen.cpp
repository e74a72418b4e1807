#include "xlr/testgen/testgen.hpp"

#include <fstream>
#include <set>

#include "xlr/llm/structured.hpp"

namespace xlr::testgen {

using sandbox::Category;

std::vector<std::string> TestSuite::inputs() const {
  std::vector<std::string> out;
  out.reserve(cases.size());
  for (const auto& c : cases) out.push_back(c.input);
  return out;
}

bool coverage_gate(const sandbox::CoverageReport& report, double tau) {
  const double threshold = tau * 100.0;
  // Percentages come from integer counts; allow for representation error at
  // the boundary so 90.0 against tau 0.90 admits.
  constexpr double kEps = 1e-9;
  return report.line_pct + kEps >= threshold && report.branch_pct + kEps >= threshold;
}

std::vector<std::string> propose_inputs(const corpus::SourcePair& pair, llm::Client& client,
                                        const llm::StageParams& params, int count, int round) {
  if (count < 1) throw PreconditionError("propose_inputs: count must be >= 1");
  llm::CompletionRequest req;
  req.template_id = "testgen_inputs";
  req.bindings = {{"program", pair.fixed}, {"source_lang", pair.lang.name()}, {"count", std::to_string(count)}};
  req.temperature = params.temperature;
  req.max_tokens = params.max_tokens;
  req.sample_index = static_cast<std::uint32_t>(round * (params.parse_retries + 1));

  using Inputs = std::vector<std::string>;
  auto inputs = llm::request_structured<Inputs>(
      client, req, params.parse_retries, [&](const nlohmann::json& j) -> std::optional<Inputs> {
        if (!j.contains("inputs") || !j["inputs"].is_array()) return std::nullopt;
        Inputs out;
        std::set<std::string> seen;
        for (const auto& v : j["inputs"]) {
          if (!v.is_string()) continue;
          auto s = v.get<std::string>();
          if (seen.insert(s).second) out.push_back(std::move(s));
          if (static_cast<int>(out.size()) == count) break;
        }
        if (out.empty()) return std::nullopt;
        return out;
      });
  if (!inputs) throw StageError("no parseable test inputs in the model reply");
  return *inputs;
}

OracleResult build_oracle_suite(const corpus::SourcePair& pair, const std::vector<std::string>& inputs,
                                sandbox::Sandbox& sandbox, double tau) {
  if (inputs.empty()) throw PreconditionError("build_oracle_suite: no inputs");
  if (auto syntax = sandbox.syntax_check(pair.fixed, pair.lang); !syntax.ok) {
    throw SourceCompileError("fixed source program does not compile: " + syntax.diagnostics);
  }

  OracleResult result;
  result.suite.tau = tau;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const auto& input = inputs[i];
    if (!seen.insert(input).second) continue;
    auto first = sandbox.execute(pair.fixed, pair.lang, input);
    if (first.category != Category::kPass) {
      result.diagnostics.push_back("input " + std::to_string(i + 1) + ": fixed program " +
                                   std::string(to_string(first.category)) + ", discarded");
      continue;
    }
    auto second = sandbox.execute(pair.fixed, pair.lang, input);
    if (second.category != Category::kPass || second.stdout_text != first.stdout_text) {
      result.diagnostics.push_back("input " + std::to_string(i + 1) + ": nondeterministic output, discarded");
      continue;
    }
    result.suite.cases.push_back({input, first.stdout_text});
  }
  if (result.suite.cases.empty()) {
    result.diagnostics.push_back("no input terminated normally");
    return result;
  }
  const auto kept = result.suite.inputs();
  result.suite.coverage = sandbox.measure_coverage(pair.fixed, pair.lang, kept);
  result.admitted = coverage_gate(result.suite.coverage, tau);
  return result;
}

SuiteOutcome generate_suite(const corpus::SourcePair& pair, llm::Client& client, sandbox::Sandbox& sandbox,
                            const SuiteParams& params) {
  SuiteOutcome out;
  out.suite.tau = params.tau;
  std::vector<std::string> inputs;
  std::set<std::string> seen;
  for (int round = 0; round < params.rounds; ++round) {
    out.rounds_used = round + 1;
    std::vector<std::string> batch;
    try {
      batch = propose_inputs(pair, client, params.llm, params.batch, round);
    } catch (const StageError& e) {
      out.diagnostics.push_back("round " + std::to_string(round + 1) + ": " + e.what());
      continue;
    }
    std::size_t fresh = 0;
    for (auto& in : batch) {
      if (seen.insert(in).second) {
        inputs.push_back(std::move(in));
        ++fresh;
      }
    }
    if (fresh == 0) continue;
    auto oracle = build_oracle_suite(pair, inputs, sandbox, params.tau);
    out.suite = std::move(oracle.suite);
    out.diagnostics = std::move(oracle.diagnostics);
    if (oracle.admitted) {
      out.admitted = true;
      return out;
    }
  }
  if (inputs.empty()) throw StageError("no parseable test inputs after " + std::to_string(params.rounds) + " rounds");
  return out;
}

nlohmann::json to_json(const TestSuite& suite) {
  nlohmann::json cases = nlohmann::json::array();
  for (const auto& c : suite.cases) cases.push_back({{"input", c.input}, {"expected", c.expected}});
  return {{"line_pct", suite.coverage.line_pct},
          {"branch_pct", suite.coverage.branch_pct},
          {"lines_total", suite.coverage.lines_total},
          {"branches_total", suite.coverage.branches_total},
          {"tau", suite.tau},
          {"cases", std::move(cases)}};
}

TestSuite suite_from_json(const nlohmann::json& j) {
  try {
    TestSuite s;
    s.coverage.line_pct = j.at("line_pct").get<double>();
    s.coverage.branch_pct = j.at("branch_pct").get<double>();
    s.coverage.lines_total = j.value("lines_total", std::size_t{0});
    s.coverage.branches_total = j.value("branches_total", std::size_t{0});
    s.tau = j.at("tau").get<double>();
    for (const auto& c : j.at("cases")) {
      s.cases.push_back({c.at("input").get<std::string>(), c.at("expected").get<std::string>()});
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("test suite: ") + e.what());
  }
}

void write_suite(const std::filesystem::path& path, const TestSuite& suite) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw EnvironmentError("cannot write suite file " + path.string());
  nlohmann::json header = {{"line_pct", suite.coverage.line_pct},
                           {"branch_pct", suite.coverage.branch_pct},
                           {"tau", suite.tau},
                           {"cases", suite.cases.size()}};
  out << header.dump() << '\n';
  for (const auto& c : suite.cases) out << nlohmann::json{{"input", c.input}, {"expected", c.expected}}.dump() << '\n';
  if (!out) throw EnvironmentError("failed writing suite file " + path.string());
}

TestSuite read_suite(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw EnvironmentError("cannot read suite file " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ParseError("suite file is empty: " + path.string());
  TestSuite s;
  try {
    auto header = nlohmann::json::parse(line);
    s.coverage.line_pct = header.at("line_pct").get<double>();
    s.coverage.branch_pct = header.at("branch_pct").get<double>();
    s.tau = header.at("tau").get<double>();
    const auto n = header.at("cases").get<std::size_t>();
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      auto c = nlohmann::json::parse(line);
      s.cases.push_back({c.at("input").get<std::string>(), c.at("expected").get<std::string>()});
    }
    if (s.cases.size() != n) throw ParseError("suite file " + path.string() + ": header says " +
                                              std::to_string(n) + " cases, found " +
                                              std::to_string(s.cases.size()));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("suite file " + path.string() + ": " + e.what());
  }
  return s;
}

}  // namespace xlr::testgen
