#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "xlr/corpus/types.hpp"
#include "xlr/error.hpp"
#include "xlr/llm/client.hpp"
#include "xlr/llm/request.hpp"
#include "xlr/sandbox/sandbox.hpp"

namespace xlr::testgen {

struct TestCase {
  std::string input;
  std::string expected;  // normalized stdout of the fixed source program

  bool operator==(const TestCase&) const = default;
};

struct TestSuite {
  std::vector<TestCase> cases;
  sandbox::CoverageReport coverage;
  double tau = 0.90;

  std::vector<std::string> inputs() const;
};

// The source program itself is broken (does not compile); nothing built on it
// can be trusted.
class SourceCompileError : public Error {
 public:
  using Error::Error;
};

// A stage produced nothing usable (no parseable inputs, ...).
class StageError : public Error {
 public:
  using Error::Error;
};

// Line and branch coverage must both reach tau (a fraction; 0.90 means 90%).
bool coverage_gate(const sandbox::CoverageReport& report, double tau);

// Template "testgen_inputs", reply {"inputs": ["...", ...]}. Returns at most
// `count` inputs with exact duplicates removed, in reply order. `round`
// shifts sample_index so later rounds are fresh samples. Throws
// PreconditionError for count < 1, StageError when no reply parses.
std::vector<std::string> propose_inputs(const corpus::SourcePair& pair, llm::Client& client,
                                        const llm::StageParams& params, int count, int round = 0);

struct OracleResult {
  bool admitted = false;
  TestSuite suite;  // cases that survived, with measured coverage
  std::vector<std::string> diagnostics;
};

// Runs the fixed program twice on every input. Inputs on which it does not
// terminate normally, or prints different output the second time, are
// dropped with a diagnostic. Coverage is measured over the surviving inputs.
// Throws SourceCompileError when the fixed program does not compile.
OracleResult build_oracle_suite(const corpus::SourcePair& pair, const std::vector<std::string>& inputs,
                                sandbox::Sandbox& sandbox, double tau);

struct SuiteParams {
  double tau = 0.90;
  int batch = 10;
  int rounds = 3;
  llm::StageParams llm;
};

struct SuiteOutcome {
  bool admitted = false;
  TestSuite suite;  // last measured suite, admitted or not
  int rounds_used = 0;
  std::vector<std::string> diagnostics;
};

// Proposes a batch per round, accumulating inputs until the gate passes or
// the rounds run out.
SuiteOutcome generate_suite(const corpus::SourcePair& pair, llm::Client& client, sandbox::Sandbox& sandbox,
                            const SuiteParams& params);

nlohmann::json to_json(const TestSuite& suite);
TestSuite suite_from_json(const nlohmann::json& j);

// JSONL: a header {"line_pct", "branch_pct", "tau", "cases"} followed by one
// {"input", "expected"} per case.
void write_suite(const std::filesystem::path& path, const TestSuite& suite);
TestSuite read_suite(const std::filesystem::path& path);

}  // namespace xlr::testgen
