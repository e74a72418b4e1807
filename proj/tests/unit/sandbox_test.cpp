#include <gtest/gtest.h>

#include "helpers.hpp"
#include "xlr/error.hpp"
#include "xlr/sandbox/sandbox.hpp"

namespace xlr::sandbox {
namespace {

using testing::kCpp;
using testing::kPython;

SandboxOptions opts() {
  SandboxOptions o;
  o.scratch_root = testing::scratch_root() / "sandbox";
  return o;
}

constexpr const char* kGcov = R"(File 'main.cpp'
Lines executed:85.71% of 14
Branches executed:100.00% of 4
Taken at least once:50.00% of 4
Calls executed:80.00% of 5
Creating 'main.cpp.gcov'

File '/usr/include/c++/13/iostream'
Lines executed:100.00% of 1
No branches
)";

TEST(Gcov, ReadsTakenAtLeastOnce) {
  auto r = parse_gcov_summary(kGcov, "main.cpp");
  EXPECT_NEAR(r.line_pct, 85.71, 0.01);
  EXPECT_DOUBLE_EQ(r.branch_pct, 50.0);
  EXPECT_EQ(r.lines_total, 14u);
  EXPECT_EQ(r.branches_total, 4u);
}

TEST(Gcov, FallsBackToBranchesExecutedAndNoBranches) {
  auto r = parse_gcov_summary("File 'main.cpp'\nLines executed:100.00% of 3\nBranches executed:75.00% of 8\n",
                              "main.cpp");
  EXPECT_DOUBLE_EQ(r.branch_pct, 75.0);
  auto none = parse_gcov_summary("File 'main.cpp'\nLines executed:100.00% of 3\nNo branches\n", "main.cpp");
  EXPECT_DOUBLE_EQ(none.branch_pct, 100.0);
  EXPECT_EQ(none.branches_total, 0u);
}

TEST(Gcov, MissingBlockCarriesRawOutput) {
  try {
    parse_gcov_summary("garbage output", "main.cpp");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("garbage output"), std::string::npos);
  }
}

TEST(Classify, Precedence) {
  ClassifierHints hints{{"Traceback"}, {101}};
  ProcessResult r;
  r.timed_out = true;
  r.term_signal = 9;
  EXPECT_EQ(classify(r, hints, "x", "x"), Category::kTimeout);
  r.timed_out = false;
  EXPECT_EQ(classify(r, hints, "x", "x"), Category::kCrash);
  r.term_signal = 6;
  r.stderr_text = "Traceback: aborted";
  EXPECT_EQ(classify(r, hints, "x", "x"), Category::kException);
  r.term_signal = 0;
  r.exit_code = 1;
  r.stderr_text = "Traceback (most recent call last):";
  EXPECT_EQ(classify(r, hints, "x", "x"), Category::kException);
  r.stderr_text = "";
  EXPECT_EQ(classify(r, hints, "x", "x"), Category::kCrash);
  r.exit_code = 101;
  EXPECT_EQ(classify(r, hints, "x", "x"), Category::kException);
  r.exit_code = 0;
  EXPECT_EQ(classify(r, hints, "x", "y"), Category::kWrongOutput);
  EXPECT_EQ(classify(r, hints, "x", "x"), Category::kPass);
  EXPECT_EQ(classify(r, hints, std::nullopt, "y"), Category::kPass);
}

TEST(Normalize, TrailingWhitespaceAndNewlines) {
  EXPECT_EQ(normalize_stdout("a  \r\nb\t\n\n\n"), normalize_stdout("a\nb"));
  EXPECT_NE(normalize_stdout("a b"), normalize_stdout("ab"));
}

class SandboxTest : public ::testing::Test {
 protected:
  Sandbox sb{testing::host_profiles(2.0), opts()};
};

constexpr const char* kEcho = R"(#include <iostream>
#include <string>
int main() { std::string s; std::getline(std::cin, s); std::cout << s << "\n"; }
)";

TEST_F(SandboxTest, EchoPasses) {
  auto o = sb.execute(kEcho, kCpp, "hello\n", std::string("hello"));
  EXPECT_EQ(o.category, Category::kPass);
  EXPECT_EQ(o.stdout_text, normalize_stdout("hello"));
  EXPECT_EQ(sb.execute(kEcho, kCpp, "hello\n", std::string("bye")).category, Category::kWrongOutput);
}

TEST_F(SandboxTest, DivideByZeroCrashes) {
  const char* prog = R"(#include <iostream>
int main() { int a = 1, b = 0; std::cin >> b; std::cout << a / b << "\n"; }
)";
  auto o = sb.execute(prog, kCpp, "0\n", std::string("1"));
  EXPECT_EQ(o.category, Category::kCrash);
}

TEST_F(SandboxTest, UncaughtExceptionIsException) {
  const char* prog = "#include <stdexcept>\nint main() { throw std::runtime_error(\"boom\"); }\n";
  EXPECT_EQ(sb.execute(prog, kCpp, "").category, Category::kException);
  EXPECT_EQ(sb.execute("raise ValueError('x')\n", kPython, "").category, Category::kException);
}

TEST_F(SandboxTest, InfiniteLoopTimesOut) {
  auto o = sb.execute("int main() { volatile int x = 0; while (true) ++x; }\n", kCpp, "");
  EXPECT_EQ(o.category, Category::kTimeout);
  EXPECT_GE(o.duration_s, 2.0);
  EXPECT_LT(o.duration_s, 6.0);
}

TEST_F(SandboxTest, CompileErrorAndSyntaxCheck) {
  EXPECT_EQ(sb.execute("int main( {", kCpp, "").category, Category::kCompileError);
  EXPECT_FALSE(sb.syntax_check("int main( {", kCpp).ok);
  EXPECT_TRUE(sb.syntax_check(kEcho, kCpp).ok);
  // C++ text is not Python.
  auto r = sb.syntax_check(kEcho, kPython);
  EXPECT_FALSE(r.ok);
  EXPECT_FALSE(r.diagnostics.empty());
  EXPECT_TRUE(sb.syntax_check("print(1)\n", kPython).ok);
}

TEST_F(SandboxTest, CoverageOfOneSidedBranch) {
  const char* prog = R"(#include <iostream>
int main() {
  int x = 0;
  std::cin >> x;
  if (x > 0) {
    std::cout << "pos\n";
  } else {
    std::cout << "nonpos\n";
  }
  return 0;
}
)";
  const std::vector<std::string> one{"5\n"};
  auto r = sb.measure_coverage(prog, kCpp, one);
  EXPECT_LE(r.branch_pct, 50.0);
  EXPECT_LT(r.line_pct, 100.0);
  const std::vector<std::string> both{"5\n", "-1\n"};
  auto full = sb.measure_coverage(prog, kCpp, both);
  EXPECT_DOUBLE_EQ(full.line_pct, 100.0);
  EXPECT_DOUBLE_EQ(full.branch_pct, 100.0);
}

TEST_F(SandboxTest, StraightLineIsFullyCovered) {
  const std::vector<std::string> in{"\n"};
  auto r = sb.measure_coverage("int main() {\n  int a = 1;\n  return a - 1;\n}\n", kCpp, in);
  EXPECT_DOUBLE_EQ(r.line_pct, 100.0);
  EXPECT_DOUBLE_EQ(r.branch_pct, 100.0);
}

TEST_F(SandboxTest, CoveragePreconditions) {
  EXPECT_THROW(sb.measure_coverage(kEcho, kCpp, {}), PreconditionError);
  const std::vector<std::string> in{"x"};
  EXPECT_THROW(sb.measure_coverage("print(1)", kPython, in), PreconditionError);
}

TEST(SandboxEnv, MissingToolchainBinary) {
  auto profiles = testing::host_profiles();
  profiles.at(kCpp).compile_cmd = {"xlr-no-such-compiler", "{src}"};
  Sandbox sb(profiles, opts());
  EXPECT_THROW(sb.execute(kEcho, kCpp, ""), EnvironmentError);
}

TEST(SandboxEnv, UnknownLanguage) {
  Sandbox sb(testing::host_profiles(), opts());
  EXPECT_FALSE(sb.has_profile(LanguageId("cobol")));
  EXPECT_THROW(sb.execute("x", LanguageId("cobol"), ""), PreconditionError);
}

TEST(Profile, CheckAndSubstitute) {
  ToolchainProfile p;
  p.lang = LanguageId("x");
  EXPECT_FALSE(check(p).empty());
  EXPECT_EQ(substitute({"cc", "{src}", "-o{bin}", "{other}"}, {{"src", "/a.c"}, {"bin", "/b"}}),
            (std::vector<std::string>{"cc", "/a.c", "-o/b", "{other}"}));
}

}  // namespace
}  // namespace xlr::sandbox
