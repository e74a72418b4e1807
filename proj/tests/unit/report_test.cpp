#include <gtest/gtest.h>

#include <fstream>

#include "helpers.hpp"
#include "xlr/config.hpp"
#include "xlr/curriculum/curriculum.hpp"
#include "xlr/error.hpp"
#include "xlr/eval/report.hpp"
#include "xlr/hash.hpp"

namespace xlr {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

const fs::path kSourceDir = XLR_SOURCE_DIR;

// Curriculum

corpus::CorpusView small_corpus() {
  corpus::CorpusView v;
  for (const char* id : {"b", "a", "c"}) {
    v.sources[id] = {id, LanguageId("cpp"), std::string("int ") + id + " = 0;\n", std::string("int ") + id + " = 1;\n",
                     nullptr};
  }
  v.transferable = {"a", "b"};
  v.verified["b"] = {"b", LanguageId("rust"), "let b = 0;\n", "let b = 1;\n", {1, 2}};
  return v;
}

TEST(Curriculum, StagesSelectTheRightPairs) {
  llm::TemplateStore t(kSourceDir / "templates");
  auto s1 = curriculum::build_stage(1, small_corpus(), t);
  ASSERT_EQ(s1.size(), 2u);
  EXPECT_EQ(s1[0].pair_ids, std::vector<std::string>{"a"});
  EXPECT_EQ(s1[0].completion, "int a = 1;\n");
  EXPECT_NE(s1[0].prompt.find("int a = 0;"), std::string::npos);

  auto s2 = curriculum::build_stage(2, small_corpus(), t);
  ASSERT_EQ(s2.size(), 1u);
  EXPECT_EQ(s2[0].pair_ids, (std::vector<std::string>{"b", "b/rust"}));
  EXPECT_NE(s2[0].prompt.find("int b = 1;"), std::string::npos);
  EXPECT_NE(s2[0].prompt.find("let b = 0;"), std::string::npos);
  EXPECT_EQ(s2[0].completion, "let b = 1;\n");

  auto s3 = curriculum::build_stage(3, small_corpus(), t);
  ASSERT_EQ(s3.size(), 1u);
  EXPECT_EQ(s3[0].prompt.find("int b"), std::string::npos);
  EXPECT_EQ(curriculum::stage_record_from_json(curriculum::to_json(s3[0])), s3[0]);
}

TEST(Curriculum, EmptyStageIsIneligible) {
  llm::TemplateStore t(kSourceDir / "templates");
  auto v = small_corpus();
  v.verified.clear();
  EXPECT_THROW(curriculum::build_stage(2, v, t), curriculum::EligibilityError);
  EXPECT_THROW(curriculum::build_stage(4, v, t), PreconditionError);
}

TEST(Curriculum, EmitWritesFilesAndMergesManifest) {
  llm::TemplateStore t(kSourceDir / "templates");
  const auto out = testing::scratch_root() / "curriculum";
  fs::remove_all(out);
  EXPECT_EQ(curriculum::emit_stage(1, small_corpus(), t, out), 2u);
  EXPECT_EQ(curriculum::emit_stage(3, small_corpus(), t, out), 1u);
  std::ifstream mf(out / "manifest.json");
  auto m = json::parse(mf);
  EXPECT_EQ(m["corpus_hash"], curriculum::corpus_hash(small_corpus()));
  EXPECT_EQ(m["stages"]["stage1"]["count"], 2);
  EXPECT_EQ(m["stages"]["stage3"]["count"], 1);
  EXPECT_EQ(m["stages"]["stage1"]["file"], "stage1.jsonl");
  EXPECT_EQ(m["stages"]["stage1"]["sha256"].get<std::string>().size(), 64u);
  std::ifstream s1(out / "stage1.jsonl");
  std::string line;
  int lines = 0;
  while (std::getline(s1, line)) {
    auto r = json::parse(line);
    EXPECT_EQ(r["stage"], 1);
    ++lines;
  }
  EXPECT_EQ(lines, 2);
  fs::remove_all(out);
}

// Evaluation report

class FakeChecker : public sandbox::SyntaxChecker {
 public:
  sandbox::SyntaxResult syntax_check(std::string_view program, const LanguageId& lang) override {
    const bool ok = program.find(lang.name()) != std::string_view::npos;
    return {ok, ok ? "" : "no"};
  }
};

eval::PatchSet task(std::string id, std::vector<std::string> patches, std::vector<bool> passed = {}) {
  eval::PatchSet s;
  s.task_id = std::move(id);
  s.patches = std::move(patches);
  s.passed = std::move(passed);
  return s;
}

TEST(Report, CompilationRatesSeparateSourceInterference) {
  FakeChecker checker;
  std::vector<eval::PatchSet> sets{task("1", {"rust"}), task("2", {"cpp"}), task("3", {"cpp rust"}),
                                   task("4", {"neither"})};
  auto r = eval::compilation_rates(sets, checker, LanguageId("rust"), LanguageId("cpp"));
  EXPECT_DOUBLE_EQ(r.cr_target, 50.0);
  EXPECT_DOUBLE_EQ(r.cr_source, 25.0);
}

TEST(Report, CountViolationsWalksNestedJson) {
  json j = {{"files",
             {{{"offenses", {{{"cop_name", "Style/A"}}, {{"cop_name", "Lint/B"}}, {{"cop_name", "Style/C"}}}}},
              {{"offenses", json::array()}}}}};
  EXPECT_EQ(eval::count_violations(j, "cop_name", "Style/"), 2u);
  EXPECT_EQ(eval::count_violations(j, "cop_name", "Lint/"), 1u);
}

eval::LinterSpec fake_linter() {
  eval::LinterSpec l;
  l.cmd = {"python3", (kSourceDir / "tests/unit/data/fake_linter.py").string(), "{file}"};
  return l;
}

TEST(Report, SvdWithFakeLinter) {
  std::string patch;
  for (int i = 0; i < 20; ++i) patch += i == 3 ? "x = 'BAD'\n" : (i == 5 ? "y = LINT\n\n" : "z = 1\n");
  auto v = eval::svd({patch}, fake_linter(), testing::scratch_root() / "svd");
  ASSERT_TRUE(v);
  EXPECT_DOUBLE_EQ(*v, 50.0);
  EXPECT_THROW(eval::svd({"\n  \n"}, fake_linter(), testing::scratch_root() / "svd"), PreconditionError);

  auto absent = fake_linter();
  absent.cmd[0] = "xlr-no-such-linter";
  EXPECT_FALSE(eval::svd({patch}, absent, testing::scratch_root() / "svd"));
}

TEST(Report, EvaluateAndRender) {
  std::vector<eval::PatchSet> sets{task("1", {"a", "b", "c", "d", "e"}, {true, false, false, false, false}),
                                   task("2", {"a", "b", "c", "d", "e"}, {false, false, false, false, false})};
  sets[0].reference = "a";
  eval::EvalOptions o;
  o.target = LanguageId("rust");
  o.source = LanguageId("cpp");
  auto r = eval::evaluate(sets, nullptr, o);
  EXPECT_EQ(r.tasks, 2u);
  EXPECT_NEAR(r.pass_at.at(1), 10.0, 1e-12);
  EXPECT_NEAR(r.pass_at.at(3), 30.0, 1e-12);
  EXPECT_NEAR(r.pass_at.at(5), 50.0, 1e-12);
  EXPECT_FALSE(r.cr_target);
  ASSERT_TRUE(r.bleu4);
  EXPECT_NEAR(*r.rouge1, 100.0, 1e-9);

  auto table = eval::render_table(r, "model-x");
  EXPECT_NE(table.find("Model"), std::string::npos);
  EXPECT_NE(table.find("P@1"), std::string::npos);
  EXPECT_NE(table.find("10.00"), std::string::npos);
  EXPECT_NE(table.find(" - "), std::string::npos);

  sets[1].passed.clear();
  auto partial = eval::evaluate(sets, nullptr, o);
  EXPECT_TRUE(partial.pass_at.empty());
  EXPECT_NE(eval::render_table(partial, "m").find("P@5"), std::string::npos);
  EXPECT_EQ(eval::to_json(partial)["tasks"], 2);
}

TEST(Report, ReadPatchSets) {
  const auto path = testing::scratch_root() / "patches.jsonl";
  fs::create_directories(path.parent_path());
  std::ofstream(path) << R"({"task_id": "t1", "patches": ["p"], "passed": [true], "reference": "r"})" "\n"
                      << R"({"task_id": "t2", "patches": ["q"], "tests": [{"input": "1", "expected": "2"}]})" "\n";
  auto sets = eval::read_patch_sets(path);
  ASSERT_EQ(sets.size(), 2u);
  EXPECT_EQ(sets[0].reference, "r");
  EXPECT_EQ(sets[1].tests[0].expected, "2");
  std::ofstream(path) << "{broken\n";
  EXPECT_THROW(eval::read_patch_sets(path), ParseError);
}

// Configuration

TEST(Config, ExampleConfigParses) {
  auto c = load_config(kSourceDir / "configs/example.json");
  EXPECT_EQ(c.pipeline.source_lang, LanguageId("cpp"));
  EXPECT_TRUE(c.toolchains.contains(LanguageId("rust")));
  EXPECT_TRUE(c.toolchains.at(LanguageId("cpp")).coverage);
  EXPECT_TRUE(c.linter);
  EXPECT_DOUBLE_EQ(c.pipeline.tau, 0.9);
}

TEST(Config, CollectsEveryProblem) {
  std::ifstream in(kSourceDir / "fixtures/e2e/config.json");
  auto doc = json::parse(in);
  doc["pipeline"]["tau"] = 1.5;
  doc["pipeline"]["m"] = 0;
  doc["pipeline"]["target_langs"] = {"cobol"};
  doc["llm"]["stages"]["dreaming"] = json::object();
  doc["extra"] = 1;
  try {
    parse_config(doc, kSourceDir / "fixtures/e2e");
    FAIL();
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    for (const char* needle : {"pipeline.tau", "pipeline.m", "cobol", "dreaming", "extra"}) {
      EXPECT_NE(what.find(needle), std::string::npos) << needle;
    }
  }
}

TEST(Config, CheckRunAndRelativePaths) {
  auto c = load_config(kSourceDir / "fixtures/e2e/config.json");
  EXPECT_EQ(c.paths.input, kSourceDir / "fixtures/e2e/seeds.jsonl");
  EXPECT_TRUE(check_run(c, LanguageId("rust")).empty());
  EXPECT_FALSE(check_run(c, LanguageId("cpp")).empty());
  EXPECT_FALSE(check_run(c, LanguageId("ruby")).empty());
  EXPECT_EQ(c.llm.stage("translate").parse_retries, 2);
}

}  // namespace
}  // namespace xlr
