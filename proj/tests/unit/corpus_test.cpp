#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "helpers.hpp"
#include "xlr/corpus/ingest.hpp"
#include "xlr/corpus/journal.hpp"
#include "xlr/error.hpp"

namespace xlr::corpus {
namespace {

namespace fs = std::filesystem;

std::string line(const std::string& buggy, const std::string& fixed, const std::string& lang = "cpp") {
  return nlohmann::json{{"lang", lang}, {"buggy", buggy}, {"fixed", fixed}}.dump() + "\n";
}

TEST(Ingest, ThreeValidRecordsInOrder) {
  std::istringstream in(line("int a;", "int b;") + line("x", "y") + line("p", "q"));
  auto r = ingest(in, LanguageId("cpp"));
  ASSERT_EQ(r.pairs.size(), 3u);
  EXPECT_TRUE(r.diagnostics.empty());
  EXPECT_EQ(r.pairs[0].buggy, "int a;");
  EXPECT_EQ(r.pairs[2].fixed, "q");
  EXPECT_EQ(r.pairs[0].id, content_id(LanguageId("cpp"), "int a;", "int b;"));
  EXPECT_NE(r.pairs[0].id, r.pairs[1].id);
}

TEST(Ingest, NoDiffIsRejectedModuloTrailingWhitespace) {
  std::istringstream in(line("int a;\n", "int a;   \n\n"));
  auto r = ingest(in, LanguageId("cpp"));
  EXPECT_TRUE(r.pairs.empty());
  ASSERT_EQ(r.diagnostics.size(), 1u);
  EXPECT_EQ(r.diagnostics[0].line, 1u);
  EXPECT_NE(r.diagnostics[0].reason.find("no diff"), std::string::npos);
}

TEST(Ingest, MalformedLinesAreReportedAndSkipped) {
  std::string text;
  for (int i = 0; i < 10; ++i) {
    if (i == 3) {
      text += "{not json\n";
    } else if (i == 7) {
      text += R"({"lang": "cpp", "buggy": "x"})" "\n";
    } else {
      text += line("b" + std::to_string(i), "f" + std::to_string(i));
    }
  }
  std::istringstream in(text);
  auto r = ingest(in, LanguageId("cpp"));
  EXPECT_EQ(r.lines, 10u);
  EXPECT_EQ(r.pairs.size(), 8u);
  ASSERT_EQ(r.diagnostics.size(), 2u);
  EXPECT_EQ(r.diagnostics[0].line, 4u);
  EXPECT_EQ(r.diagnostics[1].line, 8u);
}

TEST(Ingest, WrongLanguageAndDuplicates) {
  std::istringstream in(line("a", "b", "rust") + line("a", "b") + line("a", "b"));
  auto r = ingest(in, LanguageId("cpp"));
  EXPECT_EQ(r.pairs.size(), 1u);
  EXPECT_EQ(r.diagnostics.size(), 2u);
  EXPECT_EQ(r.pairs.size() + r.diagnostics.size(), r.lines);
}

TEST(Ingest, CrlfIsNormalized) {
  std::istringstream in(line("int a;\r\nint c;\r\n", "int b;\r\nint c;\r\n"));
  auto r = ingest(in, LanguageId("cpp"));
  ASSERT_EQ(r.pairs.size(), 1u);
  EXPECT_EQ(r.pairs[0].buggy, "int a;\nint c;\n");
  EXPECT_EQ(r.pairs[0].id, content_id(LanguageId("cpp"), "int a;\nint c;\n", "int b;\nint c;\n"));
}

TEST(Ingest, MissingFileIsAnEnvironmentError) {
  EXPECT_THROW(ingest(fs::path("/nonexistent/x.jsonl"), LanguageId("cpp")), EnvironmentError);
}

TEST(Stages, TransitionTable) {
  EXPECT_TRUE(is_legal_successor(std::nullopt, Stage::kIngested));
  EXPECT_FALSE(is_legal_successor(std::nullopt, Stage::kDescriptorBuilt));
  EXPECT_TRUE(is_legal_successor(Stage::kIngested, Stage::kDescriptorBuilt));
  EXPECT_TRUE(is_legal_successor(Stage::kDescriptorBuilt, Stage::kFilteredOut));
  EXPECT_FALSE(is_legal_successor(Stage::kIngested, Stage::kTranslated));
  EXPECT_TRUE(is_legal_successor(Stage::kTestsGenerated, Stage::kTranslationFailed));
  EXPECT_TRUE(is_legal_successor(Stage::kInjected, Stage::kQuadVerified));
  for (auto s : {Stage::kFilteredOut, Stage::kTranslationFailed, Stage::kInjectionFailed, Stage::kQuadVerified}) {
    EXPECT_TRUE(is_terminal(s));
    EXPECT_FALSE(is_legal_successor(s, Stage::kDescriptorBuilt));
  }
  for (auto s : {Stage::kIngested, Stage::kTranslated, Stage::kInjected}) {
    EXPECT_FALSE(is_terminal(s));
    EXPECT_EQ(stage_from_string(to_string(s)), s);
  }
}

class JournalTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = testing::scratch_root() / ("journal-" + std::to_string(counter_++));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    path_ = dir_ / "j.jsonl";
  }
  void TearDown() override { fs::remove_all(dir_); }

  static PipelineRecord rec(const std::string& id, Stage s, nlohmann::json payload = nlohmann::json::object()) {
    return {id, s, std::move(payload), 0};
  }

  fs::path dir_;
  fs::path path_;
  static inline int counter_ = 0;
};

TEST_F(JournalTest, AppendsAndReplaysIdentically) {
  {
    Journal j(path_);
    j.append(rec("a", Stage::kIngested, {{"n", 1}}));
    j.append(rec("b", Stage::kIngested));
    j.append_batch({rec("a", Stage::kDescriptorBuilt), rec("a", Stage::kFilteredOut, {{"stage", "x"}})});
  }
  auto r = replay(path_);
  ASSERT_EQ(r.records.size(), 4u);
  EXPECT_TRUE(r.warnings.empty());
  EXPECT_EQ(r.records[0].timestamp, 1u);
  EXPECT_EQ(r.records[3].timestamp, 4u);
  EXPECT_EQ(r.state.at("a").stage, Stage::kFilteredOut);
  EXPECT_EQ(r.state.at("a").payload["stage"], "x");
  EXPECT_EQ(r.state.at("b").stage, Stage::kIngested);
  EXPECT_EQ(pending_pairs(r.state), std::vector<std::string>{"b"});

  Journal reopened(path_);
  auto lineage = reopened.lineage("a");
  ASSERT_EQ(lineage.size(), 3u);
  EXPECT_EQ(lineage[0].payload["n"], 1);
  reopened.append(rec("b", Stage::kDescriptorBuilt));
  EXPECT_EQ(reopened.records().back().timestamp, 5u);
}

TEST_F(JournalTest, RejectsIllegalTransitionsWithoutWriting) {
  Journal j(path_);
  EXPECT_THROW(j.append(rec("a", Stage::kDescriptorBuilt)), JournalError);
  j.append(rec("a", Stage::kIngested));
  j.append(rec("a", Stage::kDescriptorBuilt));
  j.append(rec("a", Stage::kFilteredOut));
  EXPECT_THROW(j.append(rec("a", Stage::kTransferable)), JournalError);
  // A batch with one bad record writes nothing.
  EXPECT_THROW(j.append_batch({rec("c", Stage::kIngested), rec("c", Stage::kQuadVerified)}), JournalError);
  EXPECT_EQ(j.records().size(), 3u);
  EXPECT_EQ(replay(path_).records.size(), 3u);
}

TEST_F(JournalTest, TruncatedTailIsDroppedWithWarning) {
  {
    Journal j(path_);
    j.append(rec("a", Stage::kIngested));
    j.append(rec("b", Stage::kIngested));
  }
  const auto full = fs::file_size(path_);
  fs::resize_file(path_, full - 7);
  auto r = replay(path_);
  EXPECT_EQ(r.records.size(), 1u);
  ASSERT_EQ(r.warnings.size(), 1u);

  // Opening cuts the damaged tail so later appends start on a clean line.
  Journal j(path_);
  EXPECT_EQ(j.warnings().size(), 1u);
  j.append(rec("b", Stage::kIngested));
  auto again = replay(path_);
  EXPECT_EQ(again.records.size(), 2u);
  EXPECT_TRUE(again.warnings.empty());
}

TEST_F(JournalTest, DamageBeforeTheLastLineIsAnError) {
  {
    Journal j(path_);
    j.append(rec("a", Stage::kIngested));
    j.append(rec("b", Stage::kIngested));
  }
  std::ifstream in(path_);
  std::string first, second;
  std::getline(in, first);
  std::getline(in, second);
  in.close();
  first[first.find("\"a\"") + 1] = 'z';
  std::ofstream(path_, std::ios::trunc) << first << '\n' << second << '\n';
  EXPECT_THROW(replay(path_), JournalError);
}

TEST_F(JournalTest, MissingFileReplaysEmpty) {
  auto r = replay(dir_ / "absent.jsonl");
  EXPECT_TRUE(r.records.empty());
  EXPECT_TRUE(resume(dir_ / "absent.jsonl").empty());
}

TEST_F(JournalTest, CorpusViewCollectsVerifiedPairs) {
  SourcePair src{"p1", LanguageId("cpp"), "int a;", "int b;", nullptr};
  TargetPair tgt{"p1", LanguageId("rust"), "let a;", "let b;", {2, 3}};
  Journal j(path_);
  j.append(rec("p1", Stage::kIngested, {{"pair", to_json(src)}}));
  j.append(rec("p1", Stage::kDescriptorBuilt));
  j.append(rec("p1", Stage::kTransferable));
  j.append(rec("p1", Stage::kTestsGenerated));
  j.append(rec("p1", Stage::kTranslated));
  j.append(rec("p1", Stage::kInjected, {{"buggy", "let a;"}}));
  j.append(rec("p1", Stage::kQuadVerified, {{"target", to_json(tgt)}}));
  auto view = corpus_from_records(j.records());
  EXPECT_EQ(view.sources.at("p1"), src);
  EXPECT_TRUE(view.transferable.contains("p1"));
  EXPECT_EQ(view.verified.at("p1"), tgt);
  EXPECT_EQ(target_pair_id(tgt), "p1/rust");
}

TEST(Types, ValidateRejectsEqualPrograms) {
  EXPECT_THROW(validate(SourcePair{"x", LanguageId("cpp"), "a\r\n", "a  \n", nullptr}), PreconditionError);
  EXPECT_THROW(validate(SourcePair{"x", LanguageId("cpp"), "", "a", nullptr}), PreconditionError);
  EXPECT_NO_THROW(validate(SourcePair{"x", LanguageId("cpp"), "a", "b", nullptr}));
  TargetPair t{"x", LanguageId("rust"), "a", "b", {1, 1}};
  EXPECT_EQ(target_pair_from_json(to_json(t)), t);
}

}  // namespace
}  // namespace xlr::corpus
