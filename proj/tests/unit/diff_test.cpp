#include <gtest/gtest.h>

#include <random>

#include "xlr/descriptor/diff.hpp"
#include "xlr/error.hpp"
#include "xlr/text.hpp"

namespace xlr::descriptor {
namespace {

// Rebuilds the fixed text from hunk ranges alone, without descriptor::apply().
std::string reconstruct(const std::string& buggy, const PatchDiff& d) {
  auto lines = text::split_lines(buggy);
  std::vector<std::string> out;
  std::size_t pos = 0;
  for (const auto& h : d.hunks) {
    for (; pos < h.buggy.start; ++pos) out.push_back(lines.at(pos));
    for (std::size_t i = 0; i < h.buggy.count; ++i) {
      if (lines.at(pos + i) != h.removed.at(i)) throw std::runtime_error("removed line mismatch");
    }
    pos += h.buggy.count;
    out.insert(out.end(), h.added.begin(), h.added.end());
  }
  for (; pos < lines.size(); ++pos) out.push_back(lines[pos]);
  return text::join_lines(out);
}

const char* kBuggy =
    "int main() {\n"
    "  int n, s = 0;\n"
    "  scanf(\"%d\", &n);\n"
    "  int a[100];\n"
    "  for (int i = 0; i <= n; i++)\n"
    "    s += a[i];\n"
    "  printf(\"%d\", s);\n"
    "}\n";

TEST(Diff, SingleLineSubstitutionIsOneHunk) {
  std::string fixed = kBuggy;
  fixed.replace(fixed.find("i <= n"), 6, "i < n");
  auto d = compute_diff(kBuggy, fixed);
  ASSERT_EQ(d.hunks.size(), 1u);
  EXPECT_EQ(d.hunks[0].buggy, (LineRange{4, 1}));
  EXPECT_EQ(d.hunks[0].removed, std::vector<std::string>{"  for (int i = 0; i <= n; i++)"});
  EXPECT_EQ(d.hunks[0].added, std::vector<std::string>{"  for (int i = 0; i < n; i++)"});
  EXPECT_EQ(d.hunks[0].context_before.size(), 3u);
  EXPECT_EQ(descriptor::apply(kBuggy, d), fixed);
}

TEST(Diff, IdenticalTextsAreAnError) {
  try {
    compute_diff("a\n", "a\n");
    FAIL();
  } catch (const PreconditionError& e) {
    EXPECT_NE(std::string(e.what()).find("empty diff"), std::string::npos);
  }
  EXPECT_THROW(compute_diff("", "a"), PreconditionError);
}

TEST(Diff, ScatteredEditsGiveDisjointHunks) {
  std::vector<std::string> lines;
  for (int i = 0; i < 30; ++i) lines.push_back("line " + std::to_string(i));
  auto buggy = text::join_lines(lines);
  lines[3] = "edit a";
  lines[15] = "edit b";
  lines[27] = "edit c";
  auto fixed = text::join_lines(lines);
  auto d = compute_diff(buggy, fixed, 2);
  ASSERT_EQ(d.hunks.size(), 3u);
  for (std::size_t i = 1; i < d.hunks.size(); ++i) {
    EXPECT_LT(d.hunks[i - 1].buggy.start + d.hunks[i - 1].buggy.count, d.hunks[i].buggy.start);
  }
  EXPECT_EQ(descriptor::apply(buggy, d), fixed);
}

TEST(Diff, ApplyRejectsMismatchedBase) {
  auto d = compute_diff("a\nb\n", "a\nc\n");
  EXPECT_THROW(descriptor::apply("a\nx\n", d), ParseError);
}

TEST(Diff, JsonRoundTrip) {
  auto d = compute_diff("a\nb\nc\n", "a\nB\nc\nd\n");
  EXPECT_EQ(patch_from_json(to_json(d)), d);
}

TEST(Diff, UnifiedRenderingHasOneBasedHeaders) {
  auto d = compute_diff("a\nb\nc\n", "a\nB\nc\n", 1);
  const auto u = render_unified(d);
  EXPECT_NE(u.find("@@ -1,3 +1,3 @@"), std::string::npos) << u;
  EXPECT_NE(u.find("-b\n"), std::string::npos);
  EXPECT_NE(u.find("+B\n"), std::string::npos);
}

TEST(Diff, RandomEditScriptsRoundTrip) {
  std::mt19937 rng(20261017);
  const std::vector<std::string> alphabet = {"{", "}", "x++;", "if (a < b)", "return 0;", "", "  y = x;", "int i;"};
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  int checked = 0;
  while (checked < 1000) {
    std::vector<std::string> base(1 + pick(25));
    for (auto& l : base) l = alphabet[pick(alphabet.size())];
    auto edited = base;
    const std::size_t ops = 1 + pick(6);
    for (std::size_t k = 0; k < ops; ++k) {
      switch (pick(3)) {
        case 0: edited.insert(edited.begin() + static_cast<long>(pick(edited.size() + 1)), alphabet[pick(alphabet.size())]); break;
        case 1: if (edited.size() > 1) edited.erase(edited.begin() + static_cast<long>(pick(edited.size()))); break;
        default: edited[pick(edited.size())] = "changed " + std::to_string(k); break;
      }
    }
    const auto buggy = text::join_lines(base);
    const auto fixed = text::join_lines(edited);
    if (buggy == fixed || buggy.empty() || fixed.empty()) continue;
    auto d = compute_diff(buggy, fixed);
    ASSERT_EQ(descriptor::apply(buggy, d), fixed) << "script " << checked;
    ASSERT_EQ(reconstruct(buggy, d), fixed) << "script " << checked;
    ++checked;
  }
}

}  // namespace
}  // namespace xlr::descriptor
