#include <gtest/gtest.h>

#include "xlr/text.hpp"

namespace xlr::text {
namespace {

TEST(Text, NormalizeOutputStripsTrailingWhitespaceAndBlankLines) {
  EXPECT_EQ(normalize_output("5  \n6\t\n\n\n"), "5\n6");
  EXPECT_EQ(normalize_output("  a\n"), "  a");
  EXPECT_EQ(normalize_output(""), "");
}

TEST(Text, NormalizeOutputIsIdempotent) {
  for (std::string s : {"a \n b\t\n\n", "x", "\n\n", " 1 2 \r\n3\r\n", "trail   "}) {
    const auto once = normalize_output(s);
    EXPECT_EQ(normalize_output(once), once) << s;
  }
}

TEST(Text, SplitJoinRoundTrips) {
  for (std::string s : {"", "a", "a\n", "\n", "a\nb", "a\n\nb\n"}) {
    EXPECT_EQ(join_lines(split_lines(s)), s);
  }
  EXPECT_EQ(split_lines("a\n").size(), 2u);
}

TEST(Text, NewlineNormalization) {
  EXPECT_EQ(normalize_newlines("a\r\nb\rc\n"), "a\nb\nc\n");
}

TEST(Text, EquivalenceIgnoresTrailingWhitespaceOnly) {
  EXPECT_TRUE(equivalent_modulo_trailing_whitespace("int x;  \r\n", "int x;\n\n"));
  EXPECT_FALSE(equivalent_modulo_trailing_whitespace("int  x;", "int x;"));
}

TEST(Text, CountsNonBlankLines) {
  EXPECT_EQ(count_nonblank_lines("a\n\n  \nb\n"), 2u);
  EXPECT_EQ(count_nonblank_lines(""), 0u);
}

}  // namespace
}  // namespace xlr::text
