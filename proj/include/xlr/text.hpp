#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace xlr::text {

// CRLF and lone CR become LF.
std::string normalize_newlines(std::string_view s);

// Judge-style output normalization: trailing whitespace stripped from every
// line, trailing blank lines dropped. Idempotent.
std::string normalize_output(std::string_view s);

// Splits on '\n'. A text with k newlines yields k+1 pieces, so join_lines
// reproduces the input byte for byte ("a\n" -> {"a", ""}).
std::vector<std::string> split_lines(std::string_view s);
std::string join_lines(const std::vector<std::string>& lines);

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);

// Texts equal after newline normalization and normalize_output.
bool equivalent_modulo_trailing_whitespace(std::string_view a, std::string_view b);

std::size_t count_nonblank_lines(std::string_view s);

}  // namespace xlr::text
