#include "xlr/text.hpp"

#include <algorithm>
#include <cctype>

namespace xlr::text {

namespace {
bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f';
}
}  // namespace

std::string normalize_newlines(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\r') {
      out.push_back('\n');
      if (i + 1 < s.size() && s[i + 1] == '\n') ++i;
    } else {
      out.push_back(s[i]);
    }
  }
  return out;
}

std::string normalize_output(std::string_view s) {
  std::vector<std::string> lines = split_lines(s);
  for (auto& line : lines) {
    while (!line.empty() && is_space(line.back())) line.pop_back();
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return join_lines(lines);
}

std::vector<std::string> split_lines(std::string_view s) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (true) {
    std::size_t nl = s.find('\n', start);
    if (nl == std::string_view::npos) {
      lines.emplace_back(s.substr(start));
      break;
    }
    lines.emplace_back(s.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

std::string join_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i > 0) out.push_back('\n');
    out += lines[i];
  }
  return out;
}

std::string trim(std::string_view s) {
  auto first = std::find_if_not(s.begin(), s.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
  auto last = std::find_if_not(s.rbegin(), s.rend(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); }).base();
  if (first >= last) return {};
  return std::string(first, last);
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool equivalent_modulo_trailing_whitespace(std::string_view a, std::string_view b) {
  return normalize_output(normalize_newlines(a)) == normalize_output(normalize_newlines(b));
}

std::size_t count_nonblank_lines(std::string_view s) {
  std::size_t n = 0;
  for (const auto& line : split_lines(normalize_newlines(s))) {
    if (!trim(line).empty()) ++n;
  }
  return n;
}

}  // namespace xlr::text
