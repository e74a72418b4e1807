#include "xlr/eval/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>

#include "xlr/error.hpp"

namespace xlr::eval {

double pass_at_k(int n, int c, int k) {
  if (n < 1 || c < 0 || c > n) {
    throw PreconditionError("pass_at_k: need 0 <= c <= n and n >= 1");
  }
  if (k < 1 || k > n) throw PreconditionError("pass_at_k: need 1 <= k <= n");
  if (n - c < k) return 1.0;
  double miss = 1.0;
  for (int i = n - c + 1; i <= n; ++i) {
    miss *= 1.0 - static_cast<double>(k) / static_cast<double>(i);
  }
  return 1.0 - miss;
}

std::vector<std::string> tokenize_code(std::string_view text) {
  std::vector<std::string> tokens;
  std::string word;
  auto flush = [&] {
    if (!word.empty()) tokens.push_back(std::move(word));
    word.clear();
  };
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c) || ch == '_') {
      word.push_back(ch);
    } else if (std::isspace(c)) {
      flush();
    } else {
      flush();
      tokens.emplace_back(1, ch);
    }
  }
  flush();
  return tokens;
}

namespace {

using NgramCounts = std::map<std::vector<std::string>, int>;

NgramCounts count_ngrams(const std::vector<std::string>& tokens, std::size_t order) {
  NgramCounts counts;
  if (tokens.size() < order) return counts;
  for (std::size_t i = 0; i + order <= tokens.size(); ++i) {
    ++counts[std::vector<std::string>(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                                      tokens.begin() + static_cast<std::ptrdiff_t>(i + order))];
  }
  return counts;
}

// Returns (clipped matches, candidate n-gram total).
std::pair<int, int> clipped_matches(const std::vector<std::string>& candidate,
                                    const std::vector<std::string>& reference,
                                    std::size_t order) {
  const auto cand = count_ngrams(candidate, order);
  const auto ref = count_ngrams(reference, order);
  int matches = 0;
  int total = 0;
  for (const auto& [gram, count] : cand) {
    total += count;
    if (auto it = ref.find(gram); it != ref.end()) matches += std::min(count, it->second);
  }
  return {matches, total};
}

}  // namespace

double bleu4(const std::vector<std::string>& candidate,
             const std::vector<std::string>& reference) {
  if (candidate.empty()) return 0.0;
  double log_sum = 0.0;
  for (std::size_t order = 1; order <= 4; ++order) {
    auto [matches, total] = clipped_matches(candidate, reference, order);
    if (order == 1 && matches == 0) return 0.0;
    const double denom = std::max(1, total);
    const double p = matches == 0 ? 1.0 / denom : matches / denom;
    log_sum += 0.25 * std::log(p);
  }
  const double c = static_cast<double>(candidate.size());
  const double r = static_cast<double>(reference.size());
  const double bp = c > r ? 1.0 : std::exp(1.0 - r / c);
  return bp * std::exp(log_sum);
}

double rouge1_f1(const std::vector<std::string>& candidate,
                 const std::vector<std::string>& reference) {
  if (candidate.empty() || reference.empty()) return 0.0;
  auto [overlap, total] = clipped_matches(candidate, reference, 1);
  if (overlap == 0) return 0.0;
  const double precision = static_cast<double>(overlap) / static_cast<double>(candidate.size());
  const double recall = static_cast<double>(overlap) / static_cast<double>(reference.size());
  return 2.0 * precision * recall / (precision + recall);
}

TextSimilarity text_similarity(std::string_view candidate, std::string_view reference) {
  const auto cand = tokenize_code(candidate);
  const auto ref = tokenize_code(reference);
  if (cand.empty() || ref.empty()) {
    throw PreconditionError("text_similarity: candidate and reference must have tokens");
  }
  return {100.0 * bleu4(cand, ref), 100.0 * rouge1_f1(cand, ref)};
}

double svd_density(std::size_t violations, std::size_t loc) {
  if (loc == 0) throw PreconditionError("no code");
  return static_cast<double>(violations) / static_cast<double>(loc) * 1000.0;
}

}  // namespace xlr::eval
