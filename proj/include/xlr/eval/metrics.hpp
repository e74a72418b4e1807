#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace xlr::eval {

// Unbiased Pass@k estimator 1 - C(n-c, k) / C(n, k), evaluated as the product
// prod_{i=n-c+1}^{n} (1 - k/i) so no binomial is ever formed.
// Requires 0 <= c <= n and 1 <= k <= n; throws PreconditionError otherwise.
double pass_at_k(int n, int c, int k);

// Code tokenizer shared by BLEU and ROUGE: identifier/number runs
// ([A-Za-z0-9_]+) are one token, every other non-space character is a token
// on its own, whitespace separates. Case-sensitive.
std::vector<std::string> tokenize_code(std::string_view text);

// Sentence BLEU-4, uniform weights, single reference, brevity penalty.
// Orders with zero clipped matches get one added to the numerator; with no
// unigram match at all the score is 0. Range [0, 1].
double bleu4(const std::vector<std::string>& candidate,
             const std::vector<std::string>& reference);

// ROUGE-1 F1 over clipped unigram counts. Range [0, 1].
double rouge1_f1(const std::vector<std::string>& candidate,
                 const std::vector<std::string>& reference);

struct TextSimilarity {
  double bleu4 = 0;   // percentage
  double rouge1 = 0;  // percentage
};

// Throws PreconditionError when either text has no tokens.
TextSimilarity text_similarity(std::string_view candidate, std::string_view reference);

// violations per thousand lines of code. Throws PreconditionError when loc == 0.
double svd_density(std::size_t violations, std::size_t loc);

}  // namespace xlr::eval
