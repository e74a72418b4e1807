"""Reference values for the text-similarity fixtures.

Runs NLTK's sentence_bleu (SmoothingFunction(epsilon=1).method1) and Google's
rouge-score ROUGE-1 F-measure over the same code tokenizer the C++ metrics use.
The printed numbers are frozen into tests/unit/eval_metrics_test.cpp.

    pip install nltk rouge-score
    python3 tests/oracles/text_metrics_oracle.py
"""
import re

from nltk.translate.bleu_score import SmoothingFunction, sentence_bleu
from rouge_score import rouge_scorer

TOKEN = re.compile(r"[A-Za-z0-9_]+|[^\sA-Za-z0-9_]")


class CodeTokenizer:
    def tokenize(self, text):
        return TOKEN.findall(text)


FIXTURES = [
    ("a b c d e", "a b c d f"),
    ("def add(a, b)\n  a + b\nend\n", "def add(x, y)\n  x + y\nend\n"),
    ("for i in 0..n { total += v[i]; }", "for i in 0..=n { total += v[i]; }"),
    ("x = 1", "x = 2"),
]


def main():
    tok = CodeTokenizer()
    scorer = rouge_scorer.RougeScorer(["rouge1"], tokenizer=tok)
    smooth = SmoothingFunction(epsilon=1).method1
    for cand, ref in FIXTURES:
        b = sentence_bleu([tok.tokenize(ref)], tok.tokenize(cand),
                          weights=(0.25, 0.25, 0.25, 0.25), smoothing_function=smooth)
        r = scorer.score(ref, cand)["rouge1"].fmeasure
        print(f"{cand!r} | {ref!r} -> bleu4={100 * b:.6f} rouge1={100 * r:.6f}")


if __name__ == "__main__":
    main()
