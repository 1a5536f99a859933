#!/usr/bin/env python3
"""Reference values for the overlap metrics and the Porter stemmer.

BLEU, GLEU, METEOR and Porter stems come from NLTK; ROUGE-L from a direct
LCS dynamic programme. METEOR runs with an empty synonym source, so only the
exact and stem stages contribute. Writes tests/data/oracles/metrics.json.
"""
import json
import re
import warnings
from pathlib import Path

from nltk.stem.porter import PorterStemmer
from nltk.translate.bleu_score import SmoothingFunction, sentence_bleu
from nltk.translate.gleu_score import sentence_gleu
from nltk.translate.meteor_score import meteor_score


warnings.filterwarnings("ignore", category=UserWarning)


class NoSynonyms:
    def synsets(self, *args, **kwargs):
        return []


STEMMER = PorterStemmer(mode=PorterStemmer.ORIGINAL_ALGORITHM)
SMOOTH = SmoothingFunction(epsilon=0.1).method1

PAIRS = [
    ("address of dcu", ["what is the address of dcu"]),
    ("what is the address of", ["what is the address of dcu"]),
    ("what is the address of dcu", ["what is the address of dcu"]),
    ("who wrote the novel dracula", ["who is the author of dracula"]),
    ("when was the eiffel tower completed", ["in which year was the eiffel tower finished"]),
    ("the the the the", ["the cat sat on the mat"]),
    ("which river flows through dublin city", ["what river runs through dublin"]),
    ("how many players are on a team", ["how many players does a team have", "a team has how many players"]),
    ("where did the running athletes compete", ["where were the athletes competing in the race"]),
    ("what", ["what is it"]),
    ("is it raining in cork today", ["is it raining today in cork"]),
    ("which scientist discovered radium and polonium", ["who discovered polonium", "which scientists discovered radium"]),
    ("the quick brown fox jumps over the lazy dog", ["the lazy dog was jumped over by a quick brown fox"]),
    ("generalizations are hopeful", ["hopefully general"]),
]


def lcs(a, b):
    dp = [[0] * (len(b) + 1) for _ in range(len(a) + 1)]
    for i in range(1, len(a) + 1):
        for j in range(1, len(b) + 1):
            dp[i][j] = dp[i - 1][j - 1] + 1 if a[i - 1] == b[j - 1] else max(dp[i - 1][j], dp[i][j - 1])
    return dp[-1][-1]


def rouge_l(c, r):
    l = lcs(c, r)
    if l == 0:
        return 0.0
    p, rec = l / len(c), l / len(r)
    return 100.0 * 2 * p * rec / (p + rec)


cases = []
for cand, refs in PAIRS:
    c = cand.split()
    rs = [r.split() for r in refs]
    case = {"candidate": c, "references": rs}
    for n in range(1, 5):
        w = tuple([1.0 / n] * n)
        case[f"bleu{n}_none"] = 100.0 * sentence_bleu(rs, c, weights=w)
        case[f"bleu{n}_eps"] = 100.0 * sentence_bleu(rs, c, weights=w, smoothing_function=SMOOTH)
    case["gleu"] = 100.0 * sentence_gleu(rs, c)
    case["rouge_l"] = rouge_l(c, rs[0])
    case["meteor"] = 100.0 * meteor_score([rs[0]], c, stemmer=STEMMER, wordnet=NoSynonyms())
    cases.append(case)

root = Path(__file__).resolve().parents[2]
words = sorted(set(re.findall(r"[a-z]+", (root / "tests/data/stem_corpus.txt").read_text().lower())))
words = [w for w in words if len(w) > 2]
stems = {w: STEMMER.stem(w) for w in words}

dest = root / "tests/data/oracles/metrics.json"
dest.write_text(json.dumps({"pairs": cases, "stems": stems}, indent=1) + "\n")
print(f"wrote {dest}: {len(cases)} pairs, {len(stems)} stems")
