"""Corpus-level BLEU on pre-tokenized text."""

import math
from collections import Counter
from dataclasses import dataclass
from typing import List, Sequence, Union

from .textio import InputError


@dataclass
class BleuReport:
    score: float
    precisions: List[float]
    brevity_penalty: float
    hyp_len: int
    ref_len: int
    matches: List[int]
    totals: List[int]

    def render(self) -> str:
        ps = "/".join(f"{p:.3f}" for p in self.precisions)
        return (
            f"BLEU = {self.score * 100:.2f} (BP={self.brevity_penalty:.3f}, "
            f"p1..p{len(self.precisions)}={ps}, hyp_len={self.hyp_len}, ref_len={self.ref_len})"
        )


def ngram_counts(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def _closest_ref_len(hyp_len: int, ref_lens: Sequence[int]) -> int:
    return min(ref_lens, key=lambda r: (abs(r - hyp_len), r))


def sentence_stats(hyp: Sequence[str], refs: Sequence[Sequence[str]], max_n: int = 4):
    """Clipped matches and totals per order, plus (hyp_len, ref_len)."""
    matches, totals = [], []
    for n in range(1, max_n + 1):
        counts = ngram_counts(hyp, n)
        max_ref = Counter()
        for ref in refs:
            max_ref |= ngram_counts(ref, n)
        matches.append(sum(min(c, max_ref[g]) for g, c in counts.items()))
        totals.append(max(len(hyp) - n + 1, 0))
    return matches, totals, len(hyp), _closest_ref_len(len(hyp), [len(r) for r in refs])


def corpus_bleu(hypotheses: Sequence[str], references: Sequence[Union[str, Sequence[str]]],
                max_n: int = 4, smooth: bool = False) -> BleuReport:
    """BLEU with corpus-aggregated clipped counts.

    ``references`` holds one string per hypothesis, or a sequence of strings
    for multi-reference clipping. A zero precision gives a score of 0 unless
    ``smooth`` is set, which adds one to matches and totals for n > 1.
    """
    if len(hypotheses) != len(references):
        raise InputError(f"{len(hypotheses)} hypotheses but {len(references)} references")
    if not hypotheses:
        raise InputError("empty corpus")
    if max_n < 1:
        raise InputError(f"max_n must be positive, got {max_n}")
    matches = [0] * max_n
    totals = [0] * max_n
    hyp_len = ref_len = 0
    for hyp, ref in zip(hypotheses, references):
        refs = [ref] if isinstance(ref, str) else list(ref)
        m, t, h, r = sentence_stats(hyp.split(), [x.split() for x in refs], max_n)
        for i in range(max_n):
            matches[i] += m[i]
            totals[i] += t[i]
        hyp_len += h
        ref_len += r

    precisions = []
    for n, (m, t) in enumerate(zip(matches, totals), start=1):
        if smooth and n > 1:
            m, t = m + 1, t + 1
        precisions.append(m / t if t else 0.0)

    if hyp_len == 0:
        bp = 0.0
    elif hyp_len < ref_len:
        bp = math.exp(1 - ref_len / hyp_len)
    else:
        bp = 1.0

    if min(precisions) == 0.0:
        score = 0.0
    else:
        score = bp * math.exp(math.fsum(math.log(p) for p in precisions) / max_n)
    return BleuReport(score, precisions, bp, hyp_len, ref_len, matches, totals)
