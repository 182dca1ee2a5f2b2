"""Byte-pair encoding: learning merge tables and segmenting text with them.

Words are spelled as characters plus a reserved end-of-word symbol. Learning
repeatedly merges the most frequent adjacent symbol pair; equal counts are
broken by the lexicographically smallest (left, right) pair, comparing the
rendered symbol texts by code point with the end-of-word symbol rendered as
``</w>``. Learning stops after ``num_merges`` rules or once no pair occurs at
least ``min_frequency`` times.
"""

import heapq
import logging
import re
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple

from .textio import InputError, decode_lines

logger = logging.getLogger(__name__)

EOW_LITERAL = "</w>"
CONTINUATION = "@@"
TABLE_HEADER = "#bpe-merges v1"
DEFAULT_MIN_FREQUENCY = 2

_WS_SPLIT = re.compile(r"(\s+)")


class Symbol(NamedTuple):
    text: str
    is_eow: bool = False

    def render(self) -> str:
        return self.text + EOW_LITERAL if self.is_eow else self.text

    @classmethod
    def parse(cls, token: str) -> "Symbol":
        if token.endswith(EOW_LITERAL):
            return cls(token[: -len(EOW_LITERAL)], True)
        return cls(token)


END_OF_WORD = Symbol("", True)


def spell(word: str) -> Tuple[Symbol, ...]:
    """Initial spelling: one symbol per character, then a separate end-of-word symbol."""
    return tuple(Symbol(ch) for ch in word) + (END_OF_WORD,)


def concat(left: Symbol, right: Symbol) -> Symbol:
    return Symbol(left.text + right.text, right.is_eow)


def tie_key(symbol: Symbol) -> Tuple[str, bool]:
    return (symbol.render(), symbol.is_eow)


class MergeRule(NamedTuple):
    left: Symbol
    right: Symbol
    rank: int

    @property
    def pair(self) -> Tuple[Symbol, Symbol]:
        return (self.left, self.right)


@dataclass
class MergeTable:
    rules: List[MergeRule] = field(default_factory=list)
    source_note: str = ""

    def __post_init__(self):
        seen = set()
        for i, rule in enumerate(self.rules):
            if rule.rank != i:
                raise InputError(f"rule {i} carries rank {rule.rank}")
            if rule.pair in seen:
                raise InputError(f"duplicate rule {rule.left.render()} {rule.right.render()}")
            if rule.left.is_eow:
                raise InputError(f"rule {i}: end-of-word symbol on the left")
            for sym in rule.pair:
                if not sym.render() or any(ch.isspace() for ch in sym.text):
                    raise InputError(f"rule {i}: invalid symbol {sym.render()!r}")
            seen.add(rule.pair)
        self._segmenter = None

    @classmethod
    def from_pairs(cls, pairs: Iterable[Tuple[Symbol, Symbol]], source_note: str = ""):
        return cls([MergeRule(l, r, i) for i, (l, r) in enumerate(pairs)], source_note)

    def __len__(self):
        return len(self.rules)

    def __eq__(self, other):
        if not isinstance(other, MergeTable):
            return NotImplemented
        return self.rules == other.rules

    def pairs(self) -> List[Tuple[Symbol, Symbol]]:
        return [r.pair for r in self.rules]

    def truncate(self, k: int) -> "MergeTable":
        note = f"{self.source_note} (first {k} rules)".strip()
        return MergeTable(list(self.rules[:k]), note)

    @property
    def segmenter(self) -> "Segmenter":
        if self._segmenter is None:
            self._segmenter = Segmenter({r.pair: r.rank for r in self.rules})
        return self._segmenter

    def dumps(self) -> str:
        lines = [f"{TABLE_HEADER} count={len(self.rules)}"]
        lines += [f"{r.left.render()} {r.right.render()}" for r in self.rules]
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str, source_note: str = "") -> "MergeTable":
        lines = text.split("\n")
        if lines and lines[-1] == "":
            lines.pop()
        if not lines or not lines[0].startswith(TABLE_HEADER + " count="):
            raise InputError("merge table: missing '#bpe-merges v1 count=<N>' header")
        try:
            count = int(lines[0][len(TABLE_HEADER) + len(" count="):])
        except ValueError:
            raise InputError(f"merge table: bad header {lines[0]!r}") from None
        pairs = []
        for lineno, line in enumerate(lines[1:], start=2):
            parts = line.split(" ")
            if len(parts) != 2 or not all(parts):
                raise InputError(f"merge table line {lineno}: expected '<left> <right>'")
            pairs.append((Symbol.parse(parts[0]), Symbol.parse(parts[1])))
        if count != len(pairs):
            raise InputError(f"merge table: header says {count} rules, found {len(pairs)}")
        return cls.from_pairs(pairs, source_note)

    def save(self, path):
        Path(path).write_bytes(self.dumps().encode("utf-8"))

    @classmethod
    def load(cls, path) -> "MergeTable":
        path = Path(path)
        if not path.exists():
            raise InputError(f"no such file: {path}")
        lines = list(decode_lines(path.read_bytes().splitlines(keepends=True)))
        return cls.loads("\n".join(lines) + "\n", source_note=str(path))


# --------------------------------------------------------------------------
# Learning


def build_vocab(lines: Iterable) -> Counter:
    """Count whitespace-delimited tokens over str or UTF-8 byte lines."""
    vocab = Counter()
    for line in decode_lines(lines):
        vocab.update(line.split())
    return vocab


def _merge_sequence(seq, left, right, merged):
    """Replace (left, right) occurrences leftmost-first without overlap."""
    out = []
    i = 0
    n = len(seq)
    while i < n:
        if i + 1 < n and seq[i] == left and seq[i + 1] == right:
            out.append(merged)
            i += 2
        else:
            out.append(seq[i])
            i += 1
    return out


class BpeLearner:
    """Incremental BPE learner.

    Keeps pair counts and a pair -> words index up to date after each merge,
    so a round touches only the words containing the merged pair. Symbols are
    interned as integers internally.
    """

    def __init__(self, vocab: Dict[str, int], min_frequency: int = DEFAULT_MIN_FREQUENCY):
        if not vocab:
            raise InputError("cannot learn BPE from an empty vocabulary")
        self.min_frequency = min_frequency
        self._symbols: List[Symbol] = []
        self._ids: Dict[Symbol, int] = {}
        self._keys: List[Tuple[str, bool]] = []
        self.words: List[List[int]] = []
        self.freqs: List[int] = []
        for word, freq in sorted(vocab.items()):
            if not word or any(ch.isspace() for ch in word):
                raise InputError(f"vocabulary word {word!r} is empty or contains whitespace")
            if freq < 1:
                raise InputError(f"vocabulary word {word!r} has frequency {freq}")
            self.words.append([self._intern(s) for s in spell(word)])
            self.freqs.append(int(freq))

        self._counts: Dict[Tuple[int, int], int] = defaultdict(int)
        self._index: Dict[Tuple[int, int], set] = defaultdict(set)
        for wi, word in enumerate(self.words):
            for pair in zip(word, word[1:]):
                self._counts[pair] += self.freqs[wi]
                self._index[pair].add(wi)
        self._heap = [(-c, self._pair_key(p), p) for p, c in self._counts.items()]
        heapq.heapify(self._heap)
        self.rules: List[MergeRule] = []

    def _intern(self, sym: Symbol) -> int:
        sid = self._ids.get(sym)
        if sid is None:
            sid = len(self._symbols)
            self._ids[sym] = sid
            self._symbols.append(sym)
            self._keys.append(tie_key(sym))
        return sid

    def _pair_key(self, pair):
        return (self._keys[pair[0]], self._keys[pair[1]])

    def best_pair(self) -> Optional[Tuple[Tuple[int, int], int]]:
        heap = self._heap
        while heap:
            negc, _, pair = heap[0]
            if self._counts.get(pair, 0) == -negc:
                return pair, -negc
            heapq.heappop(heap)
        return None

    def step(self) -> Optional[MergeRule]:
        """Learn one merge; None when no pair reaches the minimum frequency."""
        best = self.best_pair()
        if best is None or best[1] < self.min_frequency:
            return None
        pair, _ = best
        a, b = pair
        merged = self._intern(concat(self._symbols[a], self._symbols[b]))
        counts, index = self._counts, self._index
        touched = set()
        for wi in index.pop(pair):
            old = self.words[wi]
            new = _merge_sequence(old, a, b, merged)
            self.words[wi] = new
            freq = self.freqs[wi]
            old_pairs = Counter(zip(old, old[1:]))
            new_pairs = Counter(zip(new, new[1:]))
            for p, c in old_pairs.items():
                counts[p] -= c * freq
                if p not in new_pairs and p != pair:
                    index[p].discard(wi)
            for p, c in new_pairs.items():
                counts[p] += c * freq
                if p not in old_pairs:
                    index[p].add(wi)
            touched.update(old_pairs)
            touched.update(new_pairs)
        for p in touched:
            c = counts.get(p, 0)
            if c <= 0:
                counts.pop(p, None)
                index.pop(p, None)
            else:
                heapq.heappush(self._heap, (-c, self._pair_key(p), p))
        rule = MergeRule(self._symbols[a], self._symbols[b], len(self.rules))
        self.rules.append(rule)
        return rule

    def run(self, num_merges: int) -> "MergeTable":
        while len(self.rules) < num_merges:
            if self.step() is None:
                break
        return MergeTable(list(self.rules))

    def pair_counts(self) -> Dict[Tuple[Symbol, Symbol], int]:
        sym = self._symbols
        return {(sym[a], sym[b]): c for (a, b), c in self._counts.items()}

    def pair_index(self) -> Dict[Tuple[Symbol, Symbol], set]:
        sym = self._symbols
        return {(sym[a], sym[b]): set(ws) for (a, b), ws in self._index.items() if ws}

    def segmented_vocab(self) -> List[Tuple[Tuple[Symbol, ...], int]]:
        sym = self._symbols
        return [(tuple(sym[i] for i in w), f) for w, f in zip(self.words, self.freqs)]


def learn_bpe(vocab: Dict[str, int], num_merges: int,
              min_frequency: int = DEFAULT_MIN_FREQUENCY) -> MergeTable:
    if num_merges < 1:
        raise InputError(f"num_merges must be positive, got {num_merges}")
    table = BpeLearner(vocab, min_frequency).run(num_merges)
    table.source_note = f"{len(vocab)} word types, {num_merges} merges requested"
    return table


def learn_joint_bpe(source_lines: Iterable, target_lines: Iterable, num_merges: int,
                    min_frequency: int = DEFAULT_MIN_FREQUENCY) -> MergeTable:
    """One table for both sides: word counts are summed across the two corpora."""
    vocab = build_vocab(source_lines)
    vocab.update(build_vocab(target_lines))
    table = learn_bpe(vocab, num_merges, min_frequency)
    table.source_note = "joint source+target; " + table.source_note
    return table


# --------------------------------------------------------------------------
# Application


class Segmenter:
    """Applies merges in ascending priority; each priority fires at most once.

    ``priorities`` maps a symbol pair to a comparable priority (the rule rank
    for a plain table). Skipping straight to the lowest-priority pair present
    that is above the last applied one gives the same result as walking the
    whole table rule by rule.
    """

    def __init__(self, priorities):
        self.priorities = priorities
        self._cache: Dict[str, Tuple[Symbol, ...]] = {}

    def split(self, word: str) -> Tuple[Symbol, ...]:
        cached = self._cache.get(word)
        if cached is not None:
            return cached
        pri = self.priorities
        syms = list(spell(word))
        last = None
        while len(syms) > 1:
            best = best_pri = None
            for pair in zip(syms, syms[1:]):
                p = pri.get(pair)
                if p is None or (last is not None and p <= last):
                    continue
                if best_pri is None or p < best_pri:
                    best, best_pri = pair, p
            if best is None:
                break
            syms = _merge_sequence(syms, best[0], best[1], concat(*best))
            last = best_pri
        if len(syms) > 1 and syms[-1] == END_OF_WORD:
            syms[-2:] = [Symbol(syms[-2].text, True)]
        result = tuple(syms)
        self._cache[word] = result
        return result

    def segment_token(self, token: str) -> str:
        segs = self.split(token)
        return " ".join([s.text + CONTINUATION for s in segs[:-1]] + [segs[-1].text])

    def segment_line(self, line: str) -> str:
        parts = _WS_SPLIT.split(line)
        for i in range(0, len(parts), 2):
            if parts[i]:
                parts[i] = self.segment_token(parts[i])
        return "".join(parts)


def apply_bpe(table: MergeTable, word: str) -> Tuple[Symbol, ...]:
    if not word or any(ch.isspace() for ch in word):
        raise InputError(f"apply_bpe needs a non-empty whitespace-free word, got {word!r}")
    return table.segmenter.split(word)


def segment_line(table: MergeTable, line: str) -> str:
    """Segment every token, keeping the original whitespace between tokens."""
    return table.segmenter.segment_line(line)


def desegment_line(segmented: str) -> str:
    if segmented.endswith(CONTINUATION):
        logger.warning("dangling continuation marker at end of line; stripped")
        segmented = segmented[: -len(CONTINUATION)]
    return segmented.replace(CONTINUATION + " ", "")


def segments_per_word(table: MergeTable, words: Sequence[str]) -> float:
    if not words:
        return 0.0
    seg = table.segmenter
    return sum(len(seg.split(w)) for w in words) / len(words)
