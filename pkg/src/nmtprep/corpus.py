"""Training-corpus construction: sampling, mixing with copy counts,
length filtering, shuffling and Table-1 style statistics.

Randomness comes from ``random.Random`` (MT19937) and only its ``random()``
method, whose output sequence for a given integer seed is stable across Python
versions and platforms. Indices are derived as ``int(random() * n)``.
"""

import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from .textio import InputError, count_lines, decode_lines

RNG_VERSION = "mt19937-random-v1"
DEFAULT_MAX_LEN = 50

Pair = Tuple[str, str]


@dataclass
class ParallelCorpus:
    source_path: Path
    target_path: Path
    line_count: int

    @classmethod
    def open(cls, source_path, target_path) -> "ParallelCorpus":
        n_src = count_lines(source_path)
        n_tgt = count_lines(target_path)
        if n_src != n_tgt:
            raise InputError(
                f"{source_path} has {n_src} lines but {target_path} has {n_tgt}"
            )
        return cls(Path(source_path), Path(target_path), n_src)

    def __iter__(self) -> Iterator[Pair]:
        with open(self.source_path, "rb") as fs, open(self.target_path, "rb") as ft:
            yield from zip(decode_lines(fs), decode_lines(ft))

    def read_pairs(self) -> List[Pair]:
        return list(self)


def _rng(seed: int) -> random.Random:
    return random.Random(int(seed))


def _below(rng: random.Random, n: int) -> int:
    return int(rng.random() * n)


def reservoir_sample(items: Iterable, n: int, seed: int) -> list:
    """Uniform sample of n items without replacement, in input order.

    Single pass (Algorithm R). Raises InputError when the stream is shorter
    than n.
    """
    if n < 0:
        raise InputError(f"sample size must be non-negative, got {n}")
    rng = _rng(seed)
    reservoir = []
    seen = 0
    for i, item in enumerate(items):
        seen = i + 1
        if i < n:
            reservoir.append((i, item))
        else:
            j = _below(rng, i + 1)
            if j < n:
                reservoir[j] = (i, item)
    if seen < n:
        raise InputError(f"cannot sample {n} lines from a corpus of {seen} lines")
    reservoir.sort(key=lambda entry: entry[0])
    return [item for _, item in reservoir]


def sample_lines(items: Sequence, n: int, seed: int) -> list:
    if n > len(items):
        raise InputError(f"cannot sample {n} lines from a corpus of {len(items)} lines")
    return reservoir_sample(items, n, seed)


def shuffle_corpus(items: Sequence, seed: int) -> list:
    """Seeded Fisher-Yates permutation; pairs move as units."""
    out = list(items)
    rng = _rng(seed)
    for i in range(len(out) - 1, 0, -1):
        j = _below(rng, i + 1)
        out[i], out[j] = out[j], out[i]
    return out


def n_tokens(line: str) -> int:
    return len(line.split())


def length_filter(pairs: Iterable[Pair], max_len: int = DEFAULT_MAX_LEN) -> List[Pair]:
    """Keep a pair iff both sides have at most max_len whitespace tokens."""
    if max_len < 1:
        raise InputError(f"max_len must be positive, got {max_len}")
    return [(s, t) for s, t in pairs if n_tokens(s) <= max_len and n_tokens(t) <= max_len]


@dataclass
class MixComponent:
    corpus: ParallelCorpus
    copies: int = 1
    sample: Optional[int] = None

    def __post_init__(self):
        if self.copies < 1:
            raise InputError(f"copies must be positive, got {self.copies}")
        if self.sample is not None:
            if self.sample < 1:
                raise InputError(f"sample must be positive, got {self.sample}")
            if self.sample > self.corpus.line_count:
                raise InputError(
                    f"sample={self.sample} exceeds the {self.corpus.line_count} lines "
                    f"of {self.corpus.source_path}"
                )

    @property
    def size(self) -> int:
        base = self.corpus.line_count if self.sample is None else self.sample
        return self.copies * base


@dataclass
class MixRecipe:
    components: List[MixComponent]
    seed: int = 0
    max_len: int = DEFAULT_MAX_LEN

    def __post_init__(self):
        if not self.components:
            raise InputError("recipe has no components")

    @property
    def total(self) -> int:
        return sum(c.size for c in self.components)

    @classmethod
    def parse(cls, text: str, base_dir=".") -> "MixRecipe":
        """Recipe lines: ``seed=<int>``, ``max_len=<int>`` and
        ``src<TAB>tgt<TAB>copies=<k>[<TAB>sample=<n>]``; ``#`` starts a comment."""
        base_dir = Path(base_dir)
        seed, max_len, comps = 0, DEFAULT_MAX_LEN, []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            try:
                if "\t" not in line and line.startswith("seed="):
                    seed = int(line[5:])
                    continue
                if "\t" not in line and line.startswith("max_len="):
                    max_len = int(line[8:])
                    continue
                fields = line.split("\t")
                if len(fields) not in (3, 4) or not fields[2].startswith("copies="):
                    raise ValueError("expected src<TAB>tgt<TAB>copies=<k>[<TAB>sample=<n>]")
                copies = int(fields[2][len("copies="):])
                sample = None
                if len(fields) == 4:
                    if not fields[3].startswith("sample="):
                        raise ValueError(f"unexpected field {fields[3]!r}")
                    sample = int(fields[3][len("sample="):])
            except ValueError as exc:
                raise InputError(f"recipe line {lineno}: {exc}") from None
            corpus = ParallelCorpus.open(base_dir / fields[0], base_dir / fields[1])
            comps.append(MixComponent(corpus, copies, sample))
        return cls(comps, seed, max_len)

    @classmethod
    def load(cls, path) -> "MixRecipe":
        path = Path(path)
        if not path.exists():
            raise InputError(f"no such file: {path}")
        return cls.parse(path.read_text(encoding="utf-8"), path.parent)


def iter_mix(recipe: MixRecipe) -> Iterator[Pair]:
    """Components in recipe order, each one's copies back to back.

    Component i is sampled with seed ``recipe.seed + i``; the sample is drawn
    once and then repeated.
    """
    for i, comp in enumerate(recipe.components):
        if comp.sample is None:
            for _ in range(comp.copies):
                yield from comp.corpus
        else:
            chosen = reservoir_sample(comp.corpus, comp.sample, recipe.seed + i)
            for _ in range(comp.copies):
                yield from chosen


def mix_corpora(recipe: MixRecipe) -> List[Pair]:
    return list(iter_mix(recipe))


# --------------------------------------------------------------------------
# Statistics

LABELS = ("parallel", "synthetic-to-EN", "synthetic-from-EN")
ROW_NAMES = {
    "parallel": "parallel",
    "synthetic-to-EN": "synthetic (*→EN)",
    "synthetic-from-EN": "synthetic (EN→*)",
}


@dataclass
class CorpusStats:
    components: List[Tuple[str, str, int]] = field(default_factory=list)

    def by_label(self) -> Dict[str, int]:
        counts = dict.fromkeys(LABELS, 0)
        for _, label, n in self.components:
            counts[label] += n
        return counts

    @property
    def total(self) -> int:
        return sum(n for _, _, n in self.components)

    def millions(self) -> Dict[str, float]:
        return {k: v / 1e6 for k, v in self.by_label().items()}


def corpus_stats(components: Iterable[Tuple[str, str, int]]) -> CorpusStats:
    """components: (name, label, pair count) triples."""
    comps = []
    for name, label, n in components:
        if label not in LABELS:
            raise InputError(f"unknown corpus label {label!r}; expected one of {', '.join(LABELS)}")
        comps.append((name, label, int(n)))
    return CorpusStats(comps)


def render_stats(columns: Dict[str, CorpusStats], scale: float = 1e6, decimals: int = 1) -> str:
    """Aligned table with one row per label plus a total, one column per language pair."""
    names = list(columns)

    def fmt(n):
        return f"{n / scale:.{decimals}f}"

    rows = [["type"] + names]
    for label in LABELS:
        rows.append([ROW_NAMES[label]] + [fmt(columns[c].by_label()[label]) for c in names])
    rows.append(["total"] + [fmt(columns[c].total) for c in names])
    width0 = max(len(r[0]) for r in rows)
    widths = [max(len(r[i]) for r in rows) for i in range(1, len(names) + 1)]
    out = []
    for r in rows:
        cells = [r[0].ljust(width0)] + [cell.rjust(w) for cell, w in zip(r[1:], widths)]
        out.append(" | ".join([cells[0], "  ".join(cells[1:])]) if names else cells[0])
    return "\n".join(out)
