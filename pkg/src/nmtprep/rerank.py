"""N-best rescoring with right-to-left models, checkpoint ensembling,
checkpoint selection and early stopping.

Scores are sentence-level log-probabilities. Combination is a weighted
arithmetic mean (uniform by default); ties go to the hypothesis with the lower
original rank.
"""

import math
import re
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence

from .textio import InputError, decode_lines

FIELD_SEP = " ||| "
DEFAULT_NBEST_SIZE = 50
DEFAULT_ENSEMBLE_K = 4
DEFAULT_PATIENCE = 10

_WS_SPLIT = re.compile(r"(\s+)")


def format_score(x: float) -> str:
    return repr(float(x))


@dataclass
class Hypothesis:
    sentence_id: int
    tokens: List[str]
    scores: Dict[str, float] = field(default_factory=dict)
    combined: Optional[float] = None

    def dumps(self) -> str:
        scores = " ".join(f"{k}={format_score(v)}" for k, v in self.scores.items())
        combined = "" if self.combined is None else format_score(self.combined)
        return FIELD_SEP.join([str(self.sentence_id), " ".join(self.tokens), scores, combined])

    @classmethod
    def parse(cls, line: str, lineno: int = 0) -> "Hypothesis":
        fields = line.split(FIELD_SEP)
        if len(fields) == 3:
            fields.append("")
        if len(fields) != 4:
            raise InputError(f"n-best line {lineno}: expected 4 ' ||| '-separated fields")
        try:
            sid = int(fields[0])
            scores = {}
            for item in fields[2].split():
                name, _, value = item.rpartition("=")
                if not name:
                    raise ValueError(f"bad score item {item!r}")
                if name in scores:
                    raise ValueError(f"duplicate score name {name!r}")
                scores[name] = float(value)
            combined = float(fields[3]) if fields[3].strip() else None
        except ValueError as exc:
            raise InputError(f"n-best line {lineno}: {exc}") from None
        if sid < 0:
            raise InputError(f"n-best line {lineno}: negative sentence id")
        return cls(sid, fields[1].split(), scores, combined)


@dataclass
class NBestList:
    hypotheses: List[Hypothesis] = field(default_factory=list)
    size: Optional[int] = None

    def __post_init__(self):
        finished = set()
        current = None
        for h in self.hypotheses:
            if h.sentence_id != current:
                if h.sentence_id in finished:
                    raise InputError(f"hypotheses of sentence {h.sentence_id} are not contiguous")
                if current is not None:
                    finished.add(current)
                current = h.sentence_id
        if self.size is not None:
            for group in self.groups():
                if len(group) > self.size:
                    raise InputError(
                        f"sentence {group[0].sentence_id} has {len(group)} hypotheses, "
                        f"more than the declared {self.size}"
                    )

    def __len__(self):
        return len(self.hypotheses)

    def groups(self) -> List[List[Hypothesis]]:
        out: List[List[Hypothesis]] = []
        for h in self.hypotheses:
            if out and out[-1][0].sentence_id == h.sentence_id:
                out[-1].append(h)
            else:
                out.append([h])
        return out

    def dumps(self) -> str:
        return "".join(h.dumps() + "\n" for h in self.hypotheses)

    @classmethod
    def from_lines(cls, lines: Iterable, size: Optional[int] = None) -> "NBestList":
        hyps = [Hypothesis.parse(line, i) for i, line in enumerate(decode_lines(lines), start=1)]
        return cls(hyps, size)

    @classmethod
    def load(cls, path, size: Optional[int] = None) -> "NBestList":
        path = Path(path)
        if not path.exists():
            raise InputError(f"no such file: {path}")
        with open(path, "rb") as fh:
            return cls.from_lines(fh, size)


def reverse_line(line: str) -> str:
    """Reverse token order, keeping whitespace runs; an involution."""
    return "".join(reversed(_WS_SPLIT.split(line)))


def reverse_target(pairs: Iterable) -> list:
    return [(src, reverse_line(tgt)) for src, tgt in pairs]


def reverse_hypotheses(nbest: NBestList) -> NBestList:
    hyps = [replace(h, tokens=h.tokens[::-1], scores=dict(h.scores)) for h in nbest.hypotheses]
    return NBestList(hyps, nbest.size)


def read_score_column(lines: Iterable) -> List[float]:
    out = []
    for lineno, line in enumerate(decode_lines(lines), start=1):
        try:
            out.append(float(line))
        except ValueError:
            raise InputError(f"score file line {lineno}: not a number: {line!r}") from None
    return out


def attach_scores(nbest: NBestList, score_name: str, scores: Sequence[float]) -> NBestList:
    if not score_name or "=" in score_name or any(ch.isspace() for ch in score_name):
        raise InputError(f"invalid score name {score_name!r}")
    if len(scores) != len(nbest.hypotheses):
        raise InputError(
            f"{len(scores)} scores for {len(nbest.hypotheses)} hypotheses ({score_name})"
        )
    hyps = []
    for h, s in zip(nbest.hypotheses, scores):
        if score_name in h.scores:
            raise InputError(f"score {score_name!r} already present on sentence {h.sentence_id}")
        hyps.append(replace(h, tokens=list(h.tokens), scores={**h.scores, score_name: float(s)}))
    return NBestList(hyps, nbest.size)


def rescore(nbest: NBestList, score_names: Sequence[str], weights: Optional[Sequence[float]] = None,
            length_normalize: bool = False) -> NBestList:
    """Fill each hypothesis's combined score with the weighted mean of the named scores."""
    if not score_names:
        raise InputError("no score names given")
    if weights is None:
        weights = [1.0] * len(score_names)
    if len(weights) != len(score_names):
        raise InputError(f"{len(weights)} weights for {len(score_names)} score names")
    total_w = math.fsum(weights)
    if total_w <= 0:
        raise InputError("weights must sum to a positive value")
    hyps = []
    for h in nbest.hypotheses:
        try:
            vals = [h.scores[name] for name in score_names]
        except KeyError as exc:
            raise InputError(f"sentence {h.sentence_id}: missing score {exc.args[0]!r}") from None
        if length_normalize:
            n = max(len(h.tokens), 1)
            vals = [v / n for v in vals]
        combined = math.fsum(w * v for w, v in zip(weights, vals)) / total_w
        hyps.append(replace(h, tokens=list(h.tokens), scores=dict(h.scores), combined=combined))
    return NBestList(hyps, nbest.size)


def select_best(nbest: NBestList) -> List[Hypothesis]:
    """Argmax of the combined score per sentence; the earlier hypothesis wins ties."""
    best = []
    groups = nbest.groups()
    for prev, group in zip([None] + groups[:-1], groups):
        if prev is not None and group[0].sentence_id > prev[0].sentence_id + 1:
            raise InputError(f"sentence {prev[0].sentence_id + 1} has no hypotheses")
        top = group[0]
        for h in group[1:]:
            if h.combined > top.combined:
                top = h
        best.append(top)
    return best


def combine_and_select(nbest: NBestList, score_names: Sequence[str],
                       weights: Optional[Sequence[float]] = None,
                       length_normalize: bool = False) -> List[Hypothesis]:
    return select_best(rescore(nbest, score_names, weights, length_normalize))


def ensemble_scores(columns: Sequence[Sequence[float]]) -> List[float]:
    """Element-wise uniform mean of K score columns."""
    if not columns:
        raise InputError("need at least one score column")
    n = len(columns[0])
    if any(len(c) != n for c in columns):
        raise InputError(f"ragged score columns: lengths {[len(c) for c in columns]}")
    k = len(columns)
    out = []
    for values in zip(*columns):
        # shifted mean: exact when all K values agree
        x0 = values[0]
        out.append(x0 + math.fsum(v - x0 for v in values) / k)
    return out


# --------------------------------------------------------------------------
# Checkpoints and early stopping


class CheckpointEvent(NamedTuple):
    minibatch: int
    checkpoint_id: str
    score: Optional[float] = None


@dataclass
class CheckpointLog:
    events: List[CheckpointEvent] = field(default_factory=list)

    def __post_init__(self):
        for prev, cur in zip(self.events, self.events[1:]):
            if cur.minibatch <= prev.minibatch:
                raise InputError(
                    f"checkpoint log minibatch indices not increasing: {prev.minibatch} then {cur.minibatch}"
                )

    @classmethod
    def from_lines(cls, lines: Iterable) -> "CheckpointLog":
        events = []
        for lineno, line in enumerate(decode_lines(lines), start=1):
            if not line.strip():
                continue
            fields = line.split("\t")
            try:
                if len(fields) not in (2, 3):
                    raise ValueError("expected <minibatch><TAB><checkpoint_id>[<TAB><bleu>]")
                score = float(fields[2]) if len(fields) == 3 else None
                events.append(CheckpointEvent(int(fields[0]), fields[1], score))
            except ValueError as exc:
                raise InputError(f"checkpoint log line {lineno}: {exc}") from None
        return cls(events)

    def dumps(self) -> str:
        out = []
        for e in self.events:
            fields = [str(e.minibatch), e.checkpoint_id]
            if e.score is not None:
                fields.append(format_score(e.score))
            out.append("\t".join(fields) + "\n")
        return "".join(out)


def select_checkpoints(log: CheckpointLog, k: int = DEFAULT_ENSEMBLE_K) -> List[str]:
    """Ids of the last min(k, len(log)) saved checkpoints, in save order."""
    if not log.events:
        raise InputError("empty checkpoint log")
    if k < 1:
        raise InputError(f"k must be positive, got {k}")
    return [e.checkpoint_id for e in log.events[-k:]]


class StopDecision(NamedTuple):
    stop: bool
    best_index: Optional[int]


def early_stop(history: Sequence[float], patience: int = DEFAULT_PATIENCE) -> StopDecision:
    """Stop once the best score (earliest on ties) is at least ``patience``
    validations old."""
    if patience < 1:
        raise InputError(f"patience must be positive, got {patience}")
    best = None
    for i, score in enumerate(history):
        if best is None or score > history[best]:
            best = i
    if best is None:
        return StopDecision(False, None)
    return StopDecision(len(history) - 1 - best >= patience, best)


def first_stop(history: Sequence[float], patience: int = DEFAULT_PATIENCE) -> Optional[int]:
    """Index of the validation after which training would have stopped, if any."""
    best = None
    for i, score in enumerate(history):
        if best is None or score > history[best]:
            best = i
        if i - best >= patience:
            return i
    return None
