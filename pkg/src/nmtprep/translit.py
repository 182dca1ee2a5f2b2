"""ISO 9 (System A) Cyrillic <-> Latin transliteration and bi-script BPE tables.

Russian text is latinized, BPE is learned jointly with English, and each
learned rule is mapped back to Cyrillic so Russian text can be segmented with
both rule sets.
"""

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Dict, Iterable, Optional

from .bpe import MergeRule, MergeTable, Segmenter, Symbol, learn_joint_bpe
from .textio import InputError, decode_lines


class TranslitTable:
    """Bijective scalar map, Cyrillic -> Latin."""

    def __init__(self, pairs: Dict[str, str]):
        for cyr, lat in pairs.items():
            if len(cyr) != 1 or len(lat) != 1:
                raise InputError(f"transliteration entries must be single scalars: {cyr!r} -> {lat!r}")
        inverse = {lat: cyr for cyr, lat in pairs.items()}
        if len(inverse) != len(pairs):
            raise InputError("transliteration table is not one-to-one")
        clash = set(pairs) & set(inverse)
        if clash:
            raise InputError(f"scalars used as both source and target: {sorted(clash)}")
        self.pairs = dict(pairs)
        self.inverse = inverse
        self._fwd = str.maketrans(self.pairs)
        self._inv = str.maketrans(self.inverse)

    @classmethod
    def from_lines(cls, lines: Iterable) -> "TranslitTable":
        pairs = {}
        for lineno, line in enumerate(decode_lines(lines), start=1):
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != 2:
                raise InputError(f"transliteration table line {lineno}: expected '<cyrillic>\\t<latin>'")
            if fields[0] in pairs:
                raise InputError(f"transliteration table line {lineno}: duplicate {fields[0]!r}")
            pairs[fields[0]] = fields[1]
        return cls(pairs)

    @classmethod
    def load(cls, path) -> "TranslitTable":
        path = Path(path)
        if not path.exists():
            raise InputError(f"no such file: {path}")
        with open(path, "rb") as fh:
            return cls.from_lines(fh)

    def dumps(self) -> str:
        return "".join(f"{c}\t{l}\n" for c, l in self.pairs.items())

    def to_latin(self, text: str) -> str:
        return text.translate(self._fwd)

    def to_cyrillic(self, text: str) -> str:
        return text.translate(self._inv)


@lru_cache(maxsize=None)
def iso9() -> TranslitTable:
    data = resources.files("nmtprep").joinpath("data/iso9.tsv").read_bytes()
    return TranslitTable.from_lines(data.splitlines(keepends=True))


def to_latin(text: str, table: Optional[TranslitTable] = None) -> str:
    return (table or iso9()).to_latin(text)


def to_cyrillic(text: str, table: Optional[TranslitTable] = None) -> str:
    return (table or iso9()).to_cyrillic(text)


@dataclass
class BiScriptMergeTable:
    latin: MergeTable
    cyrillic: MergeTable

    def __post_init__(self):
        if len(self.latin) != len(self.cyrillic):
            raise InputError("latin and cyrillic tables differ in length")
        self._segmenter = None

    @classmethod
    def from_latin(cls, latin: MergeTable, table: Optional[TranslitTable] = None):
        table = table or iso9()

        def back(sym):
            return Symbol(table.to_cyrillic(sym.text), sym.is_eow)

        rules = [MergeRule(back(r.left), back(r.right), r.rank) for r in latin.rules]
        note = f"cyrillic image of: {latin.source_note}"
        return cls(latin, MergeTable(rules, note))

    @property
    def segmenter(self) -> Segmenter:
        # a Cyrillic image shares its Latin rule's rank and fires right after it
        if self._segmenter is None:
            pri = {}
            for side, tab in enumerate((self.latin, self.cyrillic)):
                for r in tab.rules:
                    key = (r.rank, side)
                    if r.pair not in pri or key < pri[r.pair]:
                        pri[r.pair] = key
            self._segmenter = Segmenter(pri)
        return self._segmenter

    def save(self, basename):
        self.latin.save(f"{basename}.lat")
        self.cyrillic.save(f"{basename}.cyr")

    @classmethod
    def load(cls, basename) -> "BiScriptMergeTable":
        return cls(MergeTable.load(f"{basename}.lat"), MergeTable.load(f"{basename}.cyr"))


def learn_biscript_bpe(english_lines: Iterable, russian_lines: Iterable, num_merges: int,
                       table: Optional[TranslitTable] = None, **kwargs) -> BiScriptMergeTable:
    table = table or iso9()
    latinized = (table.to_latin(line) for line in decode_lines(russian_lines))
    latin = learn_joint_bpe(english_lines, latinized, num_merges, **kwargs)
    latin.source_note = "english + latinized russian; " + latin.source_note
    return BiScriptMergeTable.from_latin(latin, table)


def segment_russian(tables: BiScriptMergeTable, line: str) -> str:
    return tables.segmenter.segment_line(line)
