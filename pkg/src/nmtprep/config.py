"""Pipeline settings, read from flat ``key=value`` files (``#`` comments)."""

from dataclasses import dataclass, fields
from pathlib import Path

from .textio import InputError


@dataclass
class PipelineConfig:
    pair: str = ""
    # subword segmentation
    merges: int = 89500
    translit_bpe: bool = False
    # corpus construction
    max_len: int = 50
    seed: int = 1234
    strip_diacritics: str = ""  # side to strip: "", "source" or "target"
    # reranking, ensembling, checkpoints
    r2l_rerank: bool = False
    nbest_size: int = 50
    ensemble_k: int = 4
    patience: int = 10
    validate_every: int = 10000
    save_every: int = 30000
    # pervasive dropout
    dropout: bool = False
    p_word: float = 0.1
    p_layer: float = 0.2
    # recorded only: the network and decoder themselves are not part of this toolkit
    beam_size: int = 12
    minibatch: int = 80
    embedding_size: int = 500
    hidden_size: int = 1024
    clip_norm: float = 1.0

    @classmethod
    def loads(cls, text: str) -> "PipelineConfig":
        types = {f.name: f.type for f in fields(cls)}
        values = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if not sep or key not in types:
                raise InputError(f"config line {lineno}: unknown or malformed setting {raw.strip()!r}")
            values[key] = _convert(types[key], value, lineno)
        return cls(**values)

    @classmethod
    def load(cls, path) -> "PipelineConfig":
        path = Path(path)
        if not path.exists():
            raise InputError(f"no such file: {path}")
        return cls.loads(path.read_text(encoding="utf-8"))

    def dumps(self) -> str:
        out = []
        for f in fields(self):
            v = getattr(self, f.name)
            out.append(f"{f.name}={int(v) if isinstance(v, bool) else v}")
        return "\n".join(out) + "\n"


def _convert(type_name, value, lineno):
    name = type_name if isinstance(type_name, str) else type_name.__name__
    try:
        if name == "bool":
            if value.lower() not in ("0", "1", "true", "false", "yes", "no"):
                raise ValueError(value)
            return value.lower() in ("1", "true", "yes")
        if name == "int":
            return int(value)
        if name == "float":
            return float(value)
        return value
    except ValueError:
        raise InputError(f"config line {lineno}: cannot read {value!r} as {name}") from None
