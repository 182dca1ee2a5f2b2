"""Pervasive-dropout mask plans.

A plan holds one keep-mask per network layer, to be reused at every time
step, and an independent keep/drop decision for every source and target token
position (token-level word dropout: repeated words are dropped independently).
Masks are plain 0/1 indicators; ``scaled`` only records whether the consumer
should rescale kept units by 1/(1-p).
"""

from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from .textio import InputError

PLAN_HEADER = "#maskplan v1"
DEFAULT_P_WORD = 0.1
DEFAULT_P_LAYER = 0.2
# embedding and hidden-state sizes of the baseline network
DEFAULT_LAYER_SIZES = (500, 1024)


@dataclass
class DropoutConfig:
    p_word: float = DEFAULT_P_WORD
    p_layer: float = DEFAULT_P_LAYER
    layer_sizes: Tuple[int, ...] = DEFAULT_LAYER_SIZES
    seed: int = 0
    scaled: bool = False

    def __post_init__(self):
        for name in ("p_word", "p_layer"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise InputError(f"{name} must lie in [0, 1], got {p}")
        self.layer_sizes = tuple(int(n) for n in self.layer_sizes)
        if any(n < 1 for n in self.layer_sizes):
            raise InputError(f"layer sizes must be positive: {self.layer_sizes}")
        if not 0 <= self.seed < 2 ** 64:
            raise InputError(f"seed must be a 64-bit unsigned integer, got {self.seed}")


@dataclass
class MaskPlan:
    config: DropoutConfig
    layer_masks: List[np.ndarray]
    word_src: np.ndarray
    word_tgt: np.ndarray

    def dumps(self) -> str:
        cfg = self.config
        lines = [
            f"{PLAN_HEADER} seed={cfg.seed} p_word={cfg.p_word!r} "
            f"p_layer={cfg.p_layer!r} scaled={int(cfg.scaled)}"
        ]
        for i, mask in enumerate(self.layer_masks):
            lines.append(f"L{i} {_bits(mask)}")
        lines.append(f"WSRC {_bits(self.word_src)}")
        lines.append(f"WTGT {_bits(self.word_tgt)}")
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "MaskPlan":
        lines = text.rstrip("\n").split("\n")
        head = lines[0].split(" ")
        if " ".join(head[:2]) != PLAN_HEADER:
            raise InputError("mask plan: missing '#maskplan v1' header")
        try:
            opts = dict(item.split("=", 1) for item in head[2:])
            layers, src, tgt = [], None, None
            for line in lines[1:]:
                tag, _, bits = line.partition(" ")
                arr = np.array([c == "1" for c in bits], dtype=bool)
                if tag.startswith("L"):
                    if int(tag[1:]) != len(layers):
                        raise ValueError(f"layer {tag} out of order")
                    layers.append(arr)
                elif tag == "WSRC":
                    src = arr
                elif tag == "WTGT":
                    tgt = arr
                else:
                    raise ValueError(f"unknown line tag {tag!r}")
            cfg = DropoutConfig(float(opts["p_word"]), float(opts["p_layer"]),
                                tuple(len(m) for m in layers), int(opts["seed"]),
                                opts["scaled"] == "1")
        except (KeyError, ValueError) as exc:
            raise InputError(f"mask plan: {exc}") from None
        if src is None or tgt is None:
            raise InputError("mask plan: missing WSRC/WTGT line")
        return cls(cfg, layers, src, tgt)

    def apply_layer(self, layer: int, states: np.ndarray) -> np.ndarray:
        """Mask a (time, units) array with the layer's single mask at every step."""
        mask = self.layer_masks[layer].astype(states.dtype)
        if self.config.scaled and self.config.p_layer < 1.0:
            mask = mask / (1.0 - self.config.p_layer)
        return states * mask


def _bits(mask) -> str:
    return "".join("1" if b else "0" for b in mask)


def make_mask_plan(cfg: DropoutConfig, src_len: int, tgt_len: int, pair_index: int = 0) -> MaskPlan:
    """Deterministic in (cfg.seed, pair_index, src_len, tgt_len).

    ``pair_index`` gives each sentence pair of a corpus its own draw.
    """
    if src_len < 0 or tgt_len < 0 or pair_index < 0:
        raise InputError("lengths and pair index must be non-negative")
    rng = np.random.default_rng([cfg.seed, pair_index, src_len, tgt_len])
    layers = [rng.random(n) >= cfg.p_layer for n in cfg.layer_sizes]
    word_src = rng.random(src_len) >= cfg.p_word
    word_tgt = rng.random(tgt_len) >= cfg.p_word
    return MaskPlan(cfg, layers, word_src, word_tgt)


def make_corpus_plans(cfg: DropoutConfig, lengths: Sequence[Tuple[int, int]]) -> List[MaskPlan]:
    return [make_mask_plan(cfg, s, t, i) for i, (s, t) in enumerate(lengths)]
