"""Synthetic desk-scale corpora for tests and experiment scripts.

Words are built from per-language syllable inventories and drawn with
Zipf-like frequencies, so token counts resemble natural text closely enough
to exercise BPE learning, filtering and mixing.
"""

import itertools
import random

SYLLABLES = {
    "en": ["the", "ing", "er", "an", "re", "on", "st", "th", "ed", "al", "ow", "est", "in", "ch", "sh", "ly"],
    "de": ["sch", "ei", "en", "ung", "ich", "ge", "ver", "ber", "ä", "ö", "ü", "ß", "ten", "st", "au"],
    "ro": ["ă", "â", "î", "ș", "ț", "ul", "ea", "re", "lor", "ii", "nt", "că", "și", "ta", "ar"],
    "cs": ["ř", "č", "ě", "ů", "ní", "pro", "st", "ova", "ch", "ký", "že", "na", "po", "ti"],
    "ru": ["ст", "ов", "но", "ра", "ть", "ени", "ко", "пр", "ый", "ие", "ла", "ще", "чё", "жи", "ъе", "ь", "ю", "я"],
}
PUNCT = [".", ",", "?", "!", "-", "'", '"', ";", ":", "(", ")"]


def make_lexicon(lang: str, size: int, rng: random.Random, max_syllables: int = 4) -> list:
    syl = SYLLABLES[lang]
    if size > sum(len(syl) ** k for k in range(1, max_syllables + 1)):
        raise ValueError(f"cannot build {size} distinct {lang} words from {max_syllables} syllables")
    words = set()
    while len(words) < size:
        words.add("".join(rng.choice(syl) for _ in range(rng.randint(1, max_syllables))))
    return sorted(words)


def make_corpus(n_lines: int, seed: int = 0, langs=("en", "de", "ro", "ru"), lexicon_size: int = 2000,
                min_len: int = 1, max_len: int = 20, capitalize: float = 0.1, punct: float = 0.1,
                max_syllables: int = 4) -> list:
    """Lines of space-separated tokens; each line is in one language."""
    rng = random.Random(seed)
    lexicons = {lang: make_lexicon(lang, lexicon_size, rng, max_syllables) for lang in langs}
    # cumulative once, instead of per call inside choices()
    cum = list(itertools.accumulate(1.0 / (rank + 1) for rank in range(lexicon_size)))
    lines = []
    for _ in range(n_lines):
        lang = rng.choice(langs)
        n = rng.randint(min_len, max_len)
        toks = rng.choices(lexicons[lang], cum_weights=cum, k=n)
        toks = [t.capitalize() if rng.random() < capitalize else t for t in toks]
        if rng.random() < punct:
            toks.append(rng.choice(PUNCT))
        lines.append(" ".join(toks))
    return lines


def make_cyrillic_corpus(n_lines: int, seed: int = 0, alphabet: str = "", max_words: int = 12) -> list:
    """Pure Cyrillic text over ``alphabet`` plus digits and punctuation."""
    rng = random.Random(seed)
    extra = "0123456789.,!?-"
    lines = []
    for _ in range(n_lines):
        words = []
        for _ in range(rng.randint(1, max_words)):
            words.append("".join(rng.choice(alphabet) for _ in range(rng.randint(1, 10))))
            if rng.random() < 0.1:
                words.append(rng.choice(extra))
        lines.append(" ".join(words))
    return lines
