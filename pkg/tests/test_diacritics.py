import unicodedata

import pytest
from hypothesis import given, strategies as st

from nmtprep.diacritics import DIACRITIC_MAP, strip_diacritics

COMBINING = "\u0327\u0326\u0302\u0306"


@pytest.mark.parametrize("text, expected", [
    ("București", "Bucuresti"),
    ("şi", "si"),  # cedilla
    ("și", "si"),  # comma below
    ("ŢARĂ Îşi", "TARA Isi"),
    ("abc", "abc"),
])
def test_examples(text, expected):
    assert strip_diacritics(text) == expected


def test_map_targets_are_ascii_and_not_sources():
    for src, dst in DIACRITIC_MAP.items():
        assert dst.isascii() and dst.isalpha()
        assert dst not in DIACRITIC_MAP


def test_decomposed_spellings():
    for src in DIACRITIC_MAP:
        decomposed = unicodedata.normalize("NFD", src)
        assert strip_diacritics(decomposed) == DIACRITIC_MAP[src]


def test_cedilla_and_comma_agree():
    assert strip_diacritics("ş ţ Ş Ţ") == strip_diacritics("ș ț Ș Ț")


def test_other_accents_untouched():
    assert strip_diacritics("café naïve ñ") == "café naïve ñ"


@given(st.text())
def test_idempotent(text):
    once = strip_diacritics(text)
    assert strip_diacritics(once) == once


@given(st.text().filter(lambda s: not any(c in COMBINING for c in s)))
def test_scalar_count_preserved(text):
    assert len(strip_diacritics(text)) == len(text)
