"""Romanian diacritic removal.

Both the comma-below (U+0218..U+021B) and the legacy cedilla (U+015E..U+0163)
spellings of s/t are folded, as are decomposed spellings (base letter followed
by a combining breve, circumflex, comma below or cedilla).
"""

import re
import unicodedata

DIACRITIC_MAP = {
    "ă": "a", "â": "a", "î": "i", "ș": "s", "ț": "t", "ş": "s", "ţ": "t",
    "Ă": "A", "Â": "A", "Î": "I", "Ș": "S", "Ț": "T", "Ş": "S", "Ţ": "T",
}

_TRANSLATE = str.maketrans(DIACRITIC_MAP)
# only letter+mark sequences that compose to a mapped scalar
_DECOMPOSED = re.compile("[aA][\u0306\u0302]|[iI]\u0302|[sStT][\u0326\u0327]")


def _compose(match):
    return unicodedata.normalize("NFC", match.group(0))


def strip_diacritics(line: str) -> str:
    return _DECOMPOSED.sub(_compose, line).translate(_TRANSLATE)
