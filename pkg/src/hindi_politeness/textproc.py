"""Normalization, Devanagari-aware tokenization and n-gram extraction."""
from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass

# Composition-excluded nukta letters: NFC leaves these as base + U+093C.
_NUKTA = "़"
_NUKTA_COMPOSE = {
    unicodedata.normalize("NFD", chr(cp)): chr(cp) for cp in range(0x0958, 0x0960)
}
_NUKTA_RE = re.compile("|".join(_NUKTA_COMPOSE))
_INVISIBLE = dict.fromkeys(map(ord, "‌‍﻿￾⁠­"))
_ZERO_WIDTH_SPACE = "​"

BIGRAM_SEP = "\x1f"

# Devanagari letters, vowel signs, nukta, virama, anusvara, candrabindu,
# visarga and the extended block. Dandas (0964/0965), digits (0966-096F) and
# the abbreviation sign (0970) are excluded.
_DEVA = "ऀ-ॣॱ-ॿ꣠-ꣿ"
_LATIN = "A-Za-zÀ-ÖØ-öø-ɏ"
_TOKEN_RE = re.compile(
    rf"(?P<deva>[{_DEVA}]+)|(?P<latin>[{_LATIN}]+)|(?P<number>\d+)|(?P<other>\S)"
)

WORD, PUNCT, NUMBER, OTHER = "word", "punctuation", "number", "other"


def normalize(text: str) -> str:
    """Canonical form shared by corpus text and lexicon entries.

    Strips joiners/BOM, applies NFC, composes nukta letters that NFC leaves
    decomposed, and collapses whitespace.
    """
    if not text:
        return ""
    text = text.translate(_INVISIBLE).replace(_ZERO_WIDTH_SPACE, " ")
    text = unicodedata.normalize("NFC", text)
    if _NUKTA in text:
        text = _NUKTA_RE.sub(lambda m: _NUKTA_COMPOSE[m.group(0)], text)
    return " ".join(text.split())


@dataclass(frozen=True)
class Token:
    surface: str
    start: int
    end: int
    kind: str

    @property
    def is_word(self) -> bool:
        return self.kind == WORD

    @property
    def term(self) -> str:
        """Vocabulary key: the surface, lowercased (a no-op for Devanagari)."""
        return self.surface.lower()


def tokenize(text: str) -> list[Token]:
    """Split normalized text into word, number, punctuation and other tokens.

    Offsets index into ``text``; each non-word, non-number character that is
    not whitespace becomes its own token.
    """
    tokens = []
    for m in _TOKEN_RE.finditer(text):
        group = m.lastgroup
        if group in ("deva", "latin"):
            kind = WORD
        elif group == "number":
            kind = NUMBER
        elif unicodedata.category(m.group())[0] == "P":
            kind = PUNCT
        else:
            kind = OTHER
        tokens.append(Token(m.group(), m.start(), m.end(), kind))
    return tokens


def ngrams(tokens: list[Token], n: int) -> list[str]:
    if n not in (1, 2):
        raise ValueError(f"n must be 1 or 2, got {n}")
    words = [t.term for t in tokens if t.is_word]
    if n == 1:
        return words
    return [a + BIGRAM_SEP + b for a, b in zip(words, words[1:])]
