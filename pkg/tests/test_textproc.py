import unicodedata

import pytest
from hypothesis import given, strategies as st

from hindi_politeness.textproc import BIGRAM_SEP, NUMBER, PUNCT, WORD, ngrams, normalize, tokenize

devanagari = st.characters(min_codepoint=0x0900, max_codepoint=0x097F)
mixed_text = st.text(
    alphabet=st.one_of(devanagari, st.sampled_from(list(" \t\n.,!?।॥abcXYZ0129‍‌﻿​ ")),),
    max_size=60,
)


def test_normalize_strips_and_removes_joiners():
    assert normalize("  धन्यवाद‍  ") == "धन्यवाद"


def test_normalize_empty():
    assert normalize("") == ""
    assert normalize("  \n\t ") == ""


def test_normalize_composes_nukta():
    decomposed = "\u0915\u093c"
    # oracle: U+0958 decomposes to exactly this pair, and NFC alone keeps it split
    assert unicodedata.decomposition("\u0958") == "0915 093C"
    assert unicodedata.normalize("NFC", decomposed) == decomposed
    out = normalize(decomposed)
    assert out == "\u0958"
    assert normalize("\u0958") == "\u0958"


def test_normalize_nukta_variants_agree():
    assert normalize("\u091c\u093c\u0930\u093e") == normalize("\u095b\u0930\u093e") == "\u095b\u0930\u093e"


def test_normalize_collapses_whitespace():
    assert normalize("अति\n\n सुन्दर\t रचना ") == "अति सुन्दर रचना"


@given(mixed_text)
def test_normalize_idempotent(text):
    once = normalize(text)
    assert normalize(once) == once


def test_tokenize_three_words():
    toks = tokenize(normalize("अति सुन्दर रचना"))
    assert [t.surface for t in toks] == ["अति", "सुन्दर", "रचना"]
    assert all(t.kind == WORD for t in toks)


def test_tokenize_danda_split():
    toks = tokenize("धन्यवाद।")
    assert [(t.surface, t.kind) for t in toks] == [("धन्यवाद", WORD), ("।", PUNCT)]


def test_tokenize_double_danda_is_punct():
    assert [t.kind for t in tokenize("रचना॥")] == [WORD, PUNCT]


def test_tokenize_script_and_class_boundaries():
    toks = tokenize("rachna सुन्दर 123")
    assert [(t.surface, t.kind) for t in toks] == [("rachna", WORD), ("सुन्दर", WORD), ("123", NUMBER)]


def test_tokenize_keeps_matras_and_nasalization_attached():
    toks = tokenize("करें दीजिए हूँ")
    assert [t.surface for t in toks] == ["करें", "दीजिए", "हूँ"]


def test_each_punctuation_mark_is_a_token():
    assert [t.surface for t in tokenize("रचना...")] == ["रचना", ".", ".", "."]


def test_latin_terms_lowercased_but_surface_kept():
    (tok,) = tokenize("Rachna")
    assert tok.surface == "Rachna"
    assert tok.term == "rachna"


@given(mixed_text)
def test_token_offsets_match_surface(text):
    norm = normalize(text)
    for t in tokenize(norm):
        assert t.start < t.end
        assert norm[t.start:t.end] == t.surface


@given(mixed_text)
def test_tokenize_roundtrip_preserves_words(text):
    words = [t.surface for t in tokenize(normalize(text)) if t.kind == WORD]
    again = [t.surface for t in tokenize(" ".join(words)) if t.kind == WORD]
    assert sorted(again) == sorted(words)


def test_bigrams_use_reserved_separator():
    toks = tokenize("अति सुन्दर रचना")
    assert ngrams(toks, 2) == ["अति" + BIGRAM_SEP + "सुन्दर", "सुन्दर" + BIGRAM_SEP + "रचना"]
    assert BIGRAM_SEP == "\x1f"


def test_ngrams_edge_cases():
    assert ngrams(tokenize("धन्यवाद"), 2) == []
    assert len(ngrams(tokenize("अति सुन्दर रचना"), 1)) == 3
    assert ngrams(tokenize("धन्यवाद। 42 !"), 1) == ["धन्यवाद"]
    with pytest.raises(ValueError):
        ngrams([], 3)


@given(mixed_text)
def test_ngram_counts(text):
    toks = tokenize(normalize(text))
    n_words = sum(t.kind == WORD for t in toks)
    assert len(ngrams(toks, 1)) == n_words
    assert len(ngrams(toks, 2)) == max(0, n_words - 1)
    assert all(BIGRAM_SEP not in u for u in ngrams(toks, 1))
