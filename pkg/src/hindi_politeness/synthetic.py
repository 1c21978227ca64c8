"""Synthetic labeled corpora for harness checks.

Labels are a fixed function of two structure counts (subjunctive and
honorific verb forms). The words carrying those structures are built from
random roots, so almost every one is a hapax and the n-gram features see
mostly noise. Structure features are needed to recover the labels.
"""
from __future__ import annotations

import numpy as np

from .corpus import Comment, Corpus, PolitenessLabel
from .structures import StructureKind, StructureProfile, profile_text

_CONSONANTS = list("कखगघचछजझटठडढतथदधनपफबभमयरलवशसह")
_VOWEL_SIGNS = ["", "ा", "ि", "ी", "ु", "ू", "ो", "ौ"]
_NOISE_FORMULAIC = ["धन्यवाद", "बधाई", "आभार", "शुक्रिया"]
_HONORIFIC_SUFFIXES = ["िए", "िएगा"]
_SUBJUNCTIVE_SUFFIX = "ें"


def label_rule(p: StructureProfile) -> PolitenessLabel:
    """The generator's ground truth: map structure counts to a label."""
    subj = p.count(StructureKind.SUBJUNCTIVE) > 0
    hon = p.count(StructureKind.HONORIFIC) > 0
    if subj and hon:
        return PolitenessLabel.IMPOLITE
    if subj:
        return PolitenessLabel.POLITE
    if hon:
        return PolitenessLabel.APPROPRIATE
    return PolitenessLabel.NEUTRAL


def _syllable(rng) -> str:
    return _CONSONANTS[rng.integers(len(_CONSONANTS))] + _VOWEL_SIGNS[rng.integers(len(_VOWEL_SIGNS))]


def _root(rng) -> str:
    return _syllable(rng) + _syllable(rng) + _CONSONANTS[rng.integers(len(_CONSONANTS))]


def _filler_vocabulary(rng, size: int) -> list[str]:
    # consonant- or ा-final words never trigger a detector
    words: set[str] = set()
    while len(words) < size:
        w = _root(rng)
        if rng.random() < 0.3:
            w += "ा"
        words.add(w)
    return sorted(words)


def generate_corpus(n: int = 2000, seed: int = 0, *, filler_size: int = 300,
                    min_words: int = 5, max_words: int = 14, name: str = "synthetic") -> Corpus:
    rng = np.random.default_rng(seed)
    filler = _filler_vocabulary(rng, filler_size)
    zipf = 1.0 / np.arange(1, len(filler) + 1)
    zipf /= zipf.sum()
    labels = list(PolitenessLabel)
    comments = []
    for i in range(n):
        target = labels[rng.integers(len(labels))]
        want_subj = target in (PolitenessLabel.POLITE, PolitenessLabel.IMPOLITE)
        want_hon = target in (PolitenessLabel.APPROPRIATE, PolitenessLabel.IMPOLITE)
        while True:
            k = int(rng.integers(min_words, max_words + 1))
            words = [filler[j] for j in rng.choice(len(filler), size=k, p=zipf)]
            if rng.random() < 0.3:
                words.insert(int(rng.integers(len(words) + 1)), _NOISE_FORMULAIC[rng.integers(4)])
            if want_hon:
                verb = _root(rng) + _HONORIFIC_SUFFIXES[rng.integers(2)]
                words.insert(int(rng.integers(len(words) + 1)), verb)
            if want_subj:
                pos = int(rng.integers(1, len(words) + 1))
                words[pos:pos] = [_root(rng) + _SUBJUNCTIVE_SUFFIX, "।"]
            text = " ".join(words)
            if not text.endswith("।"):
                text += " ।"
            if label_rule(profile_text(text)) is target:
                break
        comments.append(Comment(f"syn{i:05d}", text, target))
    return Corpus(tuple(comments), name=name)
