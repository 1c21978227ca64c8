"""Vocabulary construction and sparse feature vectors.

Feature layout is ``[unigrams | bigrams | structure counts S1..S8]``; each
n-gram block is sorted lexicographically, so the unigram block of a UNI_BI
vocabulary is index-identical to the UNI vocabulary built from the same data.
"""
from __future__ import annotations

import hashlib
import json
import math
from collections import Counter
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .corpus import Comment, Corpus
from .errors import FeatureError
from .structures import KINDS, Lexicon, default_lexicon, profile
from .textproc import ngrams, normalize, tokenize

VOCAB_FORMAT = "vocab-v1"


@dataclass(frozen=True)
class FeatureConfig:
    use_unigrams: bool = True
    use_bigrams: bool = False
    use_structures: bool = False
    min_term_frequency: int = 2
    l2_normalize: bool = True

    def __post_init__(self):
        if not (self.use_unigrams or self.use_bigrams or self.use_structures):
            raise FeatureError("at least one feature family must be enabled")
        if int(self.min_term_frequency) != self.min_term_frequency or self.min_term_frequency < 1:
            raise FeatureError("min_term_frequency must be a positive integer")

    def to_dict(self) -> dict:
        return asdict(self)


UNI = FeatureConfig(True, False, False)
UNI_BI = FeatureConfig(True, True, False)
UNI_BI_STRUCT = FeatureConfig(True, True, True)

PRESETS = {"UNI": UNI, "UNI_BI": UNI_BI, "UNI_BI_STRUCT": UNI_BI_STRUCT}
PRESET_TITLES = {
    "UNI": "Unigrams",
    "UNI_BI": "Unigrams and Bigrams",
    "UNI_BI_STRUCT": "Unigrams, Bigrams and Linguistic Structures",
}


def preset(name: str, **overrides) -> FeatureConfig:
    try:
        base = PRESETS[name.upper()]
    except KeyError:
        raise FeatureError(f"unknown feature preset {name!r}; choose from {sorted(PRESETS)}") from None
    return FeatureConfig(**{**base.to_dict(), **overrides}) if overrides else base


@dataclass(frozen=True, eq=False)
class FeatureVector:
    """Sparse vector; ``indices`` strictly increasing."""

    indices: np.ndarray
    values: np.ndarray
    dimension: int
    fingerprint: str | None = None

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.int64)
        val = np.asarray(self.values, dtype=np.float64)
        if idx.shape != val.shape or idx.ndim != 1:
            raise FeatureError("indices and values must be 1-d arrays of equal length")
        if idx.size:
            if np.any(np.diff(idx) <= 0):
                raise FeatureError("feature indices must be strictly increasing")
            if idx[0] < 0 or idx[-1] >= self.dimension:
                raise FeatureError("feature index out of range")
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "values", val)

    @classmethod
    def from_dense(cls, dense: Sequence[float], fingerprint: str | None = None) -> "FeatureVector":
        dense = np.asarray(dense, dtype=np.float64)
        nz = np.flatnonzero(dense)
        return cls(nz, dense[nz], dense.shape[0], fingerprint)

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.dimension)
        out[self.indices] = self.values
        return out

    def norm(self) -> float:
        return float(np.sqrt(np.dot(self.values, self.values)))

    def __len__(self) -> int:
        return int(self.indices.size)


@dataclass(frozen=True)
class Vocabulary:
    config: FeatureConfig
    unigrams: tuple[str, ...] = ()
    bigrams: tuple[str, ...] = ()
    lexicon_fingerprint: str | None = None
    index: dict = field(init=False, repr=False, compare=False)
    fingerprint: str = field(init=False, compare=False)

    def __post_init__(self):
        terms = self.unigrams + self.bigrams
        index = {t: i for i, t in enumerate(terms)}
        if len(index) != len(terms):
            raise FeatureError("duplicate vocabulary terms")
        object.__setattr__(self, "index", index)
        payload = [self.config.to_dict(), list(self.unigrams), list(self.bigrams)]
        blob = json.dumps(payload, ensure_ascii=False, sort_keys=True).encode("utf-8")
        object.__setattr__(self, "fingerprint", hashlib.sha256(blob).hexdigest()[:16])

    @property
    def n_terms(self) -> int:
        return len(self.unigrams) + len(self.bigrams)

    @property
    def structure_offset(self) -> int | None:
        return self.n_terms if self.config.use_structures else None

    @property
    def dimension(self) -> int:
        return self.n_terms + (len(KINDS) if self.config.use_structures else 0)

    def to_dict(self) -> dict:
        return {
            "format": VOCAB_FORMAT,
            "config": self.config.to_dict(),
            "dimension": self.dimension,
            "fingerprint": self.fingerprint,
            "lexicon_fingerprint": self.lexicon_fingerprint,
            "unigrams": list(self.unigrams),
            "bigrams": list(self.bigrams),
        }

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            json.dump(self.to_dict(), f, ensure_ascii=False, indent=1)
            f.write("\n")

    @classmethod
    def load(cls, path) -> "Vocabulary":
        try:
            with open(path, encoding="utf-8") as f:
                d = json.load(f)
        except json.JSONDecodeError as exc:
            raise FeatureError(f"unreadable vocabulary file {path}: {exc.msg}") from None
        if d.get("format") != VOCAB_FORMAT:
            raise FeatureError(f"unsupported vocabulary format {d.get('format')!r}")
        vocab = cls(FeatureConfig(**d["config"]), tuple(d["unigrams"]), tuple(d["bigrams"]),
                    d.get("lexicon_fingerprint"))
        if vocab.fingerprint != d.get("fingerprint"):
            raise FeatureError(f"vocabulary fingerprint mismatch in {path}")
        return vocab


def _doc_tokens(text: str):
    return tokenize(normalize(text))


def build_vocabulary(train: Corpus | Iterable[Comment], config: FeatureConfig,
                     lexicon: Lexicon | None = None) -> Vocabulary:
    """Collect n-grams whose document frequency reaches ``config.min_term_frequency``."""
    lexicon = lexicon or default_lexicon()
    comments = list(train)
    if not comments:
        raise FeatureError("cannot build a vocabulary from an empty training set")
    df_uni: Counter = Counter()
    df_bi: Counter = Counter()
    for c in comments:
        toks = _doc_tokens(c.text)
        if config.use_unigrams:
            df_uni.update(set(ngrams(toks, 1)))
        if config.use_bigrams:
            df_bi.update(set(ngrams(toks, 2)))
    k = config.min_term_frequency
    uni = tuple(sorted(t for t, n in df_uni.items() if n >= k))
    bi = tuple(sorted(t for t, n in df_bi.items() if n >= k))
    vocab = Vocabulary(config, uni, bi, lexicon.fingerprint)
    if vocab.dimension == 0:
        raise FeatureError(f"vocabulary is empty after pruning at min_term_frequency={k}")
    return vocab


def vectorize(comment: Comment | str, vocab: Vocabulary, config: FeatureConfig | None = None,
              lexicon: Lexicon | None = None) -> FeatureVector:
    config = config or vocab.config
    if config != vocab.config:
        raise FeatureError("feature config differs from the one the vocabulary was built with")
    lexicon = lexicon or default_lexicon()
    if vocab.lexicon_fingerprint is not None and config.use_structures \
            and vocab.lexicon_fingerprint != lexicon.fingerprint:
        raise FeatureError("lexicon differs from the one the vocabulary was built with")
    text = comment if isinstance(comment, str) else comment.text
    toks = _doc_tokens(text)
    counts: Counter = Counter()
    index = vocab.index
    terms = []
    if config.use_unigrams:
        terms += ngrams(toks, 1)
    if config.use_bigrams:
        terms += ngrams(toks, 2)
    for t in terms:
        i = index.get(t)
        if i is not None:
            counts[i] += 1
    if config.use_structures:
        off = vocab.structure_offset
        for j, n in enumerate(profile(toks, lexicon).vector()):
            if n:
                counts[off + j] = n
    idx = np.array(sorted(counts), dtype=np.int64)
    val = np.array([counts[i] for i in idx], dtype=np.float64)
    if config.l2_normalize and val.size:
        val = val / math.sqrt(float(np.dot(val, val)))
    return FeatureVector(idx, val, vocab.dimension, vocab.fingerprint)


def vectorize_corpus(corpus: Iterable[Comment], vocab: Vocabulary,
                     lexicon: Lexicon | None = None) -> list[FeatureVector]:
    return [vectorize(c, vocab, vocab.config, lexicon) for c in corpus]


def write_sparse(path, comments: Sequence[Comment], vectors: Sequence[FeatureVector],
                 vocab: Vocabulary) -> None:
    """Write ``id label idx:val ...`` lines under a dimension/fingerprint header."""
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(f"# dimension={vocab.dimension} fingerprint={vocab.fingerprint}\n")
        for c, v in zip(comments, vectors, strict=True):
            label = c.label.value if c.label is not None else "-"
            feats = " ".join(f"{i}:{x!r}" for i, x in zip(v.indices.tolist(), v.values.tolist()))
            f.write(f"{c.id} {label} {feats}".rstrip() + "\n")


def read_sparse(path) -> tuple[list[tuple[str, str | None, FeatureVector]], str]:
    """Inverse of :func:`write_sparse`; returns rows and the fingerprint."""
    rows = []
    with open(path, encoding="utf-8") as f:
        header = f.readline().split()
        try:
            meta = dict(item.split("=", 1) for item in header[1:])
            dim, fp = int(meta["dimension"]), meta["fingerprint"]
        except (KeyError, ValueError):
            raise FeatureError(f"bad sparse-feature header in {path}") from None
        for lineno, line in enumerate(f, 2):
            parts = line.split()
            if len(parts) < 2:
                raise FeatureError(f"malformed feature line at {path}:{lineno}")
            try:
                pairs = [p.split(":", 1) for p in parts[2:]]
                idx = [int(i) for i, _ in pairs]
                val = [float(x) for _, x in pairs]
            except ValueError:
                raise FeatureError(f"malformed feature pair at {path}:{lineno}") from None
            label = None if parts[1] == "-" else parts[1]
            rows.append((parts[0], label, FeatureVector(np.array(idx, dtype=np.int64), val, dim, fp)))
    return rows, fp
