"""Corpus model, JSONL/TSV ingestion, seeded splitting and annotator agreement."""
from __future__ import annotations

import enum
import hashlib
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Iterator, Sequence

from .errors import CorpusError
from .textproc import normalize


class PolitenessLabel(enum.Enum):
    """The four politeness levels. Declaration order is the canonical order."""

    NEUTRAL = "neutral"
    APPROPRIATE = "appropriate"
    POLITE = "polite"
    IMPOLITE = "impolite"

    @classmethod
    def parse(cls, value: str) -> "PolitenessLabel":
        try:
            return cls(value.strip().lower())
        except (ValueError, AttributeError):
            raise CorpusError(f"unknown label {value!r}") from None

    @property
    def rank(self) -> int:
        return LABELS.index(self)

    def __lt__(self, other):
        if not isinstance(other, PolitenessLabel):
            return NotImplemented
        return self.rank < other.rank


LABELS: tuple[PolitenessLabel, ...] = tuple(PolitenessLabel)


@dataclass(frozen=True)
class Comment:
    id: str
    text: str
    label: PolitenessLabel | None = None

    def __post_init__(self):
        if not isinstance(self.id, str) or not self.id:
            raise CorpusError("comment id must be a non-empty string")
        if not isinstance(self.text, str) or not normalize(self.text):
            raise CorpusError(f"comment {self.id!r} has empty text")

    def to_record(self) -> dict:
        rec = {"id": self.id, "text": self.text}
        if self.label is not None:
            rec["label"] = self.label.value
        return rec


@dataclass(frozen=True)
class Corpus:
    comments: tuple[Comment, ...]
    name: str = "corpus"

    def __post_init__(self):
        object.__setattr__(self, "comments", tuple(self.comments))
        seen = set()
        for c in self.comments:
            if c.id in seen:
                raise CorpusError(f"duplicate id {c.id!r} in {self.name}")
            seen.add(c.id)

    def __len__(self) -> int:
        return len(self.comments)

    def __iter__(self) -> Iterator[Comment]:
        return iter(self.comments)

    def __getitem__(self, i):
        return self.comments[i]

    @property
    def ids(self) -> list[str]:
        return [c.id for c in self.comments]

    @property
    def is_labeled(self) -> bool:
        return all(c.label is not None for c in self.comments)


# ---------------------------------------------------------------------------
# ingestion

def _infer_format(path: Path) -> str:
    return "tsv" if path.suffix.lower() in (".tsv", ".tab") else "jsonl"


def _parse_label(raw, lineno: int) -> PolitenessLabel | None:
    if raw is None or raw == "" or raw == "-":
        return None
    if not isinstance(raw, str):
        raise CorpusError(f"label must be a string at line {lineno}")
    try:
        return PolitenessLabel.parse(raw)
    except CorpusError:
        raise CorpusError(f"unknown label {raw!r} at line {lineno}") from None


def _iter_jsonl(lines: Iterable[str], require_text: bool = True):
    for lineno, line in enumerate(lines, 1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CorpusError(f"malformed JSON at line {lineno}: {exc.msg}") from None
        if not isinstance(rec, dict):
            raise CorpusError(f"malformed record at line {lineno}: expected an object")
        rid = rec.get("id")
        if isinstance(rid, int) and not isinstance(rid, bool):
            rid = str(rid)
        if not isinstance(rid, str) or not rid:
            raise CorpusError(f"malformed record at line {lineno}: missing id")
        text = rec.get("text")
        if require_text and (not isinstance(text, str) or not normalize(text)):
            raise CorpusError(f"malformed record at line {lineno}: missing or empty text")
        yield lineno, rid, text, _parse_label(rec.get("label"), lineno)


def _iter_tsv(lines: Iterable[str], require_text: bool = True):
    for lineno, line in enumerate(lines, 1):
        line = line.rstrip("\r\n")
        if not line.strip():
            continue
        parts = line.split("\t", 2)
        if len(parts) < 2 or (require_text and len(parts) < 3):
            raise CorpusError(f"malformed record at line {lineno}: expected id<TAB>label<TAB>text")
        rid = parts[0].strip()
        text = parts[2] if len(parts) == 3 else None
        if not rid:
            raise CorpusError(f"malformed record at line {lineno}: missing id")
        if require_text and not normalize(text):
            raise CorpusError(f"malformed record at line {lineno}: empty text")
        yield lineno, rid, text, _parse_label(parts[1].strip(), lineno)


def _records(path: Path, fmt: str | None, require_text: bool):
    fmt = fmt or _infer_format(path)
    if fmt not in ("jsonl", "tsv"):
        raise CorpusError(f"unsupported corpus format {fmt!r}")
    reader = _iter_jsonl if fmt == "jsonl" else _iter_tsv
    with open(path, encoding="utf-8-sig") as f:
        yield from reader(f, require_text)


def load_corpus(path, format: str | None = None) -> Corpus:
    """Read a corpus file, keeping file order.

    ``format`` is ``"jsonl"`` or ``"tsv"``; when omitted it is inferred from
    the file extension (``.tsv``/``.tab`` means TSV, anything else JSONL).
    """
    path = Path(path)
    comments = []
    seen: dict[str, int] = {}
    for lineno, rid, text, label in _records(path, format, require_text=True):
        if rid in seen:
            raise CorpusError(f"duplicate id {rid!r} at line {lineno} (first seen at line {seen[rid]})")
        seen[rid] = lineno
        comments.append(Comment(rid, text, label))
    return Corpus(tuple(comments), name=path.stem)


def load_annotations(path, format: str | None = None) -> list[tuple[str, PolitenessLabel]]:
    """Read (id, label) pairs from one annotator's file. Text is optional here."""
    path = Path(path)
    out = []
    seen = set()
    for lineno, rid, _text, label in _records(path, format, require_text=False):
        if label is None:
            raise CorpusError(f"missing label at line {lineno}")
        if rid in seen:
            raise CorpusError(f"duplicate id {rid!r} at line {lineno}")
        seen.add(rid)
        out.append((rid, label))
    return out


def write_corpus(corpus: Corpus, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for c in corpus:
            f.write(json.dumps(c.to_record(), ensure_ascii=False) + "\n")


# ---------------------------------------------------------------------------
# splitting

def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        # 0.7 should mean 7/10, not the nearest binary double
        return Fraction(repr(x))
    return Fraction(x)


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: Fraction = Fraction(7, 10)
    test_fraction: Fraction = Fraction(1, 10)
    validation_fraction: Fraction = Fraction(2, 10)
    seed: int = 0

    def __post_init__(self):
        for name in ("train_fraction", "test_fraction", "validation_fraction"):
            value = _as_fraction(getattr(self, name))
            if not 0 < value < 1:
                raise CorpusError(f"{name} must lie in (0, 1), got {float(value)}")
            object.__setattr__(self, name, value)
        total = self.train_fraction + self.test_fraction + self.validation_fraction
        if abs(float(total) - 1.0) > 1e-9:
            raise CorpusError(f"split fractions must sum to 1, got {float(total)}")
        if not 0 <= self.seed < 2**64:
            raise CorpusError("seed must be a 64-bit unsigned integer")

    def sizes(self, n: int) -> tuple[int, int, int]:
        n_train = math.floor(n * self.train_fraction)
        n_test = math.floor(n * self.test_fraction)
        return n_train, n_test, n - n_train - n_test

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "train_fraction": float(self.train_fraction),
            "test_fraction": float(self.test_fraction),
            "validation_fraction": float(self.validation_fraction),
        }


def split_hash(seed: int, comment_id: str) -> float:
    """Map (seed, id) to a uniform real in [0, 1)."""
    h = hashlib.blake2b(f"{seed}\x00{comment_id}".encode("utf-8"), digest_size=8)
    return int.from_bytes(h.digest(), "big") / 2**64


def split(corpus: Corpus, spec: SplitSpec | None = None) -> tuple[Corpus, Corpus, Corpus]:
    """Partition ``corpus`` into (train, test, validation).

    Every id is hashed together with the seed to a point in [0, 1); the unit
    interval is cut into consecutive train/test/validation buckets. Bucket
    sizes are then made exact (floor of N times each fraction, remainder to
    validation) by ranking ids on their hash value, so the outcome depends
    on the seed and the id set only. Each part keeps the input order.
    """
    spec = spec or SplitSpec()
    if len(corpus) == 0:
        raise CorpusError("cannot split an empty corpus")
    n_train, n_test, _ = spec.sizes(len(corpus))
    ranked = sorted(corpus.ids, key=lambda i: (split_hash(spec.seed, i), i))
    bucket = {}
    for pos, cid in enumerate(ranked):
        bucket[cid] = 0 if pos < n_train else 1 if pos < n_train + n_test else 2
    parts: list[list[Comment]] = [[], [], []]
    for c in corpus:
        parts[bucket[c.id]].append(c)
    names = ("train", "test", "valid")
    return tuple(Corpus(tuple(p), name=f"{corpus.name}.{nm}") for p, nm in zip(parts, names))


def write_split(corpus: Corpus, spec: SplitSpec, prefix) -> dict:
    """Write ``prefix.{train,test,valid}.jsonl`` plus ``prefix.manifest.json``."""
    prefix = str(prefix)
    train, test, valid = split(corpus, spec)
    files = {}
    for part, suffix in ((train, "train"), (test, "test"), (valid, "valid")):
        out = f"{prefix}.{suffix}.jsonl"
        write_corpus(part, out)
        files[suffix] = Path(out).name
    manifest = {
        "corpus": corpus.name,
        "n": len(corpus),
        **spec.to_dict(),
        "counts": {"train": len(train), "test": len(test), "validation": len(valid)},
        "files": files,
    }
    with open(f"{prefix}.manifest.json", "w", encoding="utf-8", newline="\n") as f:
        json.dump(manifest, f, ensure_ascii=False, indent=2)
        f.write("\n")
    return manifest


# ---------------------------------------------------------------------------
# agreement

@dataclass(frozen=True)
class AgreementReport:
    n_items: int
    percent_agreement: float
    cohen_kappa: float | None  # None: chance agreement is 1, kappa undefined
    confusion: tuple[tuple[int, ...], ...] = field(repr=False)

    def to_dict(self) -> dict:
        return {
            "n_items": self.n_items,
            "percent_agreement": self.percent_agreement,
            "cohen_kappa": self.cohen_kappa,
            "labels": [lab.value for lab in LABELS],
            "confusion": [list(r) for r in self.confusion],
        }


def compute_agreement(a: Sequence[tuple[str, PolitenessLabel]],
                      b: Sequence[tuple[str, PolitenessLabel]]) -> AgreementReport:
    """Percent agreement and Cohen's kappa between two annotators.

    Rows of the confusion matrix are annotator ``a``, columns annotator ``b``.
    Kappa is computed exactly in rationals before conversion to float.
    """
    da, db = dict(a), dict(b)
    if len(da) != len(a) or len(db) != len(b):
        raise CorpusError("duplicate ids in annotation list")
    if not da:
        raise CorpusError("no annotations to compare")
    if da.keys() != db.keys():
        missing = sorted(da.keys() ^ db.keys())[:5]
        raise CorpusError(f"annotators cover different id sets (e.g. {missing})")
    k = len(LABELS)
    conf = [[0] * k for _ in range(k)]
    for cid, la in da.items():
        conf[la.rank][db[cid].rank] += 1
    n = len(da)
    agreed = sum(conf[i][i] for i in range(k))
    rows = [sum(r) for r in conf]
    cols = [sum(conf[i][j] for i in range(k)) for j in range(k)]
    chance = sum(r * c for r, c in zip(rows, cols))  # p_e * n^2
    if chance == n * n:
        kappa = None
    else:
        kappa = float(Fraction(agreed * n - chance, n * n - chance))
    return AgreementReport(
        n_items=n,
        percent_agreement=float(Fraction(agreed, n)),
        cohen_kappa=kappa,
        confusion=tuple(tuple(r) for r in conf),
    )
