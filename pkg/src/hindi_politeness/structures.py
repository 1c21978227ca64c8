"""Rule-based detectors for conventionalized Hindi politeness structures.

The rules are deliberately permissive: they favour recall over precision,
matching word forms and suffixes on the token stream with no morphological
analysis. All lexical material lives in a :class:`Lexicon`, which ships as an
editable text file (``data/default_lexicon.txt``).
"""
from __future__ import annotations

import enum
import hashlib
import json
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable

from .errors import LexiconError
from .textproc import PUNCT, WORD, Token, normalize, tokenize


class StructureKind(enum.Enum):
    FORMULAIC = "S1"
    JI_PARTICLE = "S2"
    SUBJUNCTIVE = "S3"
    CONDITIONAL = "S4"
    DEONTIC = "S5"
    EPISTEMIC = "S6"
    MINIMIZER = "S7"
    HONORIFIC = "S8"

    @classmethod
    def parse(cls, key: str) -> "StructureKind":
        try:
            return cls(key.upper())
        except ValueError:
            try:
                return cls[key.upper()]
            except KeyError:
                raise LexiconError(f"unknown structure kind {key!r}") from None


KINDS: tuple[StructureKind, ...] = tuple(StructureKind)

SENTENCE_END = frozenset("।॥.?!…")


@dataclass(frozen=True)
class StructureMatch:
    kind: StructureKind
    token_start: int
    token_end: int
    evidence: str

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "start": self.token_start,
                "end": self.token_end, "evidence": self.evidence}


@dataclass(frozen=True)
class StructureProfile:
    counts: dict
    matches: tuple[StructureMatch, ...] = ()

    def count(self, kind: StructureKind) -> int:
        return self.counts[kind]

    def vector(self) -> list[int]:
        """Counts in S1..S8 order."""
        return [self.counts[k] for k in KINDS]

    def to_dict(self) -> dict:
        return {
            "counts": {k.value: self.counts[k] for k in KINDS},
            "matches": [m.to_dict() for m in self.matches],
        }


# ---------------------------------------------------------------------------
# lexicon

@dataclass(frozen=True)
class Lexicon:
    words: dict = field(default_factory=dict)       # kind -> frozenset of whole words
    suffixes: dict = field(default_factory=dict)    # kind -> tuple of suffixes
    conditionals: tuple[tuple[str, str], ...] = ()  # (opener, correlative)
    copula: frozenset = frozenset()
    impolite: frozenset = frozenset()

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        for kind in KINDS:
            if kind is StructureKind.CONDITIONAL:
                if not self.conditionals:
                    raise LexiconError("empty list for required kind S4")
            elif not self.words.get(kind) and not self.suffixes.get(kind):
                raise LexiconError(f"empty list for required kind {kind.value}")
        if not self.copula:
            raise LexiconError("copula exclusion list must not be empty")
        for c in sorted(self.copula):
            if self.matches_kind(c, StructureKind.HONORIFIC):
                raise LexiconError(f"copula entry {c!r} collides with an honorific rule")

    def matches_kind(self, surface: str, kind: StructureKind) -> bool:
        if surface in self.words.get(kind, ()):
            return True
        return any(len(surface) > len(s) and surface.endswith(s)
                   for s in self.suffixes.get(kind, ()))

    @cached_property
    def openers(self) -> dict[str, frozenset]:
        out: dict[str, set] = {}
        for op, corr in self.conditionals:
            out.setdefault(op, set()).add(corr)
        return {k: frozenset(v) for k, v in out.items()}

    @cached_property
    def conditional_markers(self) -> frozenset:
        return frozenset(w for pair in self.conditionals for w in pair)

    @cached_property
    def fingerprint(self) -> str:
        payload = {
            "words": {k.value: sorted(self.words.get(k, ())) for k in KINDS},
            "suffixes": {k.value: sorted(self.suffixes.get(k, ())) for k in KINDS},
            "conditionals": sorted(self.conditionals),
            "copula": sorted(self.copula),
            "impolite": sorted(self.impolite),
        }
        blob = json.dumps(payload, ensure_ascii=False, sort_keys=True).encode("utf-8")
        return hashlib.sha256(blob).hexdigest()[:16]


_SECTION_KEYS = {k.value for k in KINDS} | {"copula", "impolite"}


def _parse_sections(lines: Iterable[str], source: str) -> dict[str, list[tuple[int, str]]]:
    sections: dict[str, list[tuple[int, str]]] = {}
    current = None
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            key = line[1:-1].strip()
            norm_key = key.lower() if key.lower() in ("copula", "impolite") else key.upper()
            if norm_key not in _SECTION_KEYS:
                raise LexiconError(f"unknown structure kind {key!r} at {source}:{lineno}")
            current = norm_key
            sections.setdefault(current, [])
            continue
        if current is None:
            raise LexiconError(f"entry outside any section at {source}:{lineno}")
        entry = normalize(line)
        if any(ch.isspace() for ch in entry):
            raise LexiconError(f"entry {line!r} contains whitespace at {source}:{lineno}")
        sections[current].append((lineno, entry))
    return sections


def _build(sections: dict[str, list[tuple[int, str]]], source: str,
           base: Lexicon | None) -> Lexicon:
    words = {k: set(base.words.get(k, ())) if base else set() for k in KINDS}
    suffixes = {k: list(base.suffixes.get(k, ())) if base else [] for k in KINDS}
    conditionals = list(base.conditionals) if base else []
    copula = set(base.copula) if base else set()
    impolite = set(base.impolite) if base else set()

    for key, entries in sections.items():
        if not entries and key != "impolite":
            raise LexiconError(f"empty list for required kind {key} in {source}")
        for lineno, entry in entries:
            if key == "copula":
                copula.add(entry)
            elif key == "impolite":
                impolite.add(entry)
            elif key == StructureKind.CONDITIONAL.value:
                opener, sep, corr = entry.partition(":")
                if not sep or not opener or not corr:
                    raise LexiconError(f"S4 entries must be opener:correlative at {source}:{lineno}")
                if (opener, corr) not in conditionals:
                    conditionals.append((opener, corr))
            else:
                kind = StructureKind(key)
                if entry.startswith("-"):
                    suffix = entry[1:]
                    if not suffix:
                        raise LexiconError(f"empty suffix at {source}:{lineno}")
                    if suffix not in suffixes[kind]:
                        suffixes[kind].append(suffix)
                else:
                    words[kind].add(entry)
    return Lexicon(
        words={k: frozenset(v) for k, v in words.items()},
        suffixes={k: tuple(v) for k, v in suffixes.items()},
        conditionals=tuple(conditionals),
        copula=frozenset(copula),
        impolite=frozenset(impolite),
    )


@lru_cache(maxsize=1)
def default_lexicon() -> Lexicon:
    text = resources.files(__package__).joinpath("data/default_lexicon.txt").read_text("utf-8")
    return _build(_parse_sections(text.splitlines(), "default_lexicon.txt"), "default_lexicon.txt", None)


def load_lexicon(path=None, *, extend: bool = True) -> Lexicon:
    """Load a lexicon file.

    With no path the built-in default is returned. By default the file's
    entries are added on top of the built-in lists; ``extend=False`` treats
    the file as a complete lexicon, so every kind and ``[copula]`` must be
    present and non-empty.
    """
    if path is None:
        return default_lexicon()
    path = Path(path)
    with open(path, encoding="utf-8-sig") as f:
        sections = _parse_sections(f, path.name)
    return _build(sections, path.name, default_lexicon() if extend else None)


# ---------------------------------------------------------------------------
# detection

def _single_word(kind: StructureKind, tokens: list[Token], lexicon: Lexicon) -> list[StructureMatch]:
    return [StructureMatch(kind, i, i + 1, t.surface)
            for i, t in enumerate(tokens)
            if t.kind == WORD and lexicon.matches_kind(t.surface, kind)]


def _ji_particle(tokens, lexicon):
    # utterance- and sentence-initial जी is usually the interjection "yes"
    out = []
    for i, t in enumerate(tokens):
        if t.kind != WORD or i == 0 or not lexicon.matches_kind(t.surface, StructureKind.JI_PARTICLE):
            continue
        prev = tokens[i - 1]
        if prev.kind == WORD or prev.surface not in SENTENCE_END:
            out.append(StructureMatch(StructureKind.JI_PARTICLE, i, i + 1, t.surface))
    return out


def _clause_final(tokens: list[Token], i: int, markers: frozenset) -> bool:
    for t in tokens[i + 1:]:
        if t.kind == PUNCT:
            return True
        if t.kind == WORD:
            return t.surface in markers
    return True


def _subjunctive(tokens, lexicon):
    markers = lexicon.conditional_markers
    out = []
    for i, t in enumerate(tokens):
        if (t.kind == WORD and t.surface not in lexicon.copula
                and lexicon.matches_kind(t.surface, StructureKind.SUBJUNCTIVE)
                and _clause_final(tokens, i, markers)):
            out.append(StructureMatch(StructureKind.SUBJUNCTIVE, i, i + 1, t.surface))
    return out


def _conditional(tokens, lexicon):
    openers = lexicon.openers
    out = []
    for i, t in enumerate(tokens):
        if t.kind != WORD or t.surface not in openers:
            continue
        wanted = openers[t.surface]
        for j in range(i + 1, len(tokens)):
            if tokens[j].kind == WORD and tokens[j].surface in wanted:
                out.append(StructureMatch(StructureKind.CONDITIONAL, i, j + 1,
                                          f"{t.surface} … {tokens[j].surface}"))
                break
    return out


_DETECTORS = {
    StructureKind.JI_PARTICLE: _ji_particle,
    StructureKind.SUBJUNCTIVE: _subjunctive,
    StructureKind.CONDITIONAL: _conditional,
}


def detect(kind: StructureKind, tokens: list[Token], lexicon: Lexicon | None = None) -> list[StructureMatch]:
    lexicon = lexicon or default_lexicon()
    fn = _DETECTORS.get(kind)
    if fn is None:
        return _single_word(kind, tokens, lexicon)
    return fn(tokens, lexicon)


def profile(tokens: list[Token], lexicon: Lexicon | None = None) -> StructureProfile:
    lexicon = lexicon or default_lexicon()
    matches = []
    counts = {}
    for kind in KINDS:
        found = detect(kind, tokens, lexicon)
        counts[kind] = len(found)
        matches.extend(found)
    matches.sort(key=lambda m: (m.token_start, KINDS.index(m.kind), m.token_end))
    return StructureProfile(counts=counts, matches=tuple(matches))


def profile_text(text: str, lexicon: Lexicon | None = None) -> StructureProfile:
    """Normalize, tokenize and profile raw text in one call."""
    return profile(tokenize(normalize(text)), lexicon)
