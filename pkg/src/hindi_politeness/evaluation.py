"""Classification metrics, the feature-ablation harness and lambda tuning."""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Sequence

from .corpus import LABELS, Corpus, PolitenessLabel, SplitSpec, split
from .errors import ModelError
from .features import (PRESET_TITLES, PRESETS, FeatureConfig, FeatureVector,
                       build_vocabulary, vectorize_corpus)
from .structures import Lexicon, default_lexicon
from .svm import SvmModel, TrainConfig, predict, train

# Inter-annotator agreement reported for the original annotated corpus.
# A published reference figure, never computed here.
HUMAN_AGREEMENT_REFERENCE = 0.79
HUMAN_ROW_TITLE = "Human annotators (reported agreement, reference only)"

DEFAULT_LAMBDA_GRID = (1e-2, 1e-3, 1e-4, 1e-5, 1e-6)


@dataclass(frozen=True)
class LabelScores:
    precision: float | None   # None: no predictions of this label
    recall: float | None      # None: label absent from gold
    f1: float | None
    support: int

    def to_dict(self) -> dict:
        return {"precision": self.precision, "recall": self.recall, "f1": self.f1, "support": self.support}


@dataclass(frozen=True)
class Metrics:
    n: int
    accuracy: float
    per_label: dict                       # PolitenessLabel -> LabelScores
    confusion: tuple[tuple[int, ...], ...] = field(repr=False)  # gold rows, predicted columns

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "accuracy": self.accuracy,
            "labels": [lab.value for lab in LABELS],
            "per_label": {lab.value: self.per_label[lab].to_dict() for lab in LABELS},
            "confusion": [list(r) for r in self.confusion],
        }


def _ratio(num: int, den: int) -> float | None:
    return num / den if den else None


def metrics_from_labels(gold: Sequence[PolitenessLabel], predicted: Sequence[PolitenessLabel]) -> Metrics:
    if len(gold) != len(predicted):
        raise ValueError("gold and predicted sequences differ in length")
    if not gold:
        raise ValueError("cannot score an empty test set")
    k = len(LABELS)
    conf = [[0] * k for _ in range(k)]
    for g, p in zip(gold, predicted):
        conf[g.rank][p.rank] += 1
    per_label = {}
    for i, lab in enumerate(LABELS):
        tp = conf[i][i]
        pred_total = sum(conf[j][i] for j in range(k))
        gold_total = sum(conf[i])
        prec, rec = _ratio(tp, pred_total), _ratio(tp, gold_total)
        if prec is None or rec is None:
            f1 = None
        elif prec + rec == 0:
            f1 = 0.0
        else:
            f1 = 2 * prec * rec / (prec + rec)
        per_label[lab] = LabelScores(prec, rec, f1, gold_total)
    n = len(gold)
    return Metrics(n, sum(conf[i][i] for i in range(k)) / n, per_label, tuple(map(tuple, conf)))


def evaluate(model: SvmModel, test: Sequence[tuple[FeatureVector, PolitenessLabel | None]]) -> Metrics:
    if not test:
        raise ModelError("cannot evaluate on an empty test set")
    gold, pred = [], []
    for pos, (x, label) in enumerate(test):
        if label is None:
            raise ModelError(f"unlabeled test item at position {pos}")
        gold.append(label)
        pred.append(predict(model, x).label)
    return metrics_from_labels(gold, pred)


def format_metrics(m: Metrics) -> str:
    def pct(x):
        return "   n/a" if x is None else f"{100 * x:6.2f}"

    lines = [f"accuracy {100 * m.accuracy:.2f}%  (n={m.n})", "",
             f"{'label':<12}{'prec':>8}{'recall':>8}{'f1':>8}{'support':>9}"]
    for lab in LABELS:
        s = m.per_label[lab]
        lines.append(f"{lab.value:<12}{pct(s.precision):>8}{pct(s.recall):>8}{pct(s.f1):>8}{s.support:>9}")
    lines += ["", "confusion (gold rows, predicted columns)",
              " " * 12 + "".join(f"{lab.value[:10]:>12}" for lab in LABELS)]
    for lab, row in zip(LABELS, m.confusion):
        lines.append(f"{lab.value:<12}" + "".join(f"{c:>12}" for c in row))
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# ablation

@dataclass(frozen=True)
class AblationRow:
    preset: str
    config: FeatureConfig
    metrics: Metrics
    dimension: int
    test_ids: tuple[str, ...] = field(repr=False)

    @property
    def title(self) -> str:
        return PRESET_TITLES.get(self.preset, self.preset)


@dataclass(frozen=True)
class AblationReport:
    rows: tuple[AblationRow, ...]
    split_spec: SplitSpec
    train_config: TrainConfig
    split_sizes: tuple[int, int, int]
    human_reference: float | None = HUMAN_AGREEMENT_REFERENCE

    def accuracy(self, preset: str) -> float:
        for r in self.rows:
            if r.preset == preset:
                return r.metrics.accuracy
        raise KeyError(preset)

    def to_dict(self) -> dict:
        out = {
            "split": {**self.split_spec.to_dict(),
                      "counts": dict(zip(("train", "test", "validation"), self.split_sizes))},
            "train_config": self.train_config.to_dict(),
            "rows": [{"preset": r.preset, "feature_set": r.title, "dimension": r.dimension,
                      "accuracy": r.metrics.accuracy, "metrics": r.metrics.to_dict()}
                     for r in self.rows],
        }
        if self.human_reference is not None:
            out["human_reference"] = {"feature_set": HUMAN_ROW_TITLE, "accuracy": self.human_reference,
                                      "computed": False}
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, indent=2)

    def to_text(self) -> str:
        width = max([len(r.title) for r in self.rows] + [len(HUMAN_ROW_TITLE), len("Feature set")])
        lines = [f"{'Feature set':<{width}}  {'Test':>7}  {'dim':>7}",
                 "-" * (width + 18)]
        for r in self.rows:
            lines.append(f"{r.title:<{width}}  {100 * r.metrics.accuracy:6.2f}%  {r.dimension:>7}")
        if self.human_reference is not None:
            lines.append(f"{HUMAN_ROW_TITLE:<{width}}  {100 * self.human_reference:6.2f}%  {'-':>7}")
        tr, te, va = self.split_sizes
        lines.append("")
        lines.append(f"split seed={self.split_spec.seed} train={tr} test={te} validation={va}; "
                     f"train seed={self.train_config.seed} lambda={self.train_config.lam:g} "
                     f"epochs={self.train_config.epochs}")
        return "\n".join(lines)


def _labeled(corpus: Corpus) -> None:
    for c in corpus:
        if c.label is None:
            raise ModelError(f"comment {c.id!r} has no label")


def _fit_and_score(train_part: Corpus, eval_part: Corpus, config: FeatureConfig,
                   train_config: TrainConfig, lexicon: Lexicon):
    vocab = build_vocabulary(train_part, config, lexicon)
    xs = vectorize_corpus(train_part, vocab, lexicon)
    model = train(list(zip(xs, (c.label for c in train_part))), train_config)
    test_xs = vectorize_corpus(eval_part, vocab, lexicon)
    return vocab, model, evaluate(model, list(zip(test_xs, (c.label for c in eval_part))))


def run_ablation(corpus: Corpus, split_spec: SplitSpec | None = None,
                 train_config: TrainConfig | None = None,
                 presets: Sequence[str | tuple[str, FeatureConfig]] = ("UNI", "UNI_BI", "UNI_BI_STRUCT"),
                 lexicon: Lexicon | None = None,
                 human_reference: float | None = HUMAN_AGREEMENT_REFERENCE) -> AblationReport:
    """Train and test one model per feature preset on a single shared split.

    ``presets`` holds preset names or ``(name, FeatureConfig)`` pairs.
    """
    split_spec = split_spec or SplitSpec()
    train_config = train_config or TrainConfig()
    lexicon = lexicon or default_lexicon()
    _labeled(corpus)
    train_part, test_part, valid_part = split(corpus, split_spec)
    rows = []
    for p in presets:
        name, config = (p.upper(), PRESETS[p.upper()]) if isinstance(p, str) else p
        vocab, _model, metrics = _fit_and_score(train_part, test_part, config, train_config, lexicon)
        rows.append(AblationRow(name, config, metrics, vocab.dimension, tuple(test_part.ids)))
    return AblationReport(tuple(rows), split_spec, train_config,
                          (len(train_part), len(test_part), len(valid_part)), human_reference)


@dataclass(frozen=True)
class TuneResult:
    best_lambda: float
    validation_accuracy: dict   # lambda -> accuracy

    def to_dict(self) -> dict:
        return {"best_lambda": self.best_lambda,
                "grid": [{"lambda": lam, "validation_accuracy": acc}
                         for lam, acc in self.validation_accuracy.items()]}


def tune(corpus: Corpus, split_spec: SplitSpec | None = None, train_config: TrainConfig | None = None,
         feature_config: FeatureConfig = PRESETS["UNI_BI_STRUCT"],
         grid: Sequence[float] = DEFAULT_LAMBDA_GRID, lexicon: Lexicon | None = None) -> TuneResult:
    """Pick lambda by validation accuracy; ties go to the earlier grid entry."""
    split_spec = split_spec or SplitSpec()
    train_config = train_config or TrainConfig()
    lexicon = lexicon or default_lexicon()
    _labeled(corpus)
    train_part, _test, valid_part = split(corpus, split_spec)
    vocab = build_vocabulary(train_part, feature_config, lexicon)
    xs = vectorize_corpus(train_part, vocab, lexicon)
    examples = list(zip(xs, (c.label for c in train_part)))
    valid = list(zip(vectorize_corpus(valid_part, vocab, lexicon), (c.label for c in valid_part)))
    scores = {}
    for lam in grid:
        scores[lam] = evaluate(train(examples, replace(train_config, lam=lam)), valid).accuracy
    best = max(scores, key=lambda lam: scores[lam])  # max keeps the first of equal keys
    return TuneResult(best, scores)
