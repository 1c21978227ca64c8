"""Multiclass linear SVM: one-vs-rest hinge loss, Pegasos subgradient steps.

Each binary problem minimises ``lam/2 |w|^2 + mean(max(0, 1 - y (w.x + b)))``
with step size ``1 / (lam * (t + t0))``; the bias is not regularised. The
four problems share one seeded visiting order and are stepped together.

``t0`` defaults to ``1/lam``, which caps the first step near 1. With
``t0 = 0`` (plain Pegasos) the first bias updates are of size ``1/lam`` and,
since nothing shrinks the bias, they take many epochs to wash out.

By default the returned model is the average of all iterates rather than
the last one. The last iterate jitters by about one example's hinge per
epoch; the average settles, so the logged objective actually flattens out.
"""
from __future__ import annotations

import hashlib
import json
import logging
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .corpus import LABELS, PolitenessLabel
from .errors import ModelError
from .features import FeatureVector

log = logging.getLogger(__name__)

MAGIC = "HPSVM"
VERSION = "v1"


@dataclass(frozen=True)
class TrainConfig:
    lam: float = 1e-4
    epochs: int = 20
    seed: int = 0
    shuffle_each_epoch: bool = True
    step_offset: float | None = None  # t0; None means 1/lam
    average: bool = True              # return the averaged iterate

    def __post_init__(self):
        if not (self.lam > 0 and math.isfinite(self.lam)):
            raise ModelError(f"lambda must be a positive real, got {self.lam}")
        if int(self.epochs) != self.epochs or self.epochs < 1:
            raise ModelError(f"epochs must be a positive integer, got {self.epochs}")
        if not 0 <= self.seed < 2**64:
            raise ModelError("seed must be a 64-bit unsigned integer")
        if self.step_offset is not None and not (self.step_offset >= 0 and math.isfinite(self.step_offset)):
            raise ModelError(f"step_offset must be a non-negative real, got {self.step_offset}")

    @property
    def t0(self) -> float:
        return 1.0 / self.lam if self.step_offset is None else float(self.step_offset)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True, eq=False)
class SvmModel:
    weights: np.ndarray          # (n_labels, dimension)
    biases: np.ndarray           # (n_labels,)
    fingerprint: str | None
    config: TrainConfig = field(default_factory=TrainConfig)
    labels: tuple[PolitenessLabel, ...] = LABELS
    objective_history: tuple[tuple[float, ...], ...] = ()

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        b = np.asarray(self.biases, dtype=np.float64)
        if w.ndim != 2 or w.shape[0] != len(self.labels) or b.shape != (len(self.labels),):
            raise ModelError("weights must be (n_labels, dim) and biases (n_labels,)")
        if not (np.isfinite(w).all() and np.isfinite(b).all()):
            raise ModelError("model contains non-finite weights")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "biases", b)

    @property
    def dimension(self) -> int:
        return int(self.weights.shape[1])

    def scaled(self, c: float) -> "SvmModel":
        return SvmModel(self.weights * c, self.biases * c, self.fingerprint, self.config, self.labels)


@dataclass(frozen=True)
class Prediction:
    label: PolitenessLabel
    scores: dict

    def to_dict(self) -> dict:
        return {"label": self.label.value, "scores": {k.value: v for k, v in self.scores.items()}}


class PegasosState:
    """Weights of ``n_outputs`` binary problems stored as ``scale * v``.

    Keeping the shrink factor ``(1 - eta*lam)`` in a shared scalar makes each
    step cost O(nnz(x)) instead of O(dimension). The running sum of iterates
    is kept as ``u + c * v`` for the same reason: a sparse change ``d`` to
    ``v`` is absorbed by ``u -= c * d``.
    """

    def __init__(self, dimension: int, n_outputs: int, lam: float, t0: float = 0.0):
        self.lam = lam
        self.t0 = t0
        self.t = 0
        self.scale = 1.0
        self.v = np.zeros((n_outputs, dimension))
        self.b = np.zeros(n_outputs)
        self.u = np.zeros((n_outputs, dimension))
        self.c = 0.0
        self.b_sum = np.zeros(n_outputs)

    @property
    def weights(self) -> np.ndarray:
        return self.scale * self.v

    @property
    def bias(self) -> np.ndarray:
        return self.b.copy()

    @property
    def averaged_weights(self) -> np.ndarray:
        if self.t == 0:
            return np.zeros_like(self.v)
        return (self.u + self.c * self.v) / self.t

    @property
    def averaged_bias(self) -> np.ndarray:
        return self.b_sum / self.t if self.t else np.zeros_like(self.b)

    def step(self, idx: np.ndarray, vals: np.ndarray, y: np.ndarray) -> np.ndarray:
        """One subgradient step on example ``x`` (given sparsely) with targets ``y`` in {-1, +1}.

        Margins are evaluated at the current iterate, before shrinking.
        Returns the mask of problems whose hinge was active.
        """
        self.t += 1
        eta = 1.0 / (self.lam * (self.t + self.t0))
        margins = y * (self.scale * (self.v[:, idx] @ vals) + self.b)
        active = margins < 1.0
        decay = 1.0 - eta * self.lam
        if decay <= 0.0:
            self.u += self.c * self.v
            self.c = 0.0
            self.v[:] = 0.0
            self.scale = 1.0
        else:
            self.scale *= decay
        if active.any():
            rows = np.flatnonzero(active)
            delta = (eta / self.scale) * np.outer(y[rows], vals)
            cells = np.ix_(rows, idx)
            self.u[cells] -= self.c * delta
            self.v[cells] += delta
            self.b[rows] += eta * y[rows]
        self.c += self.scale
        self.b_sum += self.b
        return active


def _stack(vectors: Sequence[FeatureVector]) -> sp.csr_matrix:
    dims = {v.dimension for v in vectors}
    if len(dims) != 1:
        raise ModelError(f"feature vectors disagree on dimension: {sorted(dims)}")
    (dim,) = dims
    indptr = np.zeros(len(vectors) + 1, dtype=np.int64)
    np.cumsum([len(v) for v in vectors], out=indptr[1:])
    indices = np.concatenate([v.indices for v in vectors]) if vectors else np.zeros(0, np.int64)
    data = np.concatenate([v.values for v in vectors]) if vectors else np.zeros(0)
    if not np.isfinite(data).all():
        raise ModelError("non-finite feature value in training data")
    return sp.csr_matrix((data, indices, indptr), shape=(len(vectors), dim))


def objective(weights: np.ndarray, biases: np.ndarray, X: sp.csr_matrix, Y: np.ndarray, lam: float) -> np.ndarray:
    """Primal objective of every binary problem; ``Y`` is (n, n_outputs) in {-1, +1}."""
    margins = Y * (X @ weights.T + biases)
    hinge = np.maximum(0.0, 1.0 - margins).mean(axis=0)
    return 0.5 * lam * np.einsum("kd,kd->k", weights, weights) + hinge


def train(examples: Sequence[tuple[FeatureVector, PolitenessLabel]], config: TrainConfig | None = None) -> SvmModel:
    config = config or TrainConfig()
    if not examples:
        raise ModelError("no training examples")
    vectors = [x for x, _ in examples]
    ranks = np.array([lab.rank for _, lab in examples])
    if len(set(ranks.tolist())) < 2:
        raise ModelError("training data must contain at least two distinct labels")
    fps = {v.fingerprint for v in vectors}
    if len(fps) > 1:
        raise ModelError("training vectors come from different vocabularies")
    X = _stack(vectors)
    n, dim = X.shape
    Y = np.where(ranks[:, None] == np.arange(len(LABELS))[None, :], 1.0, -1.0)

    rng = np.random.default_rng(config.seed)
    state = PegasosState(dim, len(LABELS), config.lam, config.t0)
    indptr, indices, data = X.indptr, X.indices.astype(np.int64), X.data
    def current():
        if config.average:
            return state.averaged_weights, state.averaged_bias
        return state.weights, state.bias

    order = rng.permutation(n)
    history = []
    for epoch in range(config.epochs):
        if config.shuffle_each_epoch and epoch > 0:
            order = rng.permutation(n)
        for i in order:
            lo, hi = indptr[i], indptr[i + 1]
            state.step(indices[lo:hi], data[lo:hi], Y[i])
        obj = objective(*current(), X, Y, config.lam)
        history.append(tuple(float(o) for o in obj))
        log.info("epoch %d/%d objective %s", epoch + 1, config.epochs,
                 " ".join(f"{lab.value}={o:.6f}" for lab, o in zip(LABELS, obj)))
    w, b = current()
    return SvmModel(w, b, fps.pop(), config, LABELS, tuple(history))


def _check_input(model: SvmModel, x: FeatureVector) -> None:
    if x.dimension != model.dimension:
        raise ModelError(f"feature dimension {x.dimension} does not match model dimension {model.dimension}")
    if x.fingerprint is not None and model.fingerprint is not None and x.fingerprint != model.fingerprint:
        raise ModelError(f"vocabulary fingerprint {x.fingerprint} does not match model ({model.fingerprint})")


def decision_values(model: SvmModel, x: FeatureVector) -> np.ndarray:
    _check_input(model, x)
    return model.weights[:, x.indices] @ x.values + model.biases


def predict(model: SvmModel, x: FeatureVector) -> Prediction:
    scores = decision_values(model, x)
    best = int(np.argmax(scores))  # first maximum, i.e. canonical-order tie-break
    return Prediction(model.labels[best], {lab: float(s) for lab, s in zip(model.labels, scores)})


# ---------------------------------------------------------------------------
# persistence
#
# Layout (all text UTF-8, "\n" line ends):
#   line 1   "HPSVM v1"
#   line 2   JSON header: dimension, labels, fingerprint, config, training
#            objective log, payload_bytes, sha256 of the payload
#   payload  IEEE-754 float64, little-endian: weights row-major
#            (n_labels x dimension), then the n_labels biases

def save_model(model: SvmModel, path) -> None:
    payload = (model.weights.astype("<f8").tobytes(order="C")
               + model.biases.astype("<f8").tobytes())
    header = {
        "dimension": model.dimension,
        "labels": [lab.value for lab in model.labels],
        "fingerprint": model.fingerprint,
        "config": model.config.to_dict(),
        "objective_history": [list(h) for h in model.objective_history],
        "payload_bytes": len(payload),
        "sha256": hashlib.sha256(payload).hexdigest(),
    }
    with open(path, "wb") as f:
        f.write(f"{MAGIC} {VERSION}\n".encode("utf-8"))
        f.write(json.dumps(header, sort_keys=True, ensure_ascii=False).encode("utf-8") + b"\n")
        f.write(payload)


def load_model(path) -> SvmModel:
    raw = Path(path).read_bytes()
    first, sep, rest = raw.partition(b"\n")
    parts = first.decode("utf-8", "replace").split()
    if not sep or len(parts) != 2 or parts[0] != MAGIC:
        raise ModelError(f"{path}: not a model file (bad magic)")
    if parts[1] != VERSION:
        raise ModelError(f"{path}: unsupported model version {parts[1]!r} (expected {VERSION!r})")
    header_line, sep, payload = rest.partition(b"\n")
    try:
        header = json.loads(header_line.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError):
        raise ModelError(f"{path}: corrupted model header") from None
    if not sep or not isinstance(header, dict):
        raise ModelError(f"{path}: corrupted model header")
    if not header.get("fingerprint"):
        raise ModelError(f"{path}: model has no vocabulary fingerprint")
    if len(payload) != header.get("payload_bytes") or hashlib.sha256(payload).hexdigest() != header.get("sha256"):
        raise ModelError(f"{path}: checksum mismatch (file truncated or corrupted)")
    try:
        labels = tuple(PolitenessLabel.parse(s) for s in header["labels"])
        dim = int(header["dimension"])
        config = TrainConfig(**header["config"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelError(f"{path}: corrupted model header ({exc})") from None
    arr = np.frombuffer(payload, dtype="<f8").astype(np.float64)
    k = len(labels)
    if arr.size != k * dim + k:
        raise ModelError(f"{path}: payload size does not match header")
    history = tuple(tuple(h) for h in header.get("objective_history", ()))
    return SvmModel(arr[: k * dim].reshape(k, dim), arr[k * dim:], header["fingerprint"],
                    config, labels, history)
