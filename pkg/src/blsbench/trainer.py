"""Model fitting and prediction for the BLS, F-BLS, and IF-BLS variants.

Fitting builds the random layer, forms the state matrix, computes the
per-sample weight vector for the chosen variant (all-ones for plain BLS),
and solves the weighted ridge problem for the output weights, picking the
primal or dual form by comparing the state width against the sample
count. Prediction replays normalization and the frozen random layer,
then takes a per-row argmax over the class columns.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import fuzzy, if_scores, linalg, network
from .errors import ClassBalanceError, ConfigError, DataFormatError, DimensionMismatch

__all__ = [
    "VARIANTS",
    "ModelConfig",
    "TrainedModel",
    "fit",
    "predict",
    "decision_scores",
    "save_model",
    "load_model",
]

VARIANTS = ("bls", "f-bls", "if-bls")

MODEL_FORMAT_VERSION = 1


@dataclass(frozen=True)
class ModelConfig:
    """Variant choice plus every hyperparameter the variant needs.

    delta applies to f-bls only and kernel to if-bls only; supplying
    either for the wrong variant is rejected so configs stay unambiguous.
    """

    variant: str
    network: network.NetworkConfig = field(default_factory=network.NetworkConfig)
    c_reg: float = 1.0
    delta: Optional[float] = None
    kernel: Optional[if_scores.KernelParams] = None

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ConfigError(
                f"variant must be one of {VARIANTS}, got {self.variant!r}"
            )
        if not (np.isfinite(self.c_reg) and self.c_reg > 0):
            raise ConfigError(f"c_reg must be positive, got {self.c_reg!r}")
        if self.variant == "f-bls":
            if self.delta is None:
                object.__setattr__(self, "delta", fuzzy.DEFAULT_DELTA)
            elif self.delta <= 0:
                raise ConfigError(f"delta must be positive, got {self.delta!r}")
        elif self.delta is not None:
            raise ConfigError(f"delta is only valid for f-bls, not {self.variant}")
        if self.variant == "if-bls":
            if self.kernel is None:
                object.__setattr__(self, "kernel", if_scores.KernelParams())
        elif self.kernel is not None:
            raise ConfigError(f"kernel is only valid for if-bls, not {self.variant}")


@dataclass(frozen=True)
class NormState:
    """Per-feature min and range from the training fold."""

    feature_min: np.ndarray
    feature_range: np.ndarray

    def apply(self, X: np.ndarray) -> np.ndarray:
        rng = np.where(self.feature_range > 0.0, self.feature_range, 1.0)
        return (X - self.feature_min) / rng


@dataclass(frozen=True)
class TrainedModel:
    config: ModelConfig
    layer: network.RandomLayer
    w_out: np.ndarray
    norm_state: NormState
    class_labels: tuple[str, ...]
    solve_branch_used: str
    score_vector: np.ndarray = field(repr=False, default=None)


def _one_hot(indices: np.ndarray, n_classes: int) -> np.ndarray:
    T = np.zeros((indices.shape[0], n_classes))
    T[np.arange(indices.shape[0]), indices] = 1.0
    return T


def _signed_from_indices(indices: np.ndarray) -> np.ndarray:
    # Class index 0 is the positive class, index 1 the negative class.
    return np.where(indices == 0, 1, -1)


def fit(
    X,
    labels: Sequence,
    cfg: ModelConfig,
    score_override: Optional[np.ndarray] = None,
    force_branch: Optional[str] = None,
) -> TrainedModel:
    """Train one model. labels may be any strings; classes are ordered
    lexicographically and targets are one-hot rows over that order.

    score_override replaces the variant's weight vector (used for
    reduction checks); force_branch pins the primal or dual solver
    regardless of the dimension rule.
    """
    X = linalg.as_matrix(X, "X")
    labels = [str(v) for v in labels]
    if len(labels) != X.shape[0]:
        raise ConfigError(f"{len(labels)} labels for {X.shape[0]} samples")
    class_labels = tuple(sorted(set(labels)))
    if len(class_labels) < 2:
        raise ClassBalanceError("training data contains a single class")
    index_of = {c: i for i, c in enumerate(class_labels)}
    indices = np.array([index_of[v] for v in labels])

    if cfg.variant in ("f-bls", "if-bls"):
        if len(class_labels) != 2:
            raise ClassBalanceError(
                f"{cfg.variant} requires exactly 2 classes, got {len(class_labels)}"
            )
        counts = np.bincount(indices, minlength=2)
        if counts.min() < 2:
            raise ClassBalanceError(
                f"{cfg.variant} requires at least 2 samples per class"
            )

    norm = NormState(
        feature_min=X.min(axis=0),
        feature_range=X.max(axis=0) - X.min(axis=0),
    )
    Xn = norm.apply(X)

    if score_override is not None:
        scores = linalg.as_weights(score_override, X.shape[0], "score_override")
    elif cfg.variant == "bls":
        scores = np.ones(X.shape[0])
    elif cfg.variant == "f-bls":
        signed = _signed_from_indices(indices)
        scores = fuzzy.fuzzy_score_vector(Xn, signed, cfg.delta)
    else:
        signed = _signed_from_indices(indices)
        scores, _ = if_scores.if_score_vector(Xn, signed, cfg.kernel)

    layer = network.init_random_layer(cfg.network, X.shape[1])
    G = network.state_matrix(layer, Xn)
    T = _one_hot(indices, len(class_labels))

    if force_branch is None:
        branch = "primal" if cfg.network.width <= X.shape[0] else "dual"
    elif force_branch in ("primal", "dual"):
        branch = force_branch
    else:
        raise ConfigError(f"force_branch must be 'primal' or 'dual', got {force_branch!r}")
    if branch == "primal":
        w_out = linalg.solve_weighted_ridge_primal(G, scores, T, cfg.c_reg)
    else:
        w_out = linalg.solve_weighted_ridge_dual(G, scores, T, cfg.c_reg)

    return TrainedModel(
        config=cfg,
        layer=layer,
        w_out=np.ascontiguousarray(w_out),
        norm_state=norm,
        class_labels=class_labels,
        solve_branch_used=branch,
        score_vector=scores,
    )


def decision_scores(model: TrainedModel, X_test) -> np.ndarray:
    """Raw output-layer activations, one column per class."""
    X_test = linalg.as_matrix(X_test, "X_test")
    if X_test.shape[1] != model.layer.input_dim:
        raise DimensionMismatch(
            f"X_test has {X_test.shape[1]} features, model expects {model.layer.input_dim}"
        )
    Xn = model.norm_state.apply(X_test)
    G = network.state_matrix(model.layer, Xn)
    return G @ model.w_out


def predict(model: TrainedModel, X_test) -> list[str]:
    """Per-row argmax class; ties break toward the lower class index."""
    scores = decision_scores(model, X_test)
    indices = np.argmax(scores, axis=1)
    return [model.class_labels[i] for i in indices]


def accuracy(model: TrainedModel, X, labels: Sequence) -> float:
    """Fraction of correctly classified rows."""
    pred = predict(model, X)
    truth = [str(v) for v in labels]
    return sum(p == t for p, t in zip(pred, truth)) / len(truth)


# --- persistence ----------------------------------------------------------
#
# Structured JSON with all floats hex-encoded (float.hex) so round-trips
# are bit-exact.


def _encode_array(a: np.ndarray) -> dict:
    a = np.asarray(a, dtype=np.float64)
    return {
        "shape": list(a.shape),
        "hex": [float(v).hex() for v in a.ravel()],
    }


def _decode_array(d: dict) -> np.ndarray:
    a = np.array([float.fromhex(h) for h in d["hex"]], dtype=np.float64)
    return a.reshape(d["shape"])


def save_model(model: TrainedModel, path) -> None:
    cfg = model.config
    doc = {
        "format": "blsbench-model",
        "version": MODEL_FORMAT_VERSION,
        "variant": cfg.variant,
        "c_reg": float(cfg.c_reg).hex(),
        "delta": None if cfg.delta is None else float(cfg.delta).hex(),
        "kernel": None
        if cfg.kernel is None
        else {
            "mu": float(cfg.kernel.mu).hex(),
            "delta": float(cfg.kernel.delta).hex(),
            "epsilon": cfg.kernel.epsilon
            if isinstance(cfg.kernel.epsilon, str)
            else float(cfg.kernel.epsilon).hex(),
        },
        "network": {
            "m": cfg.network.m,
            "p": cfg.network.p,
            "l": cfg.network.l,
            "q": cfg.network.q,
            "feature_activation": cfg.network.feature_activation,
            "enhancement_activation": cfg.network.enhancement_activation,
            "seed": cfg.network.seed,
        },
        "input_dim": model.layer.input_dim,
        "class_labels": list(model.class_labels),
        "solve_branch_used": model.solve_branch_used,
        "feature_weights": [_encode_array(w) for w in model.layer.feature_weights],
        "feature_biases": [_encode_array(b) for b in model.layer.feature_biases],
        "enhancement_weights": [_encode_array(w) for w in model.layer.enhancement_weights],
        "enhancement_biases": [_encode_array(b) for b in model.layer.enhancement_biases],
        "w_out": _encode_array(model.w_out),
        "norm_min": _encode_array(model.norm_state.feature_min),
        "norm_range": _encode_array(model.norm_state.feature_range),
        "score_vector": None
        if model.score_vector is None
        else _encode_array(model.score_vector),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def load_model(path) -> TrainedModel:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("format") != "blsbench-model":
        raise DataFormatError(f"{path} is not a model file")
    if doc.get("version") != MODEL_FORMAT_VERSION:
        raise DataFormatError(
            f"unsupported model format version {doc.get('version')!r}"
        )
    kernel = None
    if doc["kernel"] is not None:
        eps = doc["kernel"]["epsilon"]
        kernel = if_scores.KernelParams(
            mu=float.fromhex(doc["kernel"]["mu"]),
            delta=float.fromhex(doc["kernel"]["delta"]),
            epsilon=eps if isinstance(eps, str) and not eps.startswith("0x") else float.fromhex(eps),
        )
    net = network.NetworkConfig(**doc["network"])
    cfg = ModelConfig(
        variant=doc["variant"],
        network=net,
        c_reg=float.fromhex(doc["c_reg"]),
        delta=None if doc["delta"] is None else float.fromhex(doc["delta"]),
        kernel=kernel,
    )
    layer = network.RandomLayer(
        config=net,
        input_dim=int(doc["input_dim"]),
        feature_weights=tuple(_decode_array(d) for d in doc["feature_weights"]),
        feature_biases=tuple(_decode_array(d) for d in doc["feature_biases"]),
        enhancement_weights=tuple(_decode_array(d) for d in doc["enhancement_weights"]),
        enhancement_biases=tuple(_decode_array(d) for d in doc["enhancement_biases"]),
    )
    return TrainedModel(
        config=cfg,
        layer=layer,
        w_out=_decode_array(doc["w_out"]),
        norm_state=NormState(
            feature_min=_decode_array(doc["norm_min"]),
            feature_range=_decode_array(doc["norm_range"]),
        ),
        class_labels=tuple(doc["class_labels"]),
        solve_branch_used=doc["solve_branch_used"],
        score_vector=None
        if doc["score_vector"] is None
        else _decode_array(doc["score_vector"]),
    )
