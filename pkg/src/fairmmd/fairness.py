"""Group-fairness metrics in expectation form, and RKHS-ball classifiers.

A classifier here is a score function h mapping representations to [0, 1],
read as h(z) = P(Yhat = 1 | z).  All metrics are phrased as expectations of
h over conditional empirical laws, never as thresholded counts:

  dp     | E[h | S=1] - E[h | S=0] |                  (demographic parity)
  dopp   | E[h | Y=1, S=1] - E[h | Y=1, S=0] |        (opportunity)
  dr     same with Y=0                                (false-positive side)
  dodds  (dopp + dr) / 2                              (equalized odds)
  dpc    (1/2) sum_t | P(Y=1, h=t | S=1) - P(Y=1, h=t | S=0) |
  dnc    same with Y=0                                (calibration, by score atom)
  dc     (dpc + dnc) / 2
  balanced_accuracy   (E[1-h | label=0] + E[h | label=1]) / 2

The classifier family tied to a kernel is the shifted RKHS ball
{ h = (g + 1)/2 : ||g||_H <= nu^(-1/2) }, whose members take values in
[0, 1] on the kernel's domain (|g(z)| <= ||g|| sqrt(k(z,z)) <= 1); empirical
constructions clip g to [-1, 1] before the shift so finite-sample
excursions cannot leave the range.  Over that family the demographic-parity
supremum has the closed form

  sup_h dp(h) = (2 sqrt(nu))^(-1) * gamma_k(Z | S=0, Z | S=1),

estimated by :func:`sup_dp` with the unbiased squared-discrepancy estimator
(clipped at zero before the root).  The supremum is attained by the witness
direction, available as :func:`witness_classifier`; random elements of the
same ball (:func:`random_ball_classifier`) are useful as probes that must
stay below the supremum.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._rng import rng_for
from .errors import (
    EmptyCellError,
    StratificationError,
    UnsupportedError,
    ValidationError,
)
from .kernels import KernelSpec, pairwise
from .mmd import BLOCK, mmd2_biased, mmd2_unbiased
from .synth import LabeledDataset

__all__ = [
    "GroupStats",
    "Classifier",
    "group_stats",
    "witness_classifier",
    "ball_classifier",
    "random_ball_classifier",
    "constant_classifier",
    "logistic_head_classifier",
    "external_scores_classifier",
    "evaluate",
    "evaluate_batch",
    "dp",
    "dopp",
    "dr",
    "dodds",
    "dpc",
    "dnc",
    "dc",
    "balanced_accuracy",
    "sup_dp",
]


@dataclass(frozen=True)
class GroupStats:
    """Cell counts and conditional outcome rates of a dataset.

    ``counts[s, y]`` is the number of rows in cell (s, y);
    ``p_y_given_s[s, y]`` the empirical P(Y=y | S=s).
    """

    counts: np.ndarray
    p_y_given_s: np.ndarray
    n: int


def group_stats(data: LabeledDataset) -> GroupStats:
    """Tabulate cell counts; requires both S-groups to be nonempty."""
    counts = np.zeros((2, 2), dtype=np.int64)
    for s in (0, 1):
        for y in (0, 1):
            counts[s, y] = int(((data.s == s) & (data.y == y)).sum())
    totals = counts.sum(axis=1)
    if (totals == 0).any():
        raise StratificationError(f"both S-groups must be nonempty, got sizes {totals.tolist()}")
    return GroupStats(counts=counts, p_y_given_s=counts / totals[:, None], n=data.n)


# ---------------------------------------------------------------------------
# classifiers


@dataclass(frozen=True)
class Classifier:
    """Score function dispatched on ``kind``.

    kinds and payloads:
      rkhs_witness     kernel spec + anchor rows + coefficients + scale;
                       g(z) = scale * sum_i coefs[i] k(z, anchors[i]),
                       h(z) = (clip(g, -1, 1) + 1) / 2
      constant         h(z) = value
      logistic_head    h(z) = sigmoid(weights . z + bias)
      external_scores  precomputed per-row scores aligned with one dataset
    """

    kind: str
    spec: KernelSpec | None = None
    anchors: np.ndarray | None = None
    coefs: np.ndarray | None = None
    scale: float = 1.0
    value: float | None = None
    weights: np.ndarray | None = None
    bias: float | None = None
    scores: np.ndarray | None = None


def witness_classifier(spec: KernelSpec, A, B) -> Classifier:
    """Ball classifier along the witness direction separating samples A and B.

    g = nu^(-1/2) times the unit-norm witness of (A, B), so ||g||_H is
    exactly nu^(-1/2) and h = (g+1)/2 attains the dp supremum over the ball
    (oriented so E[h over A] >= E[h over B]).
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    root = mmd2_biased(spec, A, B).mmd
    if root <= 0.0:
        raise ValidationError("witness classifier undefined: samples have equal embeddings")
    n0, n1 = A.shape[0], B.shape[0]
    coefs = np.concatenate([np.full(n0, 1.0 / n0), np.full(n1, -1.0 / n1)])
    return Classifier(
        kind="rkhs_witness", spec=spec, anchors=np.vstack([A, B]), coefs=coefs,
        scale=float(1.0 / (np.sqrt(spec.nu) * root)),
    )


def ball_classifier(spec: KernelSpec, anchors, coefs) -> Classifier:
    """Classifier from an explicit kernel expansion, normalized into the ball.

    g0 = sum_i coefs[i] k(., anchors[i]) has ||g0||^2 = coefs' K coefs; the
    stored scale rescales it to norm exactly nu^(-1/2).
    """
    anchors = np.asarray(anchors, dtype=float)
    coefs = np.asarray(coefs, dtype=float)
    if coefs.shape != (anchors.shape[0],):
        raise ValidationError("coefs must align with anchor rows")
    norm2 = float(coefs @ pairwise(spec, anchors, anchors) @ coefs)
    if norm2 <= 0.0:
        raise ValidationError("expansion has zero RKHS norm; cannot normalize")
    return Classifier(
        kind="rkhs_witness", spec=spec, anchors=anchors, coefs=coefs,
        scale=float(1.0 / np.sqrt(spec.nu * norm2)),
    )


def random_ball_classifier(spec: KernelSpec, anchors, seed: int) -> Classifier:
    """Random direction in the nu^(-1/2)-ball, anchored at the given rows."""
    anchors = np.asarray(anchors, dtype=float)
    coefs = rng_for(seed, 17).standard_normal(anchors.shape[0])
    return ball_classifier(spec, anchors, coefs)


def constant_classifier(value: float) -> Classifier:
    if not (np.isscalar(value) and 0.0 <= value <= 1.0):
        raise ValidationError(f"constant score must lie in [0, 1], got {value!r}")
    return Classifier(kind="constant", value=float(value))


def logistic_head_classifier(weights, bias: float) -> Classifier:
    weights = np.asarray(weights, dtype=float)
    if weights.ndim != 1 or not np.all(np.isfinite(weights)) or not np.isfinite(bias):
        raise ValidationError("logistic head needs a finite weight vector and bias")
    return Classifier(kind="logistic_head", weights=weights, bias=float(bias))


def external_scores_classifier(scores) -> Classifier:
    """Wrap precomputed per-row scores (must align with the dataset used)."""
    scores = np.asarray(scores, dtype=float)
    if scores.ndim != 1 or not np.all(np.isfinite(scores)):
        raise ValidationError("scores must be a finite 1-d vector")
    if scores.min() < 0.0 or scores.max() > 1.0:
        raise ValidationError("scores must lie in [0, 1]")
    return Classifier(kind="external_scores", scores=scores)


def evaluate_batch(h: Classifier, Z) -> np.ndarray:
    """Scores h(z) for every row of Z, always within [0, 1]."""
    Z = np.asarray(Z, dtype=float)
    if Z.ndim != 2:
        raise ValidationError("Z must be an (n, d) array")
    if h.kind == "rkhs_witness":
        g = np.empty(Z.shape[0])
        for i in range(0, Z.shape[0], BLOCK):
            g[i : i + BLOCK] = pairwise(h.spec, Z[i : i + BLOCK], h.anchors) @ h.coefs
        g *= h.scale
        return (np.clip(g, -1.0, 1.0) + 1.0) / 2.0
    if h.kind == "constant":
        return np.full(Z.shape[0], h.value)
    if h.kind == "logistic_head":
        if Z.shape[1] != h.weights.size:
            raise ValidationError(
                f"logistic head expects d={h.weights.size}, got {Z.shape[1]}"
            )
        return 1.0 / (1.0 + np.exp(-(Z @ h.weights + h.bias)))
    if h.kind == "external_scores":
        if Z.shape[0] != h.scores.size:
            raise ValidationError(
                f"external scores carry {h.scores.size} rows but dataset has {Z.shape[0]}"
            )
        return h.scores.copy()
    raise ValidationError(f"unknown classifier kind {h.kind!r}")  # pragma: no cover


def evaluate(h: Classifier, z) -> float:
    """Score a single point (undefined for external_scores)."""
    if h.kind == "external_scores":
        raise UnsupportedError("external scores are row-aligned; single-point eval is undefined")
    return float(evaluate_batch(h, np.atleast_2d(np.asarray(z, dtype=float)))[0])


# ---------------------------------------------------------------------------
# metrics


def _scores(h: Classifier, data: LabeledDataset) -> np.ndarray:
    return evaluate_batch(h, data.z)


def _group_means(t: np.ndarray, mask0: np.ndarray, mask1: np.ndarray, what: str):
    if not mask0.any() or not mask1.any():
        raise StratificationError(f"{what} needs rows on both sides of the conditioning")
    return float(t[mask0].mean()), float(t[mask1].mean())


def dp(h: Classifier, data: LabeledDataset) -> float:
    """Demographic parity gap |E[h | S=1] - E[h | S=0]|."""
    t = _scores(h, data)
    m0, m1 = _group_means(t, data.s == 0, data.s == 1, "dp")
    return abs(m1 - m0)


def _cell_gap(h: Classifier, data: LabeledDataset, y: int, what: str) -> float:
    for s in (0, 1):
        if not ((data.s == s) & (data.y == y)).any():
            raise EmptyCellError(f"{what} needs rows in cell (s={s}, y={y})")
    t = _scores(h, data)
    m0 = float(t[(data.s == 0) & (data.y == y)].mean())
    m1 = float(t[(data.s == 1) & (data.y == y)].mean())
    return abs(m1 - m0)


def dopp(h: Classifier, data: LabeledDataset) -> float:
    """Opportunity gap: dp restricted to the Y=1 stratum."""
    return _cell_gap(h, data, 1, "dopp")


def dr(h: Classifier, data: LabeledDataset) -> float:
    """The Y=0 counterpart of dopp."""
    return _cell_gap(h, data, 0, "dr")


def dodds(h: Classifier, data: LabeledDataset) -> float:
    """Equalized-odds gap: mean of the two per-outcome gaps."""
    return 0.5 * (dopp(h, data) + dr(h, data))


def _score_atoms(t: np.ndarray, bins: int | None) -> np.ndarray:
    """Atom index of each score: exact values, or equal-width bins on [0, 1]."""
    if bins is None:
        _, ids = np.unique(t, return_inverse=True)
        return ids
    if bins < 1:
        raise ValidationError(f"bins must be >= 1, got {bins}")
    edges = np.linspace(0.0, 1.0, bins + 1)
    return np.clip(np.digitize(t, edges[1:-1]), 0, bins - 1)


def _calibration_gap(h: Classifier, data: LabeledDataset, y: int, bins: int | None) -> float:
    t = _scores(h, data)
    ids = _score_atoms(t, bins)
    k = int(ids.max()) + 1
    joint = []
    for s in (0, 1):
        mask = data.s == s
        if not mask.any():
            raise StratificationError("calibration gaps need rows in both S-groups")
        sub = mask & (data.y == y)
        joint.append(np.bincount(ids[sub], minlength=k) / mask.sum())
    return 0.5 * float(np.abs(joint[1] - joint[0]).sum())


def dpc(h: Classifier, data: LabeledDataset, bins: int | None = None) -> float:
    """Positive-class calibration gap, summed over score atoms.

    With ``bins=None`` the atoms are the exact observed score values, which
    makes 2 * dc the exact total-variation distance between the empirical
    joint laws of (Y, h(Z)) given S — the identity the calibration bound
    checker relies on.  Binning trades that exactness for stability.
    """
    return _calibration_gap(h, data, 1, bins)


def dnc(h: Classifier, data: LabeledDataset, bins: int | None = None) -> float:
    """Negative-class calibration gap (Y=0 side of dpc)."""
    return _calibration_gap(h, data, 0, bins)


def dc(h: Classifier, data: LabeledDataset, bins: int | None = None) -> float:
    """Calibration gap: mean of dpc and dnc."""
    return 0.5 * (dpc(h, data, bins) + dnc(h, data, bins))


def balanced_accuracy(h: Classifier, data: LabeledDataset, label: str) -> float:
    """(E[1-h | label=0] + E[h | label=1]) / 2 with label "s" or "y"."""
    if label not in ("s", "y"):
        raise ValidationError(f'label must be "s" or "y", got {label!r}')
    lab = data.s if label == "s" else data.y
    t = _scores(h, data)
    m0, m1 = _group_means(t, lab == 0, lab == 1, f"balanced_accuracy over {label}")
    return 0.5 * ((1.0 - m0) + m1)


def sup_dp(spec: KernelSpec, data: LabeledDataset) -> float:
    """Closed-form dp supremum over the nu^(-1/2) RKHS ball.

    (2 sqrt(nu))^(-1) times the root of the unbiased squared discrepancy
    between the two group-conditional representation samples (clipped at
    zero before the root).
    """
    z0 = data.z[data.s == 0]
    z1 = data.z[data.s == 1]
    if z0.shape[0] < 2 or z1.shape[0] < 2:
        raise StratificationError("sup_dp needs at least two rows in each S-group")
    est = mmd2_unbiased(spec, z0, z1)
    return est.mmd / (2.0 * np.sqrt(spec.nu))
