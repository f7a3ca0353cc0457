"""The outcome-reweighted kernel equalized-odds statistic.

The statistic compares the two *group mixtures* obtained by reweighting each
group's outcome-conditional representation laws with one shared pair of
weights,

    Zbar_s = w_0 * (Z | S=s, Y=0) + w_1 * (Z | S=s, Y=1),   s in {0, 1},

where (w_0, w_1) are the outcome rates of the S=0 stratum.  Taking both
groups' weights from the same stratum is deliberate: it makes the mixtures
comparable even when outcome rates differ across groups, at the price of an
asymmetry (relabeling the groups changes which stratum anchors the weights).
The squared statistic is the squared kernel discrepancy between Zbar_0 and
Zbar_1.

Two estimation routes are kept deliberately distinct:

* :func:`eok_hat_bootstrap` materializes the mixtures by stratified
  resampling (:func:`reweight_sample`) and applies the unbiased two-sample
  U-statistic to the resampled groups.

* :func:`eok_hat_plugin` never resamples: it plugs weighted empirical cell
  embeddings straight into the squared-norm expansion

      eok2 = sum_{y, y'} w_y w_{y'} [ <m_0y, m_0y'> + <m_1y, m_1y'>
                                      - <m_0y, m_1y'> - <m_1y, m_0y'> ],

  with <m_c, m_c'> the mean of the cross Gram block between cells.  This is
  the V-statistic of the mixture discrepancy, nonnegative up to rounding,
  and differentiable — :func:`eok_gradient_plugin` gives its exact gradient
  with respect to a linear encoder, which is what the penalized trainer uses.

Weights default to the empirical S=0 outcome rates; passing explicit weights
(e.g. the population's) is supported for oracle comparisons and flagged in
the result's ``weights_source``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._rng import rng_for
from .errors import (
    EmptyCellError,
    NormalizationError,
    SizeError,
    UnsupportedError,
    ValidationError,
)
from .kernels import KernelSpec
from .mmd import _pairwise_unchecked, _prep, _sum_cross, mmd2_unbiased
from .synth import LabeledDataset, cell_rows

__all__ = [
    "ReweightedSample",
    "EokEstimate",
    "empirical_weights",
    "reweight_sample",
    "eok_hat_bootstrap",
    "eok_hat_plugin",
    "eok_gradient_plugin",
]

CELLS = ((0, 0), (0, 1), (1, 0), (1, 1))


@dataclass(frozen=True)
class ReweightedSample:
    """Materialized mixture samples for both groups plus the weights used."""

    z0: np.ndarray
    z1: np.ndarray
    weights: np.ndarray
    weights_source: str


@dataclass(frozen=True)
class EokEstimate:
    """Squared statistic, clip-aware root, and estimation metadata."""

    eok2: float
    eok: float
    method: str
    weights: np.ndarray
    weights_source: str
    clipped: bool


def _resolve_weights(data: LabeledDataset, weights) -> tuple[np.ndarray, str]:
    if weights is None:
        return empirical_weights(data), "empirical"
    w = np.asarray(weights, dtype=float)
    if w.shape != (2,) or np.any(w < 0) or not np.all(np.isfinite(w)):
        raise ValidationError("weights must be two nonnegative numbers")
    if abs(w.sum() - 1.0) > 1e-9:
        raise NormalizationError(f"weights must sum to 1, got {w.sum()}")
    return w, "spec-given"


def empirical_weights(data: LabeledDataset) -> np.ndarray:
    """Outcome rates (p_hat(Y=0 | S=0), p_hat(Y=1 | S=0)) of the S=0 stratum."""
    n0 = int((data.s == 0).sum())
    if n0 == 0:
        raise EmptyCellError("weights come from the S=0 stratum, which is empty")
    n01 = int(((data.s == 0) & (data.y == 1)).sum())
    return np.array([(n0 - n01) / n0, n01 / n0])


def _require_weighted_cells(data: LabeledDataset, w: np.ndarray, context: str) -> dict:
    """Cell index pools; every cell carrying weight must be populated."""
    pools = {}
    for (s, y) in CELLS:
        rows = cell_rows(data, s, y)
        if rows.size == 0 and w[y] > 0:
            raise EmptyCellError(f"{context} needs rows in cell (s={s}, y={y})")
        pools[(s, y)] = rows
    return pools


def reweight_sample(
    data: LabeledDataset, m0: int, m1: int, seed: int, weights=None
) -> ReweightedSample:
    """Draw mixture samples of sizes m0, m1 by stratified resampling.

    For group s, each of the m_s draws picks outcome y with probability
    ``weights[y]`` and then one row uniformly (with replacement) from cell
    (s, y).  Fully deterministic given the seed.
    """
    if m0 < 1 or m1 < 1:
        raise SizeError(f"mixture sizes must be >= 1, got {m0} and {m1}")
    w, source = _resolve_weights(data, weights)
    pools = _require_weighted_cells(data, w, "reweight_sample")
    rng = rng_for(seed)
    groups = []
    for s, m in ((0, m0), (1, m1)):
        ys = (rng.random(m) < w[1]).astype(np.int64)
        out = np.empty((m, data.dim))
        for y in (0, 1):
            mask = ys == y
            if not mask.any():
                continue
            pool = pools[(s, y)]
            if pool.size == 0:
                # zero-weight cell can still be hit is impossible: w[y] == 0
                raise EmptyCellError(f"cell (s={s}, y={y}) is empty")  # pragma: no cover
            out[mask] = data.z[pool[rng.integers(0, pool.size, size=int(mask.sum()))]]
        groups.append(out)
    return ReweightedSample(z0=groups[0], z1=groups[1], weights=w, weights_source=source)


def eok_hat_bootstrap(
    spec: KernelSpec,
    data: LabeledDataset,
    m0: int | None = None,
    m1: int | None = None,
    seed: int = 0,
    weights=None,
) -> EokEstimate:
    """Resampling estimator: unbiased two-sample statistic on materialized mixtures.

    Mixture sizes default to the observed group sizes.  The resampled
    U-statistic can be negative near the null; the root clips and flags.
    """
    if m0 is None:
        m0 = int((data.s == 0).sum())
    if m1 is None:
        m1 = int((data.s == 1).sum())
    rs = reweight_sample(data, m0, m1, seed, weights=weights)
    est = mmd2_unbiased(spec, rs.z0, rs.z1)
    return EokEstimate(
        eok2=est.mmd2, eok=est.mmd, method="bootstrap",
        weights=rs.weights, weights_source=rs.weights_source, clipped=est.clipped,
    )


def eok_hat_plugin(spec: KernelSpec, data: LabeledDataset, weights=None) -> EokEstimate:
    """Plug-in estimator: weighted cell embeddings, no resampling.

    Computes the squared-norm expansion from the module docstring with Gram
    block means between the four (s, y) cells.  All four cells must be
    populated.
    """
    w, source = _resolve_weights(data, weights)
    cells = {}
    for (s, y) in CELLS:
        rows = cell_rows(data, s, y)
        if rows.size == 0:
            raise EmptyCellError(f"plugin estimator needs rows in cell (s={s}, y={y})")
        cells[(s, y)] = np.ascontiguousarray(data.z[rows])

    def block_mean(c1, c2) -> float:
        a, b = cells[c1], cells[c2]
        a, b = _prep(spec, a, b)
        return _sum_cross(spec, a, b) / (a.shape[0] * b.shape[0])

    eok2 = 0.0
    for y in (0, 1):
        for yp in (0, 1):
            coeff = w[y] * w[yp]
            if coeff == 0.0:
                continue
            eok2 += coeff * (
                block_mean((0, y), (0, yp))
                + block_mean((1, y), (1, yp))
                - block_mean((0, y), (1, yp))
                - block_mean((1, y), (0, yp))
            )
    return EokEstimate(
        eok2=float(eok2), eok=float(np.sqrt(max(eok2, 0.0))), method="plugin",
        weights=w, weights_source=source, clipped=bool(eok2 < 0),
    )


def eok_gradient_plugin(
    spec: KernelSpec, data: LabeledDataset, encoder, weights=None
) -> np.ndarray:
    """Exact gradient of the plug-in squared statistic w.r.t. a linear encoder.

    ``data.z`` is read as raw inputs X; the statistic is evaluated on the
    encoded rows Z = X W' for ``encoder`` W of shape (d_out, d_in), and the
    returned array is d(eok2)/dW of the same shape.

    The squared statistic is the quadratic form v' K(Z) v with the rank-one
    coefficient vector v_i = (2 s_i - 1) w_{y_i} / n_{cell(i)}, so for the
    linear kernel the gradient collapses to 2 (Z'v) (X'v)' and for the rbf
    kernel to (-2 / sigma^2) [Z' diag(r) X - Z' A X] with A = K * vv' and
    r = A 1.  Only those two families are differentiable here; laplacian and
    composite kernels raise UnsupportedError.
    """
    if spec.family not in ("rbf", "linear"):
        raise UnsupportedError(
            f"gradient defined for rbf and linear kernels only, got {spec.family!r}"
        )
    W = np.asarray(encoder, dtype=float)
    if W.ndim != 2 or W.shape[1] != data.dim:
        raise ValidationError(
            f"encoder must be (d_out, {data.dim}), got {W.shape if W.ndim == 2 else W.ndim}"
        )
    w, _ = _resolve_weights(data, weights)
    counts = np.zeros((2, 2))
    for (s, y) in CELLS:
        rows = cell_rows(data, s, y)
        if rows.size == 0 and w[y] > 0:
            raise EmptyCellError(f"gradient needs rows in cell (s={s}, y={y})")
        counts[s, y] = max(rows.size, 1)
    v = (2.0 * data.s - 1.0) * w[data.y] / counts[data.s, data.y]

    X = data.z
    Z = X @ W.T
    if spec.family == "linear":
        zv = Z.T @ v
        xv = X.T @ v
        return 2.0 * np.outer(zv, xv)
    K = _pairwise_unchecked(spec, Z, Z)
    Kv = K @ v
    r = v * Kv
    term_diag = (Z * r[:, None]).T @ X
    term_full = (Z * v[:, None]).T @ (K @ (X * v[:, None]))
    return (-2.0 / spec.sigma**2) * (term_diag - term_full)
