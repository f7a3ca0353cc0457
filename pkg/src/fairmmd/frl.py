"""Penalized training of fair linear representations.

The model is a linear encoder Z = X W' (W of shape (encoder_dim, d_in))
under a logistic head h(z) = sigmoid(w . z + b).  Training minimizes

    objective(W, w, b) = cross_entropy(h(XW'), Y) + lambda * eok2_plugin(XW')

by plain gradient descent — full-batch by default — where the penalty is the
differentiable plug-in squared equalized-odds statistic of the encoded
training rows (:func:`fairmmd.eok.eok_hat_plugin`), with its mixture weights
frozen to the full training set's empirical S=0 outcome rates before the
first step.  Mini-batches are stratified per (s, y) cell (proportional
counts, at least one row each) so the penalty stays defined; the frozen
weights are *not* recomputed per batch.  Both gradient components are
analytic: the cross-entropy part in closed form, the penalty part through
:func:`fairmmd.eok.eok_gradient_plugin`.  The per-step trace records the
objective at the pre-update parameters, and total = sup + lambda * penalty
holds exactly by construction.

:func:`lambda_sweep` maps the accuracy/fairness frontier: one dataset, one
training run per penalty weight, and a metrics row per run (computed on the
training rows — the frontier describes what the optimizer trades off, not
generalization).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from ._rng import rng_for
from .eok import empirical_weights, eok_gradient_plugin, eok_hat_plugin
from .errors import TrainingError, ValidationError
from .fairness import (
    balanced_accuracy,
    dc,
    dodds,
    dp,
    evaluate_batch,
    logistic_head_classifier,
    sup_dp,
)
from .kernels import KernelSpec
from .mmd import gamma_biased
from .synth import LabeledDataset, PopulationSpec, cell_rows, sample_population

__all__ = [
    "TrainConfig",
    "TrainResult",
    "ObjectiveEval",
    "objective_gradient",
    "train",
    "lambda_sweep",
    "SweepResult",
]

_LOG_EPS = 1e-12


@dataclass(frozen=True)
class TrainConfig:
    """Hyper-parameters of one training run."""

    kernel: KernelSpec
    lam: float = 1.0
    steps: int = 200
    step_size: float = 0.5
    encoder_dim: int = 2
    batch: int | None = None
    seed: int = 0
    init_scale: float = 0.1

    def __post_init__(self):
        if self.lam < 0 or not np.isfinite(self.lam):
            raise ValidationError(f"lambda must be finite and >= 0, got {self.lam}")
        if self.steps < 1:
            raise ValidationError(f"steps must be >= 1, got {self.steps}")
        if self.step_size <= 0:
            raise ValidationError(f"step_size must be > 0, got {self.step_size}")
        if self.encoder_dim < 1:
            raise ValidationError(f"encoder_dim must be >= 1, got {self.encoder_dim}")
        if self.batch is not None and self.batch < 8:
            raise ValidationError(f"batch must be >= 8 rows (or None), got {self.batch}")


@dataclass(frozen=True)
class ObjectiveEval:
    """Objective pieces and analytic gradients at one parameter point."""

    sup: float
    penalty: float
    total: float
    d_encoder: np.ndarray
    d_head_w: np.ndarray
    d_head_b: float


@dataclass(frozen=True)
class TrainResult:
    """Final parameters plus the per-step objective trace."""

    encoder: np.ndarray
    head_w: np.ndarray
    head_b: float
    weights: np.ndarray
    sup_trace: np.ndarray
    penalty_trace: np.ndarray
    total_trace: np.ndarray
    config: TrainConfig


def objective_gradient(
    data: LabeledDataset,
    encoder,
    head_w,
    head_b: float,
    cfg: TrainConfig,
    weights=None,
) -> ObjectiveEval:
    """Evaluate the penalized objective and its analytic gradients.

    ``weights`` are the frozen mixture weights; they default to the
    empirical S=0 outcome rates of ``data`` (the right thing for full-batch
    calls — mini-batch callers must pass the full-set weights explicitly).
    """
    W = np.asarray(encoder, dtype=float)
    w = np.asarray(head_w, dtype=float)
    if W.ndim != 2 or W.shape != (cfg.encoder_dim, data.dim):
        raise ValidationError(f"encoder must be ({cfg.encoder_dim}, {data.dim})")
    if w.shape != (cfg.encoder_dim,):
        raise ValidationError(f"head weights must be ({cfg.encoder_dim},)")
    if weights is None:
        weights = empirical_weights(data)

    X = data.z
    Z = X @ W.T
    logits = Z @ w + head_b
    p = 1.0 / (1.0 + np.exp(-logits))
    y = data.y.astype(float)
    ce = float(-np.mean(y * np.log(p + _LOG_EPS) + (1.0 - y) * np.log(1.0 - p + _LOG_EPS)))
    resid = (p - y) / data.n
    d_head_w = Z.T @ resid
    d_head_b = float(resid.sum())
    d_enc = np.outer(w, X.T @ resid)

    encoded = LabeledDataset(z=Z, s=data.s, y=data.y)
    penalty = eok_hat_plugin(cfg.kernel, encoded, weights=weights).eok2
    if cfg.lam > 0:
        d_enc = d_enc + cfg.lam * eok_gradient_plugin(cfg.kernel, data, W, weights=weights)
    total = ce + cfg.lam * penalty
    return ObjectiveEval(
        sup=ce, penalty=float(penalty), total=float(total),
        d_encoder=d_enc, d_head_w=d_head_w, d_head_b=d_head_b,
    )


def _stratified_batch(data: LabeledDataset, batch: int, rng: np.random.Generator) -> LabeledDataset:
    """Proportional per-cell subsample with at least one row per cell."""
    takes, pools = [], []
    for s in (0, 1):
        for y in (0, 1):
            pool = cell_rows(data, s, y)
            if pool.size == 0:
                raise ValidationError(f"training data must populate cell (s={s}, y={y})")
            pools.append(pool)
            takes.append(max(1, int(round(batch * pool.size / data.n))))
    idx = np.concatenate([
        rng.choice(pool, size=min(take, pool.size), replace=False)
        for pool, take in zip(pools, takes)
    ])
    return LabeledDataset(z=data.z[idx], s=data.s[idx], y=data.y[idx])


def train(data: LabeledDataset, cfg: TrainConfig) -> TrainResult:
    """Gradient-descent run; deterministic given (data, cfg).

    Raises TrainingError (with the offending step) if the objective or a
    gradient stops being finite — typically a step size too large for the
    data scale.
    """
    rng = rng_for(cfg.seed, 7)
    W = cfg.init_scale * rng.standard_normal((cfg.encoder_dim, data.dim)) / np.sqrt(data.dim)
    w = cfg.init_scale * rng.standard_normal(cfg.encoder_dim)
    b = 0.0
    frozen = empirical_weights(data)
    sup_t = np.empty(cfg.steps)
    pen_t = np.empty(cfg.steps)
    tot_t = np.empty(cfg.steps)
    for step in range(cfg.steps):
        batch = data if cfg.batch is None else _stratified_batch(data, cfg.batch, rng)
        ev = objective_gradient(batch, W, w, b, cfg, weights=frozen)
        finite = (
            np.isfinite(ev.total)
            and np.all(np.isfinite(ev.d_encoder))
            and np.all(np.isfinite(ev.d_head_w))
            and np.isfinite(ev.d_head_b)
        )
        if not finite:
            raise TrainingError(f"objective diverged at step {step}", step=step)
        sup_t[step], pen_t[step], tot_t[step] = ev.sup, ev.penalty, ev.total
        W = W - cfg.step_size * ev.d_encoder
        w = w - cfg.step_size * ev.d_head_w
        b = b - cfg.step_size * ev.d_head_b
        if not (np.all(np.isfinite(W)) and np.all(np.isfinite(w)) and np.isfinite(b)):
            raise TrainingError(f"parameters diverged at step {step}", step=step)
    return TrainResult(
        encoder=W, head_w=w, head_b=float(b), weights=frozen,
        sup_trace=sup_t, penalty_trace=pen_t, total_trace=tot_t, config=cfg,
    )


@dataclass(frozen=True)
class SweepResult:
    """Frontier rows (one per penalty weight) for a single dataset."""

    rows: tuple
    lambdas: tuple
    n: int
    seed: int

    def as_dict(self) -> dict:
        return {
            "rows": [dict(r) for r in self.rows],
            "lambdas": list(self.lambdas), "n": self.n, "seed": self.seed,
        }


def lambda_sweep(
    population: PopulationSpec,
    lambdas,
    cfg: TrainConfig,
    n: int,
    seed: int = 0,
    dc_bins: int | None = 20,
) -> SweepResult:
    """Train once per penalty weight on a shared dataset and tabulate metrics.

    Each row reports, on the encoded training rows: expected accuracy
    E[h 1{y=1} + (1-h) 1{y=0}], outcome balanced accuracy, dp, dodds, dc
    (binned by default for readability), the plug-in eok2, the dp supremum,
    and beta_hat (the S=1 group's outcome-conditional discrepancy) — the
    quantity whose product with the outcome-rate gap floors sup_dp.
    """
    lambdas = [float(l) for l in lambdas]
    if not lambdas:
        raise ValidationError("need at least one lambda")
    data = sample_population(population, n, seed)
    rows = []
    for lam in lambdas:
        res = train(data, replace(cfg, lam=lam))
        encoded = LabeledDataset(z=data.z @ res.encoder.T, s=data.s, y=data.y)
        head = logistic_head_classifier(res.head_w, res.head_b)
        t = evaluate_batch(head, encoded.z)
        yf = encoded.y.astype(float)
        rows.append({
            "lambda": lam,
            "accuracy": float(np.mean(t * yf + (1.0 - t) * (1.0 - yf))),
            "balanced_accuracy": balanced_accuracy(head, encoded, "y"),
            "dp": dp(head, encoded),
            "dodds": dodds(head, encoded),
            "dc": dc(head, encoded, bins=dc_bins),
            "eok2": eok_hat_plugin(cfg.kernel, encoded).eok2,
            "sup_dp": sup_dp(cfg.kernel, encoded),
            "beta_hat": gamma_biased(
                cfg.kernel,
                encoded.z[cell_rows(encoded, 1, 0)],
                encoded.z[cell_rows(encoded, 1, 1)],
            ),
        })
    return SweepResult(rows=tuple(rows), lambdas=tuple(lambdas), n=n, seed=seed)
