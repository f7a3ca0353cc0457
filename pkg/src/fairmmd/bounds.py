"""Checkable certificates for the fairness trade-off inequalities.

Each checker evaluates both sides of one inequality (or equality) on a
dataset and returns a :class:`BoundReport`.  Reports use a single sign
convention: for ``kind="ge"`` clauses the theorem guarantees lhs >= rhs and
the clause holds when ``slack = lhs - rhs >= -tolerance``; for
``kind="eq"`` clauses it holds when ``|slack| <= tolerance``.  An
``inputs_digest`` ties every verdict to the exact data and parameters it was
computed from.

The clauses:

* :func:`check_unbiased_equality` — when the empirical outcome rates of the
  two groups agree (precondition), the dp supremum over the RKHS ball equals
  (2 sqrt(nu))^(-1) times the equalized-odds discrepancy root.

* :func:`check_biased_lower_bound` — in general the dp supremum is at least
  (2 sqrt(nu))^(-1) * | |p0(0) - p0(1)| * beta - eok |, where beta is the
  discrepancy between the S=1 group's two outcome-conditional laws and
  p0(s) = P(Y=0 | S=s): group-blind representations cannot hide outcome
  bias unless they also collapse outcome information.

* :func:`check_ba_bounds` — balanced accuracy of any ball classifier at
  predicting the *group* is at most (2 + nu^(-1/2) gamma(Z|S=0, Z|S=1)) / 4
  (probed with the group witness and random ball members), while the
  *outcome* witness achieves balanced accuracy at least
  (2 + nu^(-1/2) gamma(Z|Y=0, Z|Y=1)) / 4.

* :func:`check_calibration_chain` — scores u = h(z) paired with outcomes are
  compared across groups with the tensor kernel
  (u u' + rbf(u, u'; sigma_u)) (x) rbf(y, y'; sigma_y).  Clause A: the
  calibration gap dc dominates (4 sqrt(nu_u nu_y))^(-1) times that tensor
  discrepancy.  Clause B: the tensor discrepancy dominates the dp supremum —
  conservatively, since the identity's RKHS norm in the sum-kernel score
  space is only bounded above by 1 (via its linear part), and the true
  multiplier 1/||id|| >= 1 is not computed.

* :func:`check_tvd_dominance` — on finitely supported representations,
  2 sqrt(nu) times the total variation distance between the group laws
  dominates the kernel discrepancy; exact up to float error, so the default
  tolerance is 1e-9.

Right-hand-side discrepancies are always the plug-in root
(:func:`fairmmd.mmd.gamma_biased`): it is the exact kernel discrepancy of
the empirical laws, so each distribution-level inequality applies to the
data verbatim and a correct implementation cannot fail these checks by
estimator noise alone.  The dp supremum keeps its unbiased-root definition
from :func:`fairmmd.fairness.sup_dp`.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from ._rng import rng_for
from .eok import eok_hat_plugin
from .errors import InapplicableError, ValidationError
from .fairness import (
    Classifier,
    balanced_accuracy,
    dc,
    group_stats,
    random_ball_classifier,
    sup_dp,
    witness_classifier,
    evaluate_batch,
)
from .kernels import KernelSpec, kernel_sum, linear, product, rbf
from .mmd import gamma_biased
from .synth import LabeledDataset, cell_rows

__all__ = [
    "BoundReport",
    "check_unbiased_equality",
    "check_biased_lower_bound",
    "check_ba_bounds",
    "check_calibration_chain",
    "check_tvd_dominance",
]


@dataclass(frozen=True)
class BoundReport:
    """Evaluated clause: sides, slack, verdict, and an input fingerprint."""

    name: str
    kind: str  # "ge" (lhs >= rhs) or "eq" (lhs == rhs)
    lhs: float
    rhs: float
    slack: float
    tolerance: float
    holds: bool
    inputs_digest: str

    def as_dict(self) -> dict:
        return {
            "name": self.name, "kind": self.kind, "lhs": self.lhs, "rhs": self.rhs,
            "slack": self.slack, "tolerance": self.tolerance, "holds": self.holds,
            "inputs_digest": self.inputs_digest,
        }


def _digest(data: LabeledDataset, spec: KernelSpec, *extra) -> str:
    """SHA-256 over the rows, labels, kernel description, and extras."""
    h = hashlib.sha256()
    h.update(np.ascontiguousarray(data.z).tobytes())
    h.update(np.ascontiguousarray(data.s).tobytes())
    h.update(np.ascontiguousarray(data.y).tobytes())
    h.update(repr(spec).encode())
    for item in extra:
        h.update(repr(item).encode())
    return h.hexdigest()


def _report(name: str, kind: str, lhs: float, rhs: float, tol: float, digest: str) -> BoundReport:
    if tol < 0:
        raise ValidationError(f"tolerance must be >= 0, got {tol}")
    slack = lhs - rhs
    holds = (slack >= -tol) if kind == "ge" else (abs(slack) <= tol)
    return BoundReport(
        name=name, kind=kind, lhs=float(lhs), rhs=float(rhs), slack=float(slack),
        tolerance=float(tol), holds=bool(holds), inputs_digest=digest,
    )


def check_unbiased_equality(
    spec: KernelSpec,
    data: LabeledDataset,
    tol: float = 0.02,
    rate_threshold: float = 0.02,
) -> BoundReport:
    """Equality of the dp supremum and the scaled eok root under matched rates.

    Applicable only when |p_hat(Y=0|S=0) - p_hat(Y=0|S=1)| <= rate_threshold;
    otherwise the premise fails and InapplicableError is raised rather than
    returning a meaningless verdict.
    """
    stats = group_stats(data)
    rate_gap = abs(stats.p_y_given_s[0, 0] - stats.p_y_given_s[1, 0])
    if rate_gap > rate_threshold:
        raise InapplicableError(
            f"outcome rates differ by {rate_gap:.4f} > {rate_threshold}; "
            "the equality clause assumes matched rates"
        )
    lhs = sup_dp(spec, data)
    rhs = eok_hat_plugin(spec, data).eok / (2.0 * np.sqrt(spec.nu))
    return _report(
        "sup_dp_equals_scaled_eok", "eq", lhs, rhs, tol,
        _digest(data, spec, "unbiased_equality", tol, rate_threshold),
    )


def check_biased_lower_bound(spec: KernelSpec, data: LabeledDataset, tol: float = 0.03) -> BoundReport:
    """General floor under the dp supremum from outcome-rate bias.

    rhs = (2 sqrt(nu))^(-1) * | |p_hat(0|0) - p_hat(0|1)| * beta_hat - eok |,
    with beta_hat the plug-in discrepancy between the S=1 group's outcome-
    conditional samples.
    """
    stats = group_stats(data)
    for y in (0, 1):
        if stats.counts[1, y] == 0:
            raise InapplicableError(f"beta_hat needs rows in cell (s=1, y={y})")
    rate_gap = abs(stats.p_y_given_s[0, 0] - stats.p_y_given_s[1, 0])
    beta = gamma_biased(spec, data.z[cell_rows(data, 1, 0)], data.z[cell_rows(data, 1, 1)])
    eok = eok_hat_plugin(spec, data).eok
    lhs = sup_dp(spec, data)
    rhs = abs(rate_gap * beta - eok) / (2.0 * np.sqrt(spec.nu))
    return _report(
        "sup_dp_biased_floor", "ge", lhs, rhs, tol,
        _digest(data, spec, "biased_lower_bound", tol),
    )


def _best_balanced_accuracy(h: Classifier, data: LabeledDataset, label: str) -> float:
    """BA of the better orientation of h (the ball is symmetric under g -> -g,
    which maps h to 1 - h and BA to 1 - BA)."""
    ba = balanced_accuracy(h, data, label)
    return max(ba, 1.0 - ba)


def check_ba_bounds(
    spec: KernelSpec,
    data: LabeledDataset,
    trials: int = 50,
    tol: float = 0.01,
    seed: int = 0,
    n_anchors: int = 100,
) -> tuple[BoundReport, BoundReport]:
    """Both balanced-accuracy clauses; returns (group_upper, outcome_lower).

    group_upper probes the bound with the group witness plus ``trials``
    random ball classifiers anchored at ``n_anchors`` subsampled rows, each
    tried in both orientations; lhs is the bound, rhs the best probe.
    outcome_lower evaluates the outcome witness against its guarantee.
    """
    z0 = data.z[data.s == 0]
    z1 = data.z[data.s == 1]
    gamma_s = gamma_biased(spec, z0, z1)
    if gamma_s > 2.0 * np.sqrt(spec.nu) * (1 + 1e-9):  # pragma: no cover
        raise ValidationError("discrepancy exceeded its kernel-bounded maximum")
    probes = [witness_classifier(spec, z1, z0)]
    rng = rng_for(seed, 29)
    anchors_idx = rng.choice(data.n, size=min(n_anchors, data.n), replace=False)
    for t in range(trials):
        probes.append(random_ball_classifier(spec, data.z[anchors_idx], seed=int(seed) * 100003 + t))
    best = max(_best_balanced_accuracy(h, data, "s") for h in probes)
    upper_bound = (2.0 + gamma_s / np.sqrt(spec.nu)) / 4.0
    upper = _report(
        "ba_group_upper", "ge", upper_bound, best, tol,
        _digest(data, spec, "ba_upper", trials, tol, seed, n_anchors),
    )

    zy0 = data.z[data.y == 0]
    zy1 = data.z[data.y == 1]
    gamma_y = gamma_biased(spec, zy0, zy1)
    h_y = witness_classifier(spec, zy1, zy0)
    lower = _report(
        "ba_outcome_lower", "ge",
        balanced_accuracy(h_y, data, "y"), (2.0 + gamma_y / np.sqrt(spec.nu)) / 4.0, tol,
        _digest(data, spec, "ba_lower", tol),
    )
    return upper, lower


def check_calibration_chain(
    spec: KernelSpec,
    data: LabeledDataset,
    h: Classifier | None = None,
    sigma_u: float = 0.5,
    sigma_y: float = 1.0,
    tol: float = 0.05,
) -> tuple[BoundReport, BoundReport]:
    """Calibration-vs-parity chain through the score-outcome tensor kernel.

    ``h`` defaults to the group witness (the dp-supremum achiever).  Scores
    and outcomes are paired into rows (u, y); the tensor kernel is
    (u u' + rbf_{sigma_u}) (x) rbf_{sigma_y} with score-side amplitude
    nu_u = 2 on [0, 1] and outcome-side nu_y = 1.  The dc side uses exact
    score atoms (no binning), keeping clause A an identity-level inequality
    on the empirical laws.
    """
    if h is None:
        h = witness_classifier(spec, data.z[data.s == 1], data.z[data.s == 0])
    scores = evaluate_batch(h, data.z)
    k_u = kernel_sum(linear(1.0), rbf(sigma_u))
    k_t = product(k_u, rbf(sigma_y), split=1)
    pairs = np.column_stack([scores, data.y.astype(float)])
    gamma_t = gamma_biased(k_t, pairs[data.s == 0], pairs[data.s == 1])

    from .fairness import external_scores_classifier

    h_aligned = external_scores_classifier(scores)
    clause_a = _report(
        "dc_dominates_tensor", "ge",
        dc(h_aligned, data, bins=None),
        gamma_t / (4.0 * np.sqrt(k_u.nu * rbf(sigma_y).nu)),
        tol,
        _digest(data, spec, "calibration_a", sigma_u, sigma_y, tol),
    )
    clause_b = _report(
        "tensor_dominates_sup_dp", "ge",
        gamma_t, sup_dp(spec, data), tol,
        _digest(data, spec, "calibration_b", sigma_u, sigma_y, tol),
    )
    return clause_a, clause_b


def check_tvd_dominance(
    spec: KernelSpec,
    data: LabeledDataset,
    tol: float = 1e-9,
    max_support: int = 64,
) -> BoundReport:
    """2 sqrt(nu) * TV(Z|S=0, Z|S=1) >= gamma, on small discrete supports.

    Requires the representation rows to take at most ``max_support`` distinct
    values so the total variation distance is computable exactly; raises
    InapplicableError otherwise.  Both sides are exact functionals of the
    empirical laws, so the default tolerance is float-level.
    """
    atoms, ids = np.unique(data.z, axis=0, return_inverse=True)
    if atoms.shape[0] > max_support:
        raise InapplicableError(
            f"representation has {atoms.shape[0]} distinct rows > {max_support}; "
            "exact total variation needs a small support"
        )
    masses = []
    for s in (0, 1):
        mask = data.s == s
        if not mask.any():
            raise InapplicableError("total variation needs rows in both groups")
        masses.append(np.bincount(ids[mask], minlength=atoms.shape[0]) / mask.sum())
    tvd = 0.5 * float(np.abs(masses[1] - masses[0]).sum())
    lhs = 2.0 * np.sqrt(spec.nu) * tvd
    rhs = gamma_biased(spec, data.z[data.s == 0], data.z[data.s == 1])
    return _report(
        "tvd_dominates_gamma", "ge", lhs, rhs, tol,
        _digest(data, spec, "tvd", tol, max_support),
    )
