"""Kernel two-sample discrepancy estimators.

Three estimators of the squared population discrepancy between the laws of
two samples A (n0 x d) and B (n1 x d), plus the witness function that
attains it:

* :func:`mmd2_unbiased` — the U-statistic

      sum_{i != j} k(a_i, a_j) / (n0 (n0-1))
    + sum_{i != j} k(b_i, b_j) / (n1 (n1-1))
    - 2 sum_{i, j} k(a_i, b_j) / (n0 n1),

  which is exactly unbiased and may be negative on near-null data.  The
  square root reported alongside clips at zero and flags that it did.

* :func:`mmd2_biased` — the V-statistic (all pairs, diagonals included),
  the squared RKHS norm of the difference of empirical mean embeddings;
  nonnegative up to float rounding.

* :func:`mmd2_linear_time` — a seeded random pairing of rows into disjoint
  quadruples (a, a', b, b') scored by k(a,a') + k(b,b') - k(a,b') - k(a',b);
  O(n) work, and conditionally on the data its expectation over pairings is
  the U-statistic above.

* :func:`witness_eval` — values of the unit-norm witness
  (mu_A - mu_B) / ||mu_A - mu_B|| at query points, normalized by the biased
  root so that its A-mean minus B-mean reproduces that root exactly.

Gram matrices are never materialized beyond a fixed block size: sums stream
over row/column blocks in a fixed order, so results are deterministic and
memory stays O(block^2) regardless of sample size.  For the linear kernel
the Gram sums collapse to inner products of sample sums, which is used as an
exact-arithmetic fast path.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._rng import rng_for
from .errors import SizeError, ValidationError
from .kernels import KernelSpec, _as_points, _check_domain, _pairwise_unchecked

__all__ = [
    "MmdEstimate",
    "mmd2_unbiased",
    "mmd2_biased",
    "mmd2_linear_time",
    "witness_eval",
    "gamma_biased",
]

# Side length of the streamed Gram blocks; 2048^2 float64 entries is ~32 MB.
BLOCK = 2048


@dataclass(frozen=True)
class MmdEstimate:
    """One squared-discrepancy estimate plus the clip-aware root.

    ``mmd`` is always ``sqrt(max(mmd2, 0))``; ``clipped`` records whether the
    raw ``mmd2`` was negative, so no information is lost by the clip.
    ``n0``/``n1`` are the row counts actually used (after the linear-time
    estimator's truncation to an even common length).
    """

    mmd2: float
    mmd: float
    variant: str
    n0: int
    n1: int
    clipped: bool


def _prep(spec: KernelSpec, A, B) -> tuple[np.ndarray, np.ndarray]:
    A = _as_points(A, "A")
    B = _as_points(B, "B")
    if A.shape[1] != B.shape[1]:
        raise ValidationError(
            f"dimension mismatch: A has d={A.shape[1]}, B has d={B.shape[1]}"
        )
    _check_domain(spec, A, "A")
    _check_domain(spec, B, "B")
    return A, B


def _sum_cross(spec: KernelSpec, A: np.ndarray, B: np.ndarray) -> float:
    """Sum of the full cross Gram block, streamed."""
    if spec.family == "linear":
        return float(A.sum(axis=0) @ B.sum(axis=0))
    n, m = A.shape[0], B.shape[0]
    if n * m <= BLOCK * BLOCK:
        return float(_pairwise_unchecked(spec, A, B).sum())
    total = 0.0
    for i in range(0, n, BLOCK):
        Ai = A[i : i + BLOCK]
        for j in range(0, m, BLOCK):
            total += float(_pairwise_unchecked(spec, Ai, B[j : j + BLOCK]).sum())
    return total


def _rowwise(spec: KernelSpec, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """k(A[i], B[i]) for aligned rows (no cross terms)."""
    if spec.family == "rbf":
        sq = np.einsum("ij,ij->i", A - B, A - B)
        return np.exp(-sq / (2.0 * spec.sigma**2))
    if spec.family == "laplacian":
        return np.exp(-np.abs(A - B).sum(axis=1) / spec.sigma)
    if spec.family == "linear":
        return np.einsum("ij,ij->i", A, B)
    if spec.family == "product":
        s = spec.split
        return _rowwise(spec.parts[0], A[:, :s], B[:, :s]) * _rowwise(
            spec.parts[1], A[:, s:], B[:, s:]
        )
    if spec.family == "sum":
        return _rowwise(spec.parts[0], A, B) + _rowwise(spec.parts[1], A, B)
    raise ValidationError(f"unknown kernel family {spec.family!r}")  # pragma: no cover


def _sums_within(spec: KernelSpec, A: np.ndarray) -> tuple[float, float]:
    """(full Gram sum, diagonal sum) of one sample against itself."""
    if spec.family == "linear":
        sa = A.sum(axis=0)
        return float(sa @ sa), float(np.einsum("ij,ij->", A, A))
    diag = float(_rowwise(spec, A, A).sum())
    return _sum_cross(spec, A, A), diag


def mmd2_unbiased(spec: KernelSpec, A, B) -> MmdEstimate:
    """U-statistic estimate of the squared discrepancy (may be negative).

    Args:
        spec: kernel description.
        A: (n0, d) sample from the first law, n0 >= 2.
        B: (n1, d) sample from the second law, n1 >= 2.
    """
    A, B = _prep(spec, A, B)
    n0, n1 = A.shape[0], B.shape[0]
    if n0 < 2 or n1 < 2:
        raise SizeError(f"unbiased estimator needs >= 2 rows per sample, got {n0} and {n1}")
    tot_a, diag_a = _sums_within(spec, A)
    tot_b, diag_b = _sums_within(spec, B)
    cross = _sum_cross(spec, A, B)
    mmd2 = (
        (tot_a - diag_a) / (n0 * (n0 - 1))
        + (tot_b - diag_b) / (n1 * (n1 - 1))
        - 2.0 * cross / (n0 * n1)
    )
    return MmdEstimate(
        mmd2=float(mmd2), mmd=float(np.sqrt(max(mmd2, 0.0))), variant="unbiased",
        n0=n0, n1=n1, clipped=bool(mmd2 < 0),
    )


def mmd2_biased(spec: KernelSpec, A, B) -> MmdEstimate:
    """V-statistic (plug-in) estimate: the squared norm of the difference of
    empirical mean embeddings.  Nonnegative up to float rounding."""
    A, B = _prep(spec, A, B)
    n0, n1 = A.shape[0], B.shape[0]
    tot_a, _ = _sums_within(spec, A)
    tot_b, _ = _sums_within(spec, B)
    cross = _sum_cross(spec, A, B)
    mmd2 = tot_a / (n0 * n0) + tot_b / (n1 * n1) - 2.0 * cross / (n0 * n1)
    return MmdEstimate(
        mmd2=float(mmd2), mmd=float(np.sqrt(max(mmd2, 0.0))), variant="biased",
        n0=n0, n1=n1, clipped=bool(mmd2 < 0),
    )


def mmd2_linear_time(spec: KernelSpec, A, B, seed: int) -> MmdEstimate:
    """Linear-time paired estimator.

    Rows of each sample are shuffled with a seeded generator, truncated to
    the largest common even length m, and consumed two at a time; quadruple i
    contributes k(a,a') + k(b,b') - k(a,b') - k(a',b).  Averaging the
    contributions costs O(m) kernel evaluations.
    """
    A, B = _prep(spec, A, B)
    n0, n1 = A.shape[0], B.shape[0]
    if min(n0, n1) < 4:
        raise SizeError(f"linear-time estimator needs >= 4 rows per sample, got {n0} and {n1}")
    rng = rng_for(seed)
    a = A[rng.permutation(n0)]
    b = B[rng.permutation(n1)]
    m = min(n0, n1)
    m -= m % 2
    a0, a1 = a[0:m:2], a[1:m:2]
    b0, b1 = b[0:m:2], b[1:m:2]
    h = (
        _rowwise(spec, a0, a1)
        + _rowwise(spec, b0, b1)
        - _rowwise(spec, a0, b1)
        - _rowwise(spec, a1, b0)
    )
    mmd2 = float(h.mean())
    return MmdEstimate(
        mmd2=mmd2, mmd=float(np.sqrt(max(mmd2, 0.0))), variant="linear_time",
        n0=m, n1=m, clipped=bool(mmd2 < 0),
    )


def witness_eval(spec: KernelSpec, A, B, query) -> np.ndarray | float:
    """Values of the normalized empirical witness at query points.

    The witness is f(q) = [mean_i k(q, a_i) - mean_j k(q, b_j)] / r with
    r = sqrt(biased mmd2), the unit-RKHS-norm direction separating the two
    empirical mean embeddings.  By construction its A-mean minus B-mean
    equals r exactly.

    Accepts a single point (returns a float) or a (m, d) array (returns a
    length-m vector).  Raises ValidationError when the two empirical
    embeddings coincide (r = 0), since no direction is defined.
    """
    single = np.asarray(query, dtype=float).ndim == 1
    A, B = _prep(spec, A, B)
    Q, _ = _prep(spec, query, A[:1])
    root = mmd2_biased(spec, A, B).mmd
    if root <= 0.0:
        raise ValidationError("witness undefined: the empirical mean embeddings coincide")
    out = np.empty(Q.shape[0])
    for i in range(0, Q.shape[0], BLOCK):
        Qi = Q[i : i + BLOCK]
        mean_a = _cross_row_means(spec, Qi, A)
        mean_b = _cross_row_means(spec, Qi, B)
        out[i : i + BLOCK] = (mean_a - mean_b) / root
    return float(out[0]) if single else out


def _cross_row_means(spec: KernelSpec, Q: np.ndarray, A: np.ndarray) -> np.ndarray:
    """mean_j k(Q[i], A[j]) for each query row, streamed over A."""
    if spec.family == "linear":
        return Q @ (A.mean(axis=0))
    n = A.shape[0]
    acc = np.zeros(Q.shape[0])
    for j in range(0, n, BLOCK):
        acc += _pairwise_unchecked(spec, Q, A[j : j + BLOCK]).sum(axis=1)
    return acc / n


def gamma_biased(spec: KernelSpec, A, B) -> float:
    """Plug-in discrepancy root sqrt(max(biased mmd2, 0)).

    This is the exact kernel discrepancy between the two *empirical* laws,
    which is why the bound checkers use it on their right-hand sides:
    distribution-level inequalities then apply to the data verbatim.
    """
    return mmd2_biased(spec, A, B).mmd
