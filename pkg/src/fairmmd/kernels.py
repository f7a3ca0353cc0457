"""Bounded positive-definite kernels with recorded constants.

Every statistic in this package is defined relative to a kernel whose
amplitude bound ``nu`` (``k(z, z) <= nu`` on the declared domain) and
Lipschitz constant enter the fairness bounds directly, so both constants are
derived once at construction time and stored on the spec instead of being
recomputed ad hoc.

Families
--------
``rbf``        exp(-||a - b||^2 / (2 sigma^2)); nu = 1; Lipschitz
               exp(-1/2)/sigma (max slope of the radial profile, attained at
               r = sigma; valid w.r.t. the Euclidean metric).
``laplacian``  exp(-||a - b||_1 / sigma); nu = 1; Lipschitz 1/sigma w.r.t.
               the L1 metric that defines the kernel (the Euclidean constant
               would pick up a sqrt(d) factor).
``linear``     <a, b> on the centered ball ||a|| <= radius; nu = radius^2;
               Lipschitz radius.
``product``    k1 (x) k2 on concatenated inputs split at index ``split``;
               nu = nu1 * nu2; Lipschitz l1*nu2 + l2*nu1.
``sum``        k1 + k2 on a shared domain; nu = nu1 + nu2; Lipschitz l1 + l2.
               With a linear first part this space contains the identity
               function with RKHS norm at most 1, which is what the
               calibration bound checker relies on.

The rbf and laplacian families are characteristic on R^d, so a zero kernel
discrepancy identifies the distributions; the linear kernel only separates
means.  Characteristicness is taken as a known property of these standard
families rather than re-derived here.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist

from .errors import DomainError, ValidationError

__all__ = [
    "KernelSpec",
    "GramMatrix",
    "rbf",
    "laplacian",
    "linear",
    "product",
    "kernel_sum",
    "eval_kernel",
    "pairwise",
    "gram",
    "lipschitz_constant",
    "median_heuristic",
]

_FAMILIES = ("rbf", "laplacian", "linear", "product", "sum")


@dataclass(frozen=True)
class KernelSpec:
    """Immutable description of a kernel: family, parameters, and constants.

    Use the constructor helpers (:func:`rbf`, :func:`laplacian`,
    :func:`linear`, :func:`product`, :func:`kernel_sum`) rather than building
    instances by hand; they validate parameters and fill in ``nu`` and
    ``lipschitz``.
    """

    family: str
    sigma: float | None = None
    radius: float | None = None
    parts: tuple["KernelSpec", "KernelSpec"] | None = None
    split: int | None = None
    nu: float = field(default=np.nan)
    lipschitz: float = field(default=np.nan)

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise ValidationError(
                f"unknown kernel family {self.family!r}; expected one of {_FAMILIES}"
            )
        if not np.isfinite(self.nu) or self.nu <= 0:
            raise ValidationError(f"kernel amplitude bound nu must be finite and > 0, got {self.nu}")


def rbf(sigma: float = 1.0) -> KernelSpec:
    """Gaussian kernel exp(-||a-b||^2 / (2 sigma^2)) with bandwidth ``sigma``."""
    _check_positive("sigma", sigma)
    return KernelSpec("rbf", sigma=float(sigma), nu=1.0,
                      lipschitz=float(np.exp(-0.5) / sigma))


def laplacian(sigma: float = 1.0) -> KernelSpec:
    """Laplacian kernel exp(-||a-b||_1 / sigma) with bandwidth ``sigma``."""
    _check_positive("sigma", sigma)
    return KernelSpec("laplacian", sigma=float(sigma), nu=1.0, lipschitz=1.0 / float(sigma))


def linear(radius: float) -> KernelSpec:
    """Linear kernel <a, b> on the ball ||a|| <= radius."""
    _check_positive("radius", radius)
    r = float(radius)
    return KernelSpec("linear", radius=r, nu=r * r, lipschitz=r)


def product(k1: KernelSpec, k2: KernelSpec, split: int) -> KernelSpec:
    """Tensor-product kernel on concatenated inputs.

    Rows are split at column index ``split``: the first ``split`` coordinates
    feed ``k1``, the rest feed ``k2``, and the kernel value is the product.
    """
    if not isinstance(split, (int, np.integer)) or split < 1:
        raise ValidationError(f"split must be a positive integer, got {split!r}")
    return KernelSpec(
        "product", parts=(k1, k2), split=int(split),
        nu=k1.nu * k2.nu,
        lipschitz=k1.lipschitz * k2.nu + k2.lipschitz * k1.nu,
    )


def kernel_sum(k1: KernelSpec, k2: KernelSpec) -> KernelSpec:
    """Sum kernel k1 + k2, both parts evaluated on the full input."""
    return KernelSpec("sum", parts=(k1, k2), nu=k1.nu + k2.nu,
                      lipschitz=k1.lipschitz + k2.lipschitz)


@dataclass(frozen=True)
class GramMatrix:
    """Kernel matrix ``values[i, j] = k(A[i], B[j])`` plus the spec that built it."""

    values: np.ndarray
    spec: KernelSpec

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape


def _check_positive(name: str, value) -> None:
    if not np.isscalar(value) or not np.isfinite(value) or value <= 0:
        raise ValidationError(f"{name} must be a finite positive scalar, got {value!r}")


def _as_points(X, name: str) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2:
        raise ValidationError(f"{name} must be a vector or a 2-d array of row vectors")
    if X.shape[0] == 0 or X.shape[1] == 0:
        raise ValidationError(f"{name} must be non-empty, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise ValidationError(f"{name} contains non-finite entries")
    return X


def _check_domain(spec: KernelSpec, X: np.ndarray, name: str) -> None:
    """Validate dimensionality and (for linear parts) ball membership."""
    if spec.family == "linear":
        norms = np.sqrt(np.einsum("ij,ij->i", X, X))
        worst = norms.max()
        if worst > spec.radius * (1 + 1e-9) + 1e-12:
            raise DomainError(
                f"{name} leaves the linear kernel's domain: max norm {worst:.6g} "
                f"exceeds radius {spec.radius:.6g}"
            )
    elif spec.family == "product":
        if X.shape[1] <= spec.split:
            raise DomainError(
                f"product kernel needs inputs with more than split={spec.split} "
                f"columns, got {X.shape[1]}"
            )
        _check_domain(spec.parts[0], X[:, : spec.split], name)
        _check_domain(spec.parts[1], X[:, spec.split :], name)
    elif spec.family == "sum":
        _check_domain(spec.parts[0], X, name)
        _check_domain(spec.parts[1], X, name)


def pairwise(spec: KernelSpec, A, B) -> np.ndarray:
    """Dense kernel matrix between row sets ``A`` (n x d) and ``B`` (m x d).

    This is the single evaluation path shared by :func:`gram`,
    :func:`eval_kernel`, and the streaming accumulators in the MMD module, so
    a value computed anywhere in the package is the same number everywhere.
    """
    A = _as_points(A, "A")
    B = _as_points(B, "B")
    if A.shape[1] != B.shape[1]:
        raise DomainError(f"dimension mismatch: A has d={A.shape[1]}, B has d={B.shape[1]}")
    _check_domain(spec, A, "A")
    _check_domain(spec, B, "B")
    return _pairwise_unchecked(spec, A, B)


def _pairwise_unchecked(spec: KernelSpec, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    if spec.family == "rbf":
        sq = cdist(A, B, "sqeuclidean")
        return np.exp(-sq / (2.0 * spec.sigma**2))
    if spec.family == "laplacian":
        return np.exp(-cdist(A, B, "cityblock") / spec.sigma)
    if spec.family == "linear":
        return A @ B.T
    if spec.family == "product":
        s = spec.split
        return _pairwise_unchecked(spec.parts[0], A[:, :s], B[:, :s]) * _pairwise_unchecked(
            spec.parts[1], A[:, s:], B[:, s:]
        )
    if spec.family == "sum":
        return _pairwise_unchecked(spec.parts[0], A, B) + _pairwise_unchecked(
            spec.parts[1], A, B
        )
    raise ValidationError(f"unknown kernel family {spec.family!r}")  # pragma: no cover


def eval_kernel(spec: KernelSpec, a, b) -> float:
    """Evaluate k(a, b) for two points."""
    return float(pairwise(spec, np.atleast_1d(a), np.atleast_1d(b))[0, 0])


def gram(spec: KernelSpec, A, B=None) -> GramMatrix:
    """Kernel matrix between two point sets (``B`` defaults to ``A``).

    Args:
        spec: kernel description.
        A: (n, d) array of row vectors.
        B: optional (m, d) array; when omitted the symmetric PSD Gram of
            ``A`` with itself is returned.

    Returns:
        GramMatrix with ``values`` of shape (n, m).
    """
    values = pairwise(spec, A, A if B is None else B)
    return GramMatrix(values=values, spec=spec)


def lipschitz_constant(spec: KernelSpec) -> float:
    """Lipschitz constant of z -> k(z, anchor), in the family's native metric.

    See the module docstring for the per-family derivations; the constant is
    computed at construction time and merely read back here.
    """
    return spec.lipschitz


def median_heuristic(X, cap: int = 2000, seed: int = 0) -> float:
    """Median pairwise Euclidean distance of ``X``, a common rbf bandwidth pick.

    Subsamples to ``cap`` rows for large inputs.  This is a convenience for
    the command-line layer only; no bound in this package depends on how the
    bandwidth was chosen.
    """
    X = _as_points(X, "X")
    if X.shape[0] > cap:
        from ._rng import rng_for

        idx = rng_for(seed, 981).choice(X.shape[0], size=cap, replace=False)
        X = X[idx]
    d = cdist(X, X, "euclidean")
    off = d[np.triu_indices_from(d, k=1)]
    med = float(np.median(off))
    if not np.isfinite(med) or med <= 0:
        raise ValidationError("median heuristic undefined: all points coincide")
    return med
