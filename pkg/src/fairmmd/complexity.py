"""Encoder-class complexity and finite-sample deviation certificates.

Gaussian complexity of an encoder family F at inputs X is

    G = E_xi  sup_{f in F}  sum_i <xi_i, f(x_i)>,   xi_i iid standard normal,

estimated here by Monte Carlo over finite families (:func:`gaussian_complexity_mc`
for grids of linear maps, :func:`gaussian_complexity_images` for precomputed
encoder images such as sampled networks).  For feed-forward networks with
layer matrices bounded in the (1, infinity) norm (every row's L1 norm at most
``width_bound``), scalar output, and a ``act_lipschitz``-Lipschitz activation
fixing 0, the closed form

    (2 width_bound)^depth * act_lipschitz^(depth-1)
        * sqrt(2 log(2 d0)) * max_k ||X[:, k]||_2

of :func:`fnn_complexity_bound` dominates the Monte Carlo value.

:func:`deviation_bound` turns a complexity value into a two-sided
finite-sample certificate for the squared equalized-odds statistic: with
mixture samples of total size n split in proportions rho0/rho1, kernel
amplitude nu and kernel Lipschitz constant lip, with probability 1 - delta
the estimate deviates from its population value by at most

    8 nu max(1/rho0, 1/rho1) sqrt(log(2/delta) / n)
      + (2 sqrt(2 pi) lip / n) max((1 + 1/rho0)/rho0, (1 + 1/rho1)/rho1) * G,

uniformly over the encoder family.  :func:`concentration_check` exercises
the certificate end to end on a linear-kernel population whose statistic has
a closed form: it resamples mixtures, measures the worst deviation over an
encoder grid, and reports whether the empirical (1 - delta) quantile stays
under the bound at every sample size, along with the log-log slope of the
mean deviation (the n^(-1/2) signature).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._rng import rng_for, subseed
from .errors import InapplicableError, SizeError, ValidationError
from .eok import reweight_sample
from .kernels import KernelSpec
from .mmd import mmd2_biased
from .synth import PopulationSpec, sample_population

__all__ = [
    "EncoderFamily",
    "ComplexityEstimate",
    "ConcentrationReport",
    "finite_grid",
    "fnn_family",
    "gaussian_complexity_mc",
    "gaussian_complexity_images",
    "fnn_complexity_bound",
    "sample_fnn_grid",
    "fnn_apply",
    "deviation_bound",
    "suggest_radius",
    "concentration_check",
]


@dataclass(frozen=True)
class EncoderFamily:
    """Either an explicit grid of linear maps or a feed-forward network class.

    finite_grid: ``maps`` holds (d_out, d_in) matrices sharing one shape.
    fnn: ``widths`` = (d0, ..., 1) layer sizes, ``width_bound`` the row-L1
    bound on every layer matrix, ``act_lipschitz`` the activation's Lipschitz
    constant (activation fixes 0).
    """

    kind: str
    maps: tuple = ()
    widths: tuple = ()
    width_bound: float = np.nan
    act_lipschitz: float = np.nan

    @property
    def depth(self) -> int:
        return len(self.widths) - 1


def finite_grid(maps) -> EncoderFamily:
    """Family from an explicit list of linear encoder matrices."""
    mats = tuple(np.asarray(W, dtype=float) for W in maps)
    if not mats:
        raise ValidationError("finite grid needs at least one map")
    shape = mats[0].shape
    for W in mats:
        if W.ndim != 2 or W.shape != shape or not np.all(np.isfinite(W)):
            raise ValidationError("all grid maps must be finite matrices of one shape")
    return EncoderFamily(kind="finite_grid", maps=mats)


def fnn_family(widths, width_bound: float, act_lipschitz: float = 1.0) -> EncoderFamily:
    """Scalar-output network class with (1, infinity)-bounded layers."""
    widths = tuple(int(w) for w in widths)
    if len(widths) < 2 or any(w < 1 for w in widths):
        raise ValidationError(f"widths must list >= 2 positive layer sizes, got {widths}")
    if widths[-1] != 1:
        raise ValidationError("the network class is scalar-output; last width must be 1")
    if not (width_bound > 0 and np.isfinite(width_bound)):
        raise ValidationError(f"width_bound must be positive, got {width_bound}")
    if not (act_lipschitz > 0 and np.isfinite(act_lipschitz)):
        raise ValidationError(f"act_lipschitz must be positive, got {act_lipschitz}")
    return EncoderFamily(
        kind="fnn", widths=widths, width_bound=float(width_bound),
        act_lipschitz=float(act_lipschitz),
    )


@dataclass(frozen=True)
class ComplexityEstimate:
    """Monte Carlo value with its standard error and trial count."""

    value: float
    std_error: float
    trials: int


def gaussian_complexity_images(images, trials: int = 200, seed: int = 0) -> ComplexityEstimate:
    """MC Gaussian complexity of a finite set of encoder images.

    ``images`` is a sequence of (n, d) arrays — one per family member — all
    with the same shape.  Each trial draws one standard-normal xi of size
    n*d from its own sub-seeded stream, so trials can be evaluated in any
    order (or split across workers) without changing the aggregate.
    """
    flats = np.stack([np.asarray(img, dtype=float).ravel() for img in images])
    if flats.ndim != 2 or flats.shape[0] < 1:
        raise ValidationError("images must be a non-empty list of same-shape arrays")
    if trials < 2:
        raise SizeError(f"need >= 2 trials for a standard error, got {trials}")
    sups = np.empty(trials)
    for t in range(trials):
        xi = rng_for(seed, 61, t).standard_normal(flats.shape[1])
        sups[t] = (flats @ xi).max()
    return ComplexityEstimate(
        value=float(sups.mean()),
        std_error=float(sups.std(ddof=1) / np.sqrt(trials)),
        trials=trials,
    )


def gaussian_complexity_mc(
    family: EncoderFamily, X, trials: int = 200, seed: int = 0
) -> ComplexityEstimate:
    """MC Gaussian complexity of a finite grid of linear encoders at inputs X."""
    if family.kind != "finite_grid":
        raise InapplicableError(
            "Monte Carlo needs an explicit finite family; sample one from the "
            "network class first (sample_fnn_grid + gaussian_complexity_images)"
        )
    X = np.asarray(X, dtype=float)
    d_in = family.maps[0].shape[1]
    if X.ndim != 2 or X.shape[1] != d_in:
        raise ValidationError(f"X must be (n, {d_in}) to match the grid maps")
    return gaussian_complexity_images([X @ W.T for W in family.maps], trials, seed)


def fnn_complexity_bound(family: EncoderFamily, X) -> float:
    """Closed-form Gaussian-complexity bound for the network class at X."""
    if family.kind != "fnn":
        raise InapplicableError("the closed-form bound is defined for network families")
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != family.widths[0]:
        raise ValidationError(f"X must be (n, {family.widths[0]}) for this family")
    depth = family.depth
    col_norm = float(np.sqrt((X * X).sum(axis=0)).max())
    return float(
        (2.0 * family.width_bound) ** depth
        * family.act_lipschitz ** (depth - 1)
        * np.sqrt(2.0 * np.log(2.0 * family.widths[0]))
        * col_norm
    )


def sample_fnn_grid(family: EncoderFamily, count: int, seed: int = 0) -> list:
    """Draw ``count`` member networks (weight tuples) from the class.

    Every layer matrix gets uniform(-1, 1) entries with each row rescaled to
    an L1 norm between half the bound and the bound, so membership in the
    (1, infinity) ball is exact by construction.
    """
    if family.kind != "fnn":
        raise InapplicableError("can only sample networks from a network family")
    nets = []
    for g in range(count):
        rng = rng_for(seed, 57, g)
        weights = []
        for i in range(family.depth):
            shape = (family.widths[i + 1], family.widths[i])
            raw = rng.uniform(-1.0, 1.0, size=shape)
            row_l1 = np.abs(raw).sum(axis=1)
            row_l1[row_l1 == 0] = 1.0
            target = family.width_bound * rng.uniform(0.5, 1.0, size=shape[0])
            weights.append(raw * (target / row_l1)[:, None])
        nets.append(tuple(weights))
    return nets


def fnn_apply(weights, X, act_lipschitz: float = 1.0) -> np.ndarray:
    """Forward pass with activation act_lipschitz * max(., 0) between layers."""
    h = np.asarray(X, dtype=float)
    for W in weights[:-1]:
        h = act_lipschitz * np.maximum(h @ W.T, 0.0)
    return h @ weights[-1].T


def deviation_bound(
    n: int, rho0: float, rho1: float, nu: float, lip: float, delta: float, g_mean: float
) -> float:
    """Finite-sample deviation certificate for the squared statistic.

    See module docstring for the two terms.  ``g_mean`` is (an estimate of)
    the expected Gaussian complexity of the encoder family at the stacked
    mixture sample; the bound is increasing in nu, lip, and g_mean, and
    decreasing in n.
    """
    if n < 1:
        raise ValidationError(f"n must be >= 1, got {n}")
    if not (0 < rho0 < 1 and 0 < rho1 < 1 and abs(rho0 + rho1 - 1.0) < 1e-9):
        raise ValidationError(f"rho0, rho1 must be in (0,1) and sum to 1, got {rho0}, {rho1}")
    if not (0 < delta < 1):
        raise ValidationError(f"delta must be in (0, 1), got {delta}")
    if nu <= 0 or lip <= 0 or g_mean < 0:
        raise ValidationError("nu and lip must be positive, g_mean nonnegative")
    term1 = 8.0 * nu * max(1.0 / rho0, 1.0 / rho1) * np.sqrt(np.log(2.0 / delta) / n)
    term2 = (
        (2.0 * np.sqrt(2.0 * np.pi) * lip / n)
        * max((1.0 + 1.0 / rho0) / rho0, (1.0 + 1.0 / rho1) / rho1)
        * g_mean
    )
    return float(term1 + term2)


def suggest_radius(population: PopulationSpec, maps, safety: float = 14.0) -> float:
    """Ball radius covering the encoded samples almost surely.

    Takes the largest cell mean norm plus ``safety`` standard deviations of
    the widest cell direction, scaled by the largest operator norm in the
    encoder grid.  At the default 14 sigma a Gaussian excursion beyond the
    radius has vanishing probability at any realistic sample size, so a
    linear kernel declared with this radius never sees an out-of-domain
    point in practice.
    """
    r_x = 0.0
    for cell in population.cells.values():
        top = float(np.linalg.eigvalsh(cell.cov).max())
        r_x = max(r_x, float(np.linalg.norm(cell.mean)) + safety * np.sqrt(top))
    op = max(float(np.linalg.norm(np.asarray(W, dtype=float), 2)) for W in maps)
    return op * r_x


@dataclass(frozen=True)
class ConcentrationReport:
    """Per-sample-size deviation summaries against the certificate."""

    rows: tuple
    slope: float
    holds: bool
    delta: float
    trials: int

    def as_dict(self) -> dict:
        return {
            "rows": [dict(r) for r in self.rows], "slope": self.slope,
            "holds": self.holds, "delta": self.delta, "trials": self.trials,
        }


def concentration_check(
    population: PopulationSpec,
    grid,
    spec: KernelSpec,
    n_grid,
    trials: int = 100,
    delta: float = 0.05,
    seed: int = 0,
    g_trials: int = 64,
    g_repeats: int = 3,
) -> ConcentrationReport:
    """Empirical test of the deviation certificate on a linear-kernel population.

    For each n in ``n_grid`` (even, >= 8): draw ``trials`` datasets of n
    rows, resample equal mixtures of n/2 rows per group (one resample shared
    by the whole grid), and record the worst absolute gap over the grid
    between the plug-in squared statistic of the encoded mixtures and its
    closed-form population value.  The certificate per n uses rho0 = rho1 =
    1/2 and a small-sample MC estimate of the family's expected Gaussian
    complexity.  ``holds`` says whether the empirical (1 - delta) quantile
    stayed below the bound at every n; ``slope`` is the log-log slope of the
    mean deviation across n.
    """
    if spec.family != "linear":
        raise InapplicableError(
            "the closed-form population statistic used as reference needs a linear kernel"
        )
    family = finite_grid(grid)
    if family.maps[0].shape[1] != population.dim:
        raise ValidationError("grid maps must accept the population's dimension")
    n_grid = [int(n) for n in n_grid]
    if len(n_grid) < 2:
        raise ValidationError("need at least two sample sizes for a slope")
    if any(n < 8 or n % 2 for n in n_grid):
        raise ValidationError(f"sample sizes must be even and >= 8, got {n_grid}")
    w = population.p_y_given_s[0]
    md_x = sum(
        w[y] * (population.cells[(0, y)].mean - population.cells[(1, y)].mean) for y in (0, 1)
    )
    analytic = np.array([float(np.square(W @ md_x).sum()) for W in family.maps])

    rows = []
    for i_n, n in enumerate(n_grid):
        m = n // 2
        devs = np.empty(trials)
        for t in range(trials):
            data = sample_population(population, n, subseed(seed, 1, i_n, t))
            rs = reweight_sample(data, m, m, subseed(seed, 2, i_n, t))
            gaps = [
                abs(mmd2_biased(spec, rs.z0 @ W.T, rs.z1 @ W.T).mmd2 - analytic[j])
                for j, W in enumerate(family.maps)
            ]
            devs[t] = max(gaps)
        g_vals = []
        for j in range(g_repeats):
            data = sample_population(population, n, subseed(seed, 3, i_n, j))
            rs = reweight_sample(data, m, m, subseed(seed, 4, i_n, j))
            stacked = np.vstack([rs.z0, rs.z1])
            images = [stacked @ W.T for W in family.maps]
            g_vals.append(gaussian_complexity_images(images, g_trials, subseed(seed, 5, i_n, j)).value)
        # The true complexity is nonnegative (the sup dominates any single
        # member, whose expectation is zero), so a negative MC mean is noise.
        g_mean = max(float(np.mean(g_vals)), 0.0)
        bound = deviation_bound(n, 0.5, 0.5, spec.nu, spec.lipschitz, delta, g_mean)
        rows.append({
            "n": n,
            "mean_dev": float(devs.mean()),
            "quantile_dev": float(np.quantile(devs, 1.0 - delta)),
            "bound": bound,
            "g_mean": g_mean,
        })
    slope = float(np.polyfit(np.log([r["n"] for r in rows]),
                             np.log([r["mean_dev"] for r in rows]), 1)[0])
    holds = all(r["quantile_dev"] <= r["bound"] for r in rows)
    return ConcentrationReport(
        rows=tuple(rows), slope=slope, holds=bool(holds), delta=delta, trials=trials
    )
