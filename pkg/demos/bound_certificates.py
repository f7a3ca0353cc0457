"""Running the five bound checks and reading their reports.

Each check returns BoundReport rows with the two sides of the inequality,
the slack, and a holds flag.  The equality check only applies when the
group outcome rates match; on rate-imbalanced data the lower-bound and
calibration-chain checks take over.
"""

import numpy as np

from fairmmd import (
    CellGaussian,
    InapplicableError,
    PopulationSpec,
    check_ba_bounds,
    check_biased_lower_bound,
    check_calibration_chain,
    check_tvd_dominance,
    check_unbiased_equality,
    rbf,
    sample_population,
)


def show(report):
    print(f"  {report.name:24s} {report.kind:2s}  lhs={report.lhs:9.6f} "
          f"rhs={report.rhs:9.6f}  slack={report.slack:+.2e}  "
          f"holds={report.holds}")


cells = {
    (0, 0): CellGaussian(np.array([0.0, 0.0]), 0.25 * np.eye(2)),
    (0, 1): CellGaussian(np.array([1.4, 0.1]), 0.25 * np.eye(2)),
    (1, 0): CellGaussian(np.array([0.5, 0.7]), 0.25 * np.eye(2)),
    (1, 1): CellGaussian(np.array([1.8, 0.6]), 0.25 * np.eye(2)),
}
matched = PopulationSpec(0.5, np.array([[0.5, 0.5], [0.5, 0.5]]), cells)
skewed = PopulationSpec(0.5, np.array([[0.7, 0.3], [0.35, 0.65]]), cells)

k = rbf(1.0)

# --- matched outcome rates: the statistic IS the group discrepancy -------
data = sample_population(matched, n=4000, seed=31)
print("matched rates (n=4000):")
show(check_unbiased_equality(k, data, tol=0.02, rate_threshold=0.05))

# --- skewed rates: equality refuses, the floor and chain apply -----------
data = sample_population(skewed, n=4000, seed=31)
print("skewed rates (n=4000):")
try:
    check_unbiased_equality(k, data)
except InapplicableError as exc:
    print(f"  equality check refuses: {exc}")

show(check_biased_lower_bound(k, data, tol=0.03))

upper, lower = check_ba_bounds(k, data, trials=40, seed=2)
show(upper)
show(lower)

clause_a, clause_b = check_calibration_chain(k, data, tol=0.05)
show(clause_a)
show(clause_b)

# --- tvd dominance needs a small discrete support ------------------------
atoms = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
rng = np.random.default_rng(8)
idx = rng.integers(0, 4, size=800)
from fairmmd import LabeledDataset

disc = LabeledDataset(z=atoms[idx],
                      s=rng.integers(0, 2, size=800),
                      y=rng.integers(0, 2, size=800))
print("discrete support (4 atoms):")
show(check_tvd_dominance(k, disc))
