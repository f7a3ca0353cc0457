import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from fairmmd import (
    CellGaussian,
    LabeledDataset,
    NormalizationError,
    PopulationSpec,
    ValidationError,
    analytic_eok2_linear,
    analytic_mmd2_rbf_gaussians,
    population_from_dict,
    population_to_dict,
    read_csv,
    sample_population,
    write_csv,
)
from conftest import make_population


def test_cell_gaussian_rejects_non_spd():
    with pytest.raises(ValidationError):
        CellGaussian([0.0, 0.0], [[1.0, 2.0], [2.0, 1.0]])  # eigenvalue -1
    with pytest.raises(ValidationError):
        CellGaussian([0.0], [[0.0]])


def test_population_validation():
    cells = {c: CellGaussian([0.0], [[1.0]]) for c in ((0, 0), (0, 1), (1, 0), (1, 1))}
    with pytest.raises(ValidationError):
        PopulationSpec(0.0, [[0.5, 0.5], [0.5, 0.5]], cells)
    with pytest.raises(NormalizationError):
        PopulationSpec(0.5, [[0.6, 0.5], [0.5, 0.5]], cells)
    bad = dict(cells)
    bad[(1, 1)] = CellGaussian([0.0, 0.0], np.eye(2))  # dim mismatch
    with pytest.raises(ValidationError):
        PopulationSpec(0.5, [[0.5, 0.5], [0.5, 0.5]], bad)
    missing = {c: cells[c] for c in ((0, 0), (0, 1), (1, 0))}
    with pytest.raises(ValidationError):
        PopulationSpec(0.5, [[0.5, 0.5], [0.5, 0.5]], missing)


def test_labeled_dataset_validation():
    z = np.zeros((4, 2))
    with pytest.raises(ValidationError):
        LabeledDataset(z=z, s=np.array([0, 1, 2, 0]), y=np.zeros(4, dtype=int))
    with pytest.raises(ValidationError):
        LabeledDataset(z=z, s=np.zeros(3, dtype=int), y=np.zeros(4, dtype=int))
    with pytest.raises(ValidationError):
        LabeledDataset(z=np.array([[np.nan, 0.0]]), s=np.array([0]), y=np.array([0]))


def test_sampling_is_deterministic(unbiased_pop):
    a = sample_population(unbiased_pop, 100, seed=4)
    b = sample_population(unbiased_pop, 100, seed=4)
    assert_array_equal(a.z, b.z)
    assert_array_equal(a.s, b.s)
    assert_array_equal(a.y, b.y)
    c = sample_population(unbiased_pop, 100, seed=5)
    assert not np.array_equal(a.z, c.z)


def test_sampling_matches_population_law():
    """Group shares, conditional outcome rates, and cell means should all
    settle near their population values at moderate n."""
    pop = make_population(pi_s=0.35, p=((0.8, 0.2), (0.4, 0.6)))
    data = sample_population(pop, 20000, seed=0)
    assert abs(data.s.mean() - 0.35) < 0.02
    p1_s0 = data.y[data.s == 0].mean()
    p1_s1 = data.y[data.s == 1].mean()
    assert abs(p1_s0 - 0.2) < 0.02
    assert abs(p1_s1 - 0.6) < 0.02
    for (s, y), cell in pop.cells.items():
        rows = data.z[(data.s == s) & (data.y == y)]
        assert_allclose(rows.mean(axis=0), cell.mean, atol=0.08)


def test_analytic_eok2_linear_hand_value():
    """Linear-kernel discrepancy of the reweighted mixtures is the squared
    norm of the weighted cell-mean difference, with weights taken from the
    S=0 conditional row for both groups."""
    pop = make_population(
        p=((0.3, 0.7), (0.5, 0.5)),
        means={(0, 0): [1.0, 0.0], (0, 1): [0.0, 2.0],
               (1, 0): [0.0, 0.0], (1, 1): [1.0, 1.0]},
    )
    md = 0.3 * (np.array([1.0, 0.0]) - np.array([0.0, 0.0])) \
        + 0.7 * (np.array([0.0, 2.0]) - np.array([1.0, 1.0]))
    assert_allclose(analytic_eok2_linear(pop), float(md @ md), rtol=1e-12)


def test_analytic_eok2_zero_when_groups_coincide():
    means = {(0, 0): [0.3, -0.2], (0, 1): [1.0, 0.4],
             (1, 0): [0.3, -0.2], (1, 1): [1.0, 0.4]}
    pop = make_population(means=means)
    assert analytic_eok2_linear(pop) == pytest.approx(0.0, abs=1e-15)


def test_analytic_rbf_mmd_near_delta_limit():
    """With nearly point-mass cells the closed form approaches the two-point
    formula 2 (1 - exp(-||d||^2 / (2 sigma^2)))."""
    eps = 1e-10
    g1 = CellGaussian([0.0, 0.0], eps * np.eye(2))
    g2 = CellGaussian([1.0, 0.0], eps * np.eye(2))
    expected = 2.0 * (1.0 - np.exp(-1.0 / 2.0))
    got = analytic_mmd2_rbf_gaussians(g1, g2, sigma=1.0)
    assert_allclose(got, expected, rtol=1e-6)
    assert_allclose(got, 0.7869386805747332, rtol=1e-6)


def test_analytic_rbf_mmd_identical_is_zero():
    g = CellGaussian([0.5, -0.5], 0.3 * np.eye(2))
    assert analytic_mmd2_rbf_gaussians(g, g, sigma=0.9) == pytest.approx(0.0, abs=1e-12)


def test_analytic_rbf_mmd_monte_carlo_agreement():
    """The closed form should match a direct plug-in estimate on large
    Gaussian samples."""
    from fairmmd import mmd2_biased, rbf

    g1 = CellGaussian([0.0, 0.0], 0.4 * np.eye(2))
    g2 = CellGaussian([1.2, -0.3], np.array([[0.5, 0.1], [0.1, 0.3]]))
    truth = analytic_mmd2_rbf_gaussians(g1, g2, sigma=1.1)
    rng = np.random.default_rng(12)
    n = 4000
    A = rng.multivariate_normal(g1.mean, g1.cov, size=n)
    B = rng.multivariate_normal(g2.mean, g2.cov, size=n)
    est = mmd2_biased(rbf(1.1), A, B).mmd2
    assert abs(est - truth) < 0.01


def test_csv_round_trip_bit_exact(tmp_path, small_data):
    path = tmp_path / "d.csv"
    write_csv(small_data, path)
    back, scores = read_csv(path)
    assert scores is None
    assert_array_equal(back.z, small_data.z)
    assert_array_equal(back.s, small_data.s)
    assert_array_equal(back.y, small_data.y)


def test_csv_round_trip_with_scores(tmp_path, small_data):
    rng = np.random.default_rng(3)
    scores = rng.uniform(size=small_data.n)
    path = tmp_path / "d.csv"
    write_csv(small_data, path, scores=scores)
    back, got = read_csv(path)
    assert_array_equal(got, scores)
    header = path.read_text().splitlines()[0]
    assert header == "z_0,z_1,s,y,score"


def test_csv_rejects_bad_labels(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("z_0,s,y\n0.1,2,0\n")
    with pytest.raises(ValidationError):
        read_csv(path)


def test_csv_rejects_out_of_range_scores(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("z_0,s,y,score\n0.1,0,0,1.5\n")
    with pytest.raises(ValidationError):
        read_csv(path)


def test_population_dict_round_trip(biased_pop):
    d = population_to_dict(biased_pop)
    back = population_from_dict(d)
    assert back.pi_s == biased_pop.pi_s
    assert_allclose(back.p_y_given_s, biased_pop.p_y_given_s)
    for cell in biased_pop.cells:
        assert_allclose(back.cells[cell].mean, biased_pop.cells[cell].mean)
        assert_allclose(back.cells[cell].cov, biased_pop.cells[cell].cov)
    # dict form is JSON-serializable as-is
    import json

    json.dumps(d)
