import numpy as np
import pytest
from numpy.testing import assert_allclose

from fairmmd import (
    DomainError,
    ValidationError,
    eval_kernel,
    gram,
    kernel_sum,
    laplacian,
    linear,
    lipschitz_constant,
    median_heuristic,
    pairwise,
    product,
    rbf,
)


def _naive_rbf(a, b, sigma):
    return np.exp(-np.sum((a - b) ** 2) / (2.0 * sigma**2))


def _naive_laplacian(a, b, sigma):
    return np.exp(-np.sum(np.abs(a - b)) / sigma)


def test_rbf_matches_pointwise_formula():
    rng = np.random.default_rng(0)
    A = rng.normal(size=(7, 3))
    B = rng.normal(size=(5, 3))
    K = pairwise(rbf(0.8), A, B)
    for i in range(7):
        for j in range(5):
            assert_allclose(K[i, j], _naive_rbf(A[i], B[j], 0.8), rtol=1e-12)


def test_laplacian_matches_pointwise_formula():
    rng = np.random.default_rng(1)
    A = rng.normal(size=(6, 2))
    B = rng.normal(size=(6, 2))
    K = pairwise(laplacian(1.3), A, B)
    for i in range(6):
        for j in range(6):
            assert_allclose(K[i, j], _naive_laplacian(A[i], B[j], 1.3), rtol=1e-12)


def test_linear_is_dot_product():
    rng = np.random.default_rng(2)
    A = rng.normal(size=(4, 3))
    K = pairwise(linear(10.0), A, A)
    assert_allclose(K, A @ A.T, rtol=1e-14)


def test_gram_psd_all_families():
    """Gram matrices must be positive semidefinite for every family,
    including composites."""
    rng = np.random.default_rng(3)
    specs = [
        rbf(0.7),
        laplacian(1.1),
        linear(20.0),
        kernel_sum(rbf(0.5), linear(20.0)),
        product(rbf(0.9), laplacian(0.6), split=2),
    ]
    for trial in range(20):
        X = rng.normal(size=(12, 4))
        for spec in specs:
            K = pairwise(spec, X, X)
            evals = np.linalg.eigvalsh((K + K.T) / 2.0)
            assert evals.min() >= -1e-9, (spec.family, trial, evals.min())


def test_symmetry_and_diagonal():
    rng = np.random.default_rng(4)
    X = rng.normal(size=(9, 3))
    for spec in (rbf(1.0), laplacian(2.0)):
        K = pairwise(spec, X, X)
        assert_allclose(K, K.T, atol=1e-15)
        assert_allclose(np.diag(K), 1.0, atol=1e-15)
    K = pairwise(linear(50.0), X, X)
    assert_allclose(np.diag(K), np.sum(X * X, axis=1), rtol=1e-14)


def test_amplitude_constants():
    assert rbf(0.5).nu == 1.0
    assert laplacian(2.0).nu == 1.0
    assert linear(3.0).nu == 9.0
    assert kernel_sum(rbf(1.0), linear(2.0)).nu == 5.0
    assert product(linear(2.0), rbf(1.0), split=1).nu == 4.0


def test_kernel_values_never_exceed_amplitude():
    rng = np.random.default_rng(5)
    for trial in range(30):
        X = rng.uniform(-1.0, 1.0, size=(10, 3))
        for spec in (rbf(0.6), laplacian(0.9), linear(np.sqrt(3.0)),
                     kernel_sum(rbf(1.0), linear(np.sqrt(3.0)))):
            K = pairwise(spec, X, X)
            assert K.max() <= spec.nu + 1e-12


def test_lipschitz_constants_documented_values():
    assert_allclose(rbf(2.0).lipschitz, np.exp(-0.5) / 2.0, rtol=1e-15)
    assert_allclose(laplacian(4.0).lipschitz, 0.25, rtol=1e-15)
    assert_allclose(linear(3.0).lipschitz, 3.0, rtol=1e-15)
    s = kernel_sum(rbf(1.0), linear(2.0))
    assert_allclose(s.lipschitz, np.exp(-0.5) + 2.0, rtol=1e-15)
    p = product(linear(2.0), rbf(1.0), split=1)
    # l = l1 * nu2 + l2 * nu1 with nu1 = 4, nu2 = 1
    assert_allclose(p.lipschitz, 2.0 * 1.0 + np.exp(-0.5) * 4.0, rtol=1e-15)
    assert lipschitz_constant(p) == p.lipschitz


def test_kernel_function_lipschitz_property():
    """|k(x, z) - k(y, z)| <= L * dist(x, y): the stored constant bounds the
    slope of the kernel in its first argument (laplacian in the L1 metric,
    the others in L2)."""
    rng = np.random.default_rng(6)
    for trial in range(50):
        x, y, z = rng.uniform(-1.0, 1.0, size=(3, 3))
        for spec in (rbf(0.7), laplacian(1.2), linear(np.sqrt(3.0))):
            gap = abs(eval_kernel(spec, x, z) - eval_kernel(spec, y, z))
            dist = (np.abs(x - y).sum() if spec.family == "laplacian"
                    else np.linalg.norm(x - y))
            assert gap <= spec.lipschitz * dist + 1e-9


def test_product_splits_coordinates():
    rng = np.random.default_rng(7)
    u = rng.normal(size=(5, 2))
    v = rng.normal(size=(5, 3))
    X = np.hstack([u, v])
    spec = product(rbf(0.8), laplacian(1.5), split=2)
    K = pairwise(spec, X, X)
    expected = pairwise(rbf(0.8), u, u) * pairwise(laplacian(1.5), v, v)
    assert_allclose(K, expected, rtol=1e-13)


def test_sum_adds_values():
    rng = np.random.default_rng(8)
    X = rng.uniform(-0.5, 0.5, size=(6, 2))
    spec = kernel_sum(linear(1.0), rbf(0.4))
    assert_allclose(
        pairwise(spec, X, X),
        pairwise(linear(1.0), X, X) + pairwise(rbf(0.4), X, X),
        rtol=1e-13,
    )


def test_gram_carries_spec():
    X = np.zeros((3, 2))
    g = gram(rbf(1.0), X)
    assert g.values.shape == (3, 3)
    assert g.spec.family == "rbf"


def test_eval_kernel_scalar():
    v = eval_kernel(rbf(1.0), [0.0, 0.0], [1.0, 0.0])
    assert isinstance(v, float)
    assert_allclose(v, np.exp(-0.5), rtol=1e-14)


def test_linear_enforces_ball_domain():
    spec = linear(1.0)
    inside = np.array([[0.5, 0.5]]) / np.sqrt(2.0)
    pairwise(spec, inside, inside)  # fine
    with pytest.raises(DomainError):
        pairwise(spec, np.array([[2.0, 0.0]]), inside)


def test_product_checks_split_bounds():
    with pytest.raises(ValidationError):
        product(rbf(1.0), rbf(1.0), split=0)
    spec = product(rbf(1.0), rbf(1.0), split=3)
    with pytest.raises(ValidationError):
        pairwise(spec, np.zeros((2, 3)), np.zeros((2, 3)))


@pytest.mark.parametrize("bad", [0.0, -1.0, np.nan])
def test_bandwidth_must_be_positive(bad):
    with pytest.raises(ValidationError):
        rbf(bad)
    with pytest.raises(ValidationError):
        laplacian(bad)


def test_radius_must_be_positive():
    with pytest.raises(ValidationError):
        linear(0.0)


def test_shape_validation():
    with pytest.raises(ValidationError):
        pairwise(rbf(1.0), np.zeros((2, 2)), np.zeros((2, 3)))
    with pytest.raises(ValidationError):
        pairwise(rbf(1.0), np.zeros((0, 2)), np.zeros((2, 2)))
    with pytest.raises(ValidationError):
        pairwise(rbf(1.0), np.array([[np.inf, 0.0]]), np.zeros((1, 2)))


def test_median_heuristic_small_oracle():
    # three points on a line: pairwise distances 1, 1, 2 -> median 1
    X = np.array([[0.0], [1.0], [2.0]])
    assert_allclose(median_heuristic(X), 1.0, rtol=1e-12)


def test_median_heuristic_subsampling_is_seeded():
    rng = np.random.default_rng(9)
    X = rng.normal(size=(3000, 2))
    a = median_heuristic(X, cap=500, seed=3)
    b = median_heuristic(X, cap=500, seed=3)
    assert a == b and a > 0.0
