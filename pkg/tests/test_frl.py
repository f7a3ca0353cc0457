import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from fairmmd import (
    TrainConfig,
    TrainingError,
    ValidationError,
    empirical_weights,
    lambda_sweep,
    objective_gradient,
    rbf,
    sample_population,
    train,
)
from fairmmd.frl import _stratified_batch
from fairmmd._rng import rng_for
from conftest import make_population


def _cfg(**kw):
    base = dict(kernel=rbf(1.0), lam=1.0, steps=30, step_size=0.5,
                encoder_dim=2, seed=0, init_scale=0.1)
    base.update(kw)
    return TrainConfig(**base)


def test_config_validation():
    with pytest.raises(ValidationError):
        _cfg(steps=0)
    with pytest.raises(ValidationError):
        _cfg(step_size=0.0)
    with pytest.raises(ValidationError):
        _cfg(lam=-0.5)
    with pytest.raises(ValidationError):
        _cfg(batch=4)  # below the stratification minimum
    with pytest.raises(ValidationError):
        _cfg(encoder_dim=0)


def test_objective_gradient_matches_finite_differences(unbiased_pop):
    """Analytic gradients of the full objective (cross-entropy plus penalty)
    against central differences, all three parameter blocks."""
    data = sample_population(unbiased_pop, 60, seed=1)
    cfg = _cfg(lam=2.0)
    rng = np.random.default_rng(2)
    W = rng.normal(scale=0.3, size=(2, 2))
    w = rng.normal(size=2)
    b = 0.2
    ev = objective_gradient(data, W, w, b, cfg)
    eps = 1e-6

    fd_W = np.zeros_like(W)
    for i in range(2):
        for j in range(2):
            Wp, Wm = W.copy(), W.copy()
            Wp[i, j] += eps
            Wm[i, j] -= eps
            fd_W[i, j] = (
                objective_gradient(data, Wp, w, b, cfg).total
                - objective_gradient(data, Wm, w, b, cfg).total
            ) / (2 * eps)
    assert_allclose(ev.d_encoder, fd_W, rtol=2e-5, atol=1e-9)

    fd_w = np.zeros_like(w)
    for i in range(2):
        wp, wm = w.copy(), w.copy()
        wp[i] += eps
        wm[i] -= eps
        fd_w[i] = (
            objective_gradient(data, W, wp, b, cfg).total
            - objective_gradient(data, W, wm, b, cfg).total
        ) / (2 * eps)
    assert_allclose(ev.d_head_w, fd_w, rtol=2e-5, atol=1e-9)

    fd_b = (
        objective_gradient(data, W, w, b + eps, cfg).total
        - objective_gradient(data, W, w, b - eps, cfg).total
    ) / (2 * eps)
    assert_allclose(ev.d_head_b, fd_b, rtol=2e-5, atol=1e-9)


def test_objective_total_identity(unbiased_pop):
    data = sample_population(unbiased_pop, 80, seed=3)
    cfg = _cfg(lam=3.5)
    ev = objective_gradient(data, 0.1 * np.eye(2), np.ones(2), 0.0, cfg)
    assert_allclose(ev.total, ev.sup + 3.5 * ev.penalty, rtol=1e-14)
    # lam = 0 still reports the penalty value, it just stops driving updates
    ev0 = objective_gradient(data, 0.1 * np.eye(2), np.ones(2), 0.0, _cfg(lam=0.0))
    assert ev0.penalty > 0.0
    assert_allclose(ev0.total, ev0.sup, rtol=1e-14)


def test_train_is_deterministic(unbiased_pop):
    data = sample_population(unbiased_pop, 120, seed=4)
    a = train(data, _cfg(steps=15))
    b = train(data, _cfg(steps=15))
    assert_array_equal(a.encoder, b.encoder)
    assert_array_equal(a.head_w, b.head_w)
    assert a.head_b == b.head_b
    assert_array_equal(a.total_trace, b.total_trace)
    c = train(data, _cfg(steps=15, seed=1))
    assert not np.array_equal(a.encoder, c.encoder)


def test_trace_identity_and_length(unbiased_pop):
    data = sample_population(unbiased_pop, 100, seed=5)
    res = train(data, _cfg(steps=25, lam=1.7))
    assert len(res.sup_trace) == len(res.penalty_trace) == len(res.total_trace) == 25
    assert_allclose(res.total_trace, res.sup_trace + 1.7 * res.penalty_trace, rtol=1e-12)
    assert_allclose(res.weights, empirical_weights(data))


def test_training_reduces_objective(unbiased_pop):
    data = sample_population(unbiased_pop, 200, seed=6)
    # the large init scale starts the encoder with substantial group
    # discrepancy, so the penalty has real work to do regardless of the draw
    res = train(data, _cfg(steps=80, lam=1.0, step_size=0.5, init_scale=1.0))
    assert res.total_trace[-1] < res.total_trace[0]
    assert res.penalty_trace[-1] < 0.5 * res.penalty_trace[0]


def test_penalty_changes_the_fit(unbiased_pop):
    """Heavier penalty weight must yield a smaller final penalty than an
    unpenalized run of the same length."""
    data = sample_population(unbiased_pop, 250, seed=7)
    free = train(data, _cfg(steps=60, lam=0.0))
    tight = train(data, _cfg(steps=60, lam=8.0))
    assert tight.penalty_trace[-1] < free.penalty_trace[-1]


def test_minibatch_training_runs(unbiased_pop):
    data = sample_population(unbiased_pop, 300, seed=8)
    res = train(data, _cfg(steps=20, batch=64))
    assert np.all(np.isfinite(res.total_trace))


def test_stratified_batch_covers_cells(unbiased_pop):
    data = sample_population(unbiased_pop, 400, seed=9)
    rng = rng_for(0, 99)
    batch = _stratified_batch(data, 40, rng)
    for s in (0, 1):
        for y in (0, 1):
            assert ((batch.s == s) & (batch.y == y)).any()
    assert abs(batch.n - 40) <= 4  # rounding may move a row or two


def test_divergence_raises_training_error(unbiased_pop):
    data = sample_population(unbiased_pop, 80, seed=10)
    with pytest.raises(TrainingError) as exc:
        with np.errstate(all="ignore"):
            train(data, _cfg(steps=8, step_size=1e160))
    assert exc.value.step is not None


def test_lambda_sweep_shape_and_frontier():
    pop = make_population(p=((0.6, 0.4), (0.4, 0.6)))
    cfg = _cfg(steps=120, step_size=0.5)
    res = lambda_sweep(pop, [0.0, 1.0, 6.0], cfg, n=400, seed=11)
    assert list(res.lambdas) == [0.0, 1.0, 6.0]
    assert len(res.rows) == 3
    expected_cols = {"lambda", "accuracy", "balanced_accuracy", "dp", "dodds",
                     "dc", "eok2", "sup_dp", "beta_hat"}
    for row in res.rows:
        assert set(row) == expected_cols
    eok2 = [row["eok2"] for row in res.rows]
    assert eok2[-1] < eok2[0]  # the penalty bites
    d = res.as_dict()
    assert d["lambdas"] == [0.0, 1.0, 6.0]


def test_lambda_sweep_needs_lambdas(unbiased_pop):
    with pytest.raises(ValidationError):
        lambda_sweep(unbiased_pop, [], _cfg(), n=200)
