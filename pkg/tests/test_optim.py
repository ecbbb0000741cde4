import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import minimize

from zicap.optim import (
    SearchConfig,
    block_ascent,
    child_rng,
    default_lambda_grid,
    direction,
    maximize_concave_simplex,
    project_simplex,
)


def projection_oracle(v):
    """Projection onto the simplex by a generic constrained solver."""
    d = len(v)
    res = minimize(lambda x: 0.5 * np.sum((x - v) ** 2), np.full(d, 1 / d),
                   jac=lambda x: x - v, bounds=[(0, 1)] * d,
                   constraints=[{"type": "eq", "fun": lambda x: x.sum() - 1}],
                   method="SLSQP", options={"ftol": 1e-14, "maxiter": 500})
    return res.x


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-3, 3), min_size=2, max_size=6))
def test_projection_matches_solver(v):
    v = np.array(v)
    p = project_simplex(v)
    assert p.min() >= 0 and p.sum() == pytest.approx(1.0)
    assert np.allclose(p, projection_oracle(v), atol=1e-6)


def test_projection_batched_and_fixed_points():
    rng = np.random.default_rng(0)
    x = rng.dirichlet(np.ones(4), size=5)
    assert np.allclose(project_simplex(x), x)
    v = rng.normal(size=(7, 3))
    rows = np.stack([project_simplex(r) for r in v])
    assert np.array_equal(project_simplex(v), rows)


def test_lambda_grid():
    g = default_lambda_grid(33)
    assert len(g) == 35 and g[0] == 0.0 and math.isinf(g[-1])
    assert all(a < b for a, b in zip(g, g[1:]))
    assert direction(math.inf) == (0.0, 1.0)
    assert np.allclose(direction(1.0), (2 ** -0.5, 2 ** -0.5))


@pytest.mark.parametrize("kw", [dict(restarts=0), dict(max_iters=0), dict(q_card=5),
                                dict(u_card=0), dict(lambda_grid=[]),
                                dict(lambda_grid=[-1.0])])
def test_config_validation(kw):
    with pytest.raises(ValueError):
        SearchConfig(**kw)


def test_child_rng_independent_of_order():
    a = child_rng(7, 3, 1).random(4)
    child_rng(7, 0, 0).random(100)
    assert np.array_equal(a, child_rng(7, 3, 1).random(4))
    assert not np.array_equal(a, child_rng(7, 1, 3).random(4))


def test_block_ascent_concave_optimum():
    # maximize -|x - a|^2 - |y - b|^2 over two simplices; optimum is (a, b)
    a = np.array([0.2, 0.3, 0.5])
    b = np.array([0.7, 0.3])

    def f(bl, idx):
        return -((bl[0] - a) ** 2).sum(1) - ((bl[1] - b) ** 2).sum(1)

    rng = np.random.default_rng(1)
    blocks = [rng.dirichlet(np.ones(3), size=4), rng.dirichlet(np.ones(2), size=4)]
    out, vals, sweeps = block_ascent(f, blocks, max_iters=200, step_tol=1e-14)
    assert np.allclose(out[0], a, atol=1e-6)
    assert np.allclose(out[1], b, atol=1e-6)
    assert np.all(vals > -1e-10)


def test_block_ascent_rows_independent():
    c = np.array([[0.1, 0.9], [0.6, 0.4], [0.5, 0.5]])

    def f(bl, idx):
        return -((bl[0] - c[idx]) ** 2).sum(1)

    start = np.array([[0.5, 0.5], [0.9, 0.1], [0.2, 0.8]])
    full, _, _ = block_ascent(f, [start], max_iters=50)
    for i in range(3):
        one, _, _ = block_ascent(lambda bl, idx: f(bl, idx + i), [start[i:i + 1]], max_iters=50)
        assert np.array_equal(one[0][0], full[0][i])


def test_maximize_concave_entropy():
    def vg(x):
        xs = np.clip(x, 1e-300, None)
        return float(-(x * np.log2(xs)).sum()), -np.log2(xs) - 1 / math.log(2)

    x, val = maximize_concave_simplex(vg, np.array([0.9, 0.05, 0.05]))
    assert val == pytest.approx(math.log2(3), abs=1e-8)
