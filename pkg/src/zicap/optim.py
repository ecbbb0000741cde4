"""Simplex-constrained multistart optimization.

The searches here are small (tens of parameters) but run many times, so the
optimizer works on batches: every row of a batch is an independent start, and
each row's trajectory depends only on that row. That keeps results identical
no matter how many other starts share the batch.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np


def default_lambda_grid(n: int = 33) -> list[float]:
    """Weights ``tan(theta)`` for ``n`` angles uniform in (0, pi/2), plus both axes.

    ``0.0`` is the pure-R1 direction and ``inf`` the pure-R2 direction.
    """
    thetas = [(k + 1) * (math.pi / 2) / (n + 1) for k in range(n)]
    return [0.0] + [math.tan(t) for t in thetas] + [math.inf]


def direction(lam: float) -> tuple[float, float]:
    """Unit weight vector proportional to ``(1, lam)``."""
    if math.isinf(lam):
        return 0.0, 1.0
    norm = math.hypot(1.0, lam)
    return 1.0 / norm, lam / norm


@dataclass
class SearchConfig:
    """Effort and reproducibility knobs shared by all searches.

    ``q_card`` and ``u_card`` left as ``None`` are filled in per bound kind.
    """

    seed: int = 0
    restarts: int = 8
    lambda_grid: list = field(default_factory=default_lambda_grid)
    max_iters: int = 300
    step_tol: float = 1e-9
    q_card: int | None = None
    u_card: int | None = None

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.q_card is not None and not 1 <= self.q_card <= 4:
            raise ValueError("q_card must lie in [1, 4]")
        if self.u_card is not None and self.u_card < 1:
            raise ValueError("u_card must be >= 1")
        if not self.lambda_grid:
            raise ValueError("lambda_grid must be non-empty")
        if any(lam < 0 or math.isnan(lam) for lam in self.lambda_grid):
            raise ValueError("lambda weights must be non-negative")
        self.seed = int(self.seed)

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "restarts": self.restarts,
            "lambda_grid": [("inf" if math.isinf(x) else x) for x in self.lambda_grid],
            "max_iters": self.max_iters,
            "step_tol": self.step_tol,
            "q_card": self.q_card,
            "u_card": self.u_card,
        }


def child_rng(seed: int, *keys: int) -> np.random.Generator:
    """Generator for one cell of a multistart grid, independent of all other cells."""
    return np.random.default_rng(np.random.SeedSequence([int(seed) & (2**64 - 1), *keys]))


def project_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection of each row (last axis) onto the probability simplex."""
    v = np.asarray(v, dtype=float)
    d = v.shape[-1]
    u = -np.sort(-v, axis=-1)
    css = np.cumsum(u, axis=-1) - 1.0
    ks = np.arange(1, d + 1)
    cond = u - css / ks > 0
    rho = d - 1 - np.argmax(cond[..., ::-1], axis=-1)
    theta = np.take_along_axis(css, rho[..., None], axis=-1) / (rho[..., None] + 1)
    return np.maximum(v - theta, 0.0)


def _renormalize(x: np.ndarray) -> np.ndarray:
    x = np.maximum(x, 0.0)
    return x / x.sum(axis=-1, keepdims=True)


Objective = Callable[[Sequence[np.ndarray], np.ndarray], np.ndarray]


def block_ascent(f: Objective, blocks: Sequence[np.ndarray], max_iters: int = 300,
                 step_tol: float = 1e-9, h: float = 1e-6, max_halvings: int = 50):
    """Batched projected-gradient block-coordinate ascent on products of simplices.

    ``blocks[k]`` has shape ``(B, d_k)``; row ``b`` of every block together is one
    point. ``f(blocks, rows)`` maps a (sub)batch to its values; ``rows`` holds the
    original row index of each entry so ``f`` can apply per-row settings. ``f``
    only ever sees blocks clipped and renormalized onto the simplex.
    Gradients are central differences with step ``h``; steps are projected back
    onto the simplex and accepted only if they strictly improve the objective.
    A row stops once a full sweep over the blocks gains no more than ``step_tol``.

    Returns ``(blocks, values, sweeps)``.
    """
    blocks = [np.array(b, dtype=float) for b in blocks]
    B = blocks[0].shape[0]
    K = len(blocks)

    def fe(bl, idx):
        return f([_renormalize(b) for b in bl], idx)

    values = fe(blocks, np.arange(B))
    steps = np.ones((B, K))
    active = np.ones(B, dtype=bool)
    sweeps = np.zeros(B, dtype=int)
    for _ in range(max_iters):
        rows = np.flatnonzero(active)
        if rows.size == 0:
            break
        start = values[rows].copy()
        for k in range(K):
            d = blocks[k].shape[1]
            if d == 1:
                continue
            R = rows.size
            # central-difference gradient of block k, all active rows at once
            pert = np.repeat(blocks[k][rows][:, None, :], 2 * d, axis=1)
            eye = np.eye(d) * h
            pert[:, :d, :] += eye
            pert[:, d:, :] -= eye
            batch = []
            for j, b in enumerate(blocks):
                if j == k:
                    batch.append(pert.reshape(R * 2 * d, d))
                else:
                    batch.append(np.repeat(b[rows], 2 * d, axis=0))
            fv = fe(batch, np.repeat(rows, 2 * d)).reshape(R, 2 * d)
            grad = (fv[:, :d] - fv[:, d:]) / (2 * h)
            grad -= grad.mean(axis=1, keepdims=True)
            pending = np.arange(R)
            for _ in range(max_halvings):
                if pending.size == 0:
                    break
                r = rows[pending]
                s = steps[r, k][:, None]
                cand = project_simplex(blocks[k][r] + s * grad[pending])
                trial_blocks = [b[r] for b in blocks]
                trial_blocks[k] = cand
                tv = fe(trial_blocks, r)
                ok = tv > values[r]
                acc = r[ok]
                blocks[k][acc] = cand[ok]
                values[acc] = tv[ok]
                steps[acc, k] = np.minimum(steps[acc, k] * 2.0, 1e3)
                rej = r[~ok]
                steps[rej, k] *= 0.5
                pending = pending[~ok]
                # rows whose step underflowed are left where they are
                tiny = steps[rows[pending], k] < 1e-14
                if np.any(tiny):
                    steps[rows[pending[tiny]], k] = 1e-14
                    pending = pending[~tiny]
            if pending.size:
                steps[rows[pending], k] = np.maximum(steps[rows[pending], k], 1e-14)
        sweeps[rows] += 1
        gain = values[rows] - start
        active[rows[gain <= step_tol]] = False
    return [_renormalize(b) for b in blocks], values, sweeps


def maximize_concave_simplex(value_grad: Callable[[np.ndarray], tuple[float, np.ndarray]],
                             x0: np.ndarray, grad_tol: float = 1e-9, max_iters: int = 5000):
    """Projected gradient ascent with backtracking for a concave function on a simplex.

    Stops when the projected-gradient mapping ``(P(x + s g) - x) / s`` has norm
    at most ``grad_tol``.
    """
    x = project_simplex(np.asarray(x0, dtype=float))
    val, g = value_grad(x)
    s = 1.0
    for _ in range(max_iters):
        while True:
            cand = project_simplex(x + s * g)
            cval, cg = value_grad(cand)
            if cval >= val - 1e-15 or s < 1e-14:
                break
            s *= 0.5
        step = np.linalg.norm(cand - x) / s
        improved = cval > val
        if improved:
            x, val, g = cand, cval, cg
            s = min(s * 2.0, 1e3)
        if step <= grad_tol or not improved:
            break
    return x, val
