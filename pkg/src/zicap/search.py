"""Frontier tracing, sum-rate maximization and capacity-point hunting.

Unions of per-law regions are traced by support-function maximization: for each
weight ``lam`` in the grid, maximize ``max{R1 + lam R2}`` over the region at a
law, with multistart projected-gradient block-coordinate ascent over the
simplex factors of that law. Every final law of every ``(lam, restart)`` cell
contributes its pentagon to the union, so more restarts can only enlarge the
traced region.
"""
from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _batch
from .channels import ConditionReport, ZChannel, check_condition1, check_conditions
from .info import ProbVector
from .optim import SearchConfig, block_ascent, child_rng, direction
from .regions import (
    AuxInput,
    BoundKind,
    CornerRegion,
    RatePair,
    convex_hull,
    corner_point_A,
    union_frontier,
)

log = logging.getLogger(__name__)

__all__ = [
    "SearchConfig",
    "SumCapacityReport",
    "PreconditionError",
    "trace_frontier",
    "max_sum_rate",
    "find_capacity_points",
]


class PreconditionError(RuntimeError):
    """A bound was requested for a channel that does not meet its conditions."""


def resolve_cards(zc: ZChannel, kind: BoundKind, cfg: SearchConfig) -> tuple[int, int]:
    """``(q_card, u_card)`` for a bound kind, defaults filled in and limits checked."""
    kind = BoundKind(kind)
    if kind is BoundKind.SATO:
        return 1, 1
    u_limit = zc.n_x1 + (2 if kind is BoundKind.HK_INNER else 1)
    u_card = cfg.u_card if cfg.u_card is not None else u_limit
    if u_card > u_limit:
        raise ValueError(f"u_card {u_card} exceeds |X1| + {u_limit - zc.n_x1} for {kind.value}")
    if kind is BoundKind.CAPACITY:
        q_card = 1
    elif cfg.q_card is not None:
        q_card = cfg.q_card
    else:
        q_card = 1 if kind is BoundKind.HK_INNER else 4
    return q_card, u_card


class _Problem:
    """Parameterization of one bound kind as a product of simplices."""

    def __init__(self, zc: ZChannel, kind: BoundKind, q_card: int, u_card: int,
                 p_star: Optional[np.ndarray] = None, tau: Optional[float] = None,
                 x2_ref: int = 0):
        self.zc, self.kind = zc, kind
        self.nq, self.nu = q_card, u_card
        self.p_star, self.tau, self.x2_ref = p_star, tau, x2_ref
        nx1, nx2 = zc.n_x1, zc.n_x2
        if kind is BoundKind.SATO:
            self.sizes = [nx1, nx2]
        elif kind is BoundKind.CAPACITY:
            self.sizes = [u_card * nx1]
        else:
            self.sizes = [q_card] + [u_card * nx1] * q_card + [nx2] * q_card

    def corners(self, blocks):
        zc = self.zc
        if self.kind is BoundKind.SATO:
            return _batch.sato_corners(blocks[0], blocks[1], zc.V1, zc.V2)
        B = blocks[0].shape[0]
        if self.kind is BoundKind.CAPACITY:
            P = blocks[0].reshape(B, 1, self.nu, zc.n_x1)
            X2 = np.broadcast_to(self.p_star, (B, 1, zc.n_x2))
            return _batch.capacity_corners(_batch.aux_terms(P, X2, zc.V1, zc.V2), self.tau)
        nq = self.nq
        p_q = blocks[0]
        P = np.stack(blocks[1:1 + nq], axis=1).reshape(B, nq, self.nu, zc.n_x1)
        P = p_q[:, :, None, None] * P
        X2 = np.stack(blocks[1 + nq:], axis=1)
        if self.kind is BoundKind.THM1_OUTER:
            return _batch.thm1_corners(_batch.aux_terms(P, X2, zc.V1, zc.V2, self.x2_ref))
        t = _batch.aux_terms(P, X2, zc.V1, zc.V2)
        if self.kind is BoundKind.HK_INNER:
            return _batch.inner_corners(t)
        return _batch.outer_corners(t)

    def start(self, restart: int, rng_keys: tuple) -> list[np.ndarray]:
        """Uniform law for restart 0, U = X1 coupling for restart 1, Dirichlet after."""
        if restart == 0:
            return [np.full(d, 1.0 / d) for d in self.sizes]
        if restart == 1 and self.kind is not BoundKind.SATO:
            nx1 = self.zc.n_x1
            coupled = np.zeros((self.nu, nx1))
            coupled[np.arange(nx1) % self.nu, np.arange(nx1)] = 1.0 / nx1
            if self.kind is BoundKind.CAPACITY:
                return [coupled.ravel()]
            nq, nx2 = self.nq, self.zc.n_x2
            return ([np.full(nq, 1.0 / nq)] + [coupled.ravel()] * nq
                    + [np.full(nx2, 1.0 / nx2)] * nq)
        rng = child_rng(*rng_keys)
        return [rng.dirichlet(np.ones(d)) for d in self.sizes]

    def realizer(self, blocks, i: int):
        zc = self.zc
        if self.kind is BoundKind.SATO:
            return ProbVector(blocks[0][i]), ProbVector(blocks[1][i])
        if self.kind is BoundKind.CAPACITY:
            return AuxInput.from_p_u_x1(blocks[0][i].reshape(self.nu, zc.n_x1), self.p_star)
        nq = self.nq
        p_ux1 = np.stack([b[i] for b in blocks[1:1 + nq]]).reshape(nq, self.nu, zc.n_x1)
        p_x2 = np.stack([b[i] for b in blocks[1 + nq:]])
        return AuxInput(blocks[0][i], p_ux1, p_x2)


@dataclass
class Cell:
    lam_index: int
    restart: int
    value: float
    region: CornerRegion
    realizer: object


def _run_cells(problem: _Problem, cfg: SearchConfig, weights: list[tuple[float, float]],
               objective: str = "support") -> list[Cell]:
    """Optimize every (weight, restart) cell in one batch."""
    n_w = len(weights)
    R = cfg.restarts
    rows = [(i, r) for i in range(n_w) for r in range(R)]
    starts = [problem.start(r, (cfg.seed, i, r)) for i, r in rows]
    blocks = [np.array([s[k] for s in starts]) for k in range(len(problem.sizes))]
    w1 = np.array([weights[i][0] for i, _ in rows])
    w2 = np.array([weights[i][1] for i, _ in rows])

    def f(bl, idx):
        a, b, c = problem.corners(bl)
        if objective == "sum":
            return _batch.canonical(a, b, c)[2]
        return _batch.support(a, b, c, w1[idx], w2[idx])

    blocks, values, sweeps = block_ascent(f, blocks, max_iters=cfg.max_iters,
                                          step_tol=cfg.step_tol)
    a, b, c = problem.corners(blocks)
    log.debug("%s: %d cells, median sweeps %d", problem.kind.value, len(rows),
              int(np.median(sweeps)))
    return [Cell(i, r, float(values[k]), CornerRegion(float(a[k]), float(b[k]), float(c[k])),
                 problem.realizer(blocks, k))
            for k, (i, r) in enumerate(rows)]


def _capacity_extras(zc: ZChannel, extras, cfg: SearchConfig, force: bool):
    if extras is None:
        extras = check_conditions(zc, cfg)
    if isinstance(extras, ConditionReport):
        if not extras.both and not force:
            raise PreconditionError(
                "capacity region needs Condition 1 certified and Condition 2 found"
                + (f" ({extras.note})" if extras.note else ""))
        p_star = extras.p_star if extras.p_star is not None else extras.tau_argmax[1]
        return np.asarray(p_star.values), float(extras.tau)
    try:
        p_star, tau = extras["p_star"], extras["tau"]
    except (KeyError, TypeError):
        raise ValueError("extras must be a ConditionReport or a mapping with p_star and tau")
    if p_star is None or tau is None:
        raise ValueError("extras must supply both p_star and tau")
    p_star = ProbVector(getattr(p_star, "values", p_star)).values
    if p_star.shape != (zc.n_x2,):
        raise ValueError("p_star does not match the X2 alphabet")
    return p_star, float(tau)


def trace_frontier(zc: ZChannel, bound_kind: BoundKind | str = BoundKind.THM4_OUTER,
                   cfg: Optional[SearchConfig] = None, extras=None, force: bool = False,
                   hull: Optional[bool] = None, return_cells: bool = False):
    """Trace the frontier of a union region.

    ``extras`` is only used for the capacity bound: a :class:`ConditionReport` or a
    mapping with ``p_star`` and ``tau``; when omitted the conditions are checked
    here and the search refuses to run on an uncertified channel unless ``force``.
    Convex bound kinds are returned hulled unless ``hull=False``.
    """
    cfg = cfg or SearchConfig()
    kind = BoundKind(bound_kind)
    q_card, u_card = resolve_cards(zc, kind, cfg)
    p_star = tau = None
    if kind is BoundKind.CAPACITY:
        p_star, tau = _capacity_extras(zc, extras, cfg, force)
    elif kind in (BoundKind.THM1_OUTER, BoundKind.THM4_OUTER):
        if not check_condition1(zc, seed=cfg.seed)[1]:
            warnings.warn("Condition 1 is not certified; the outer bound may not apply",
                          stacklevel=2)
    problem = _Problem(zc, kind, q_card, u_card, p_star, tau)
    weights = [direction(lam) for lam in cfg.lambda_grid]
    cells = _run_cells(problem, cfg, weights)
    meta = {
        "bound_kind": kind.value,
        "q_card": q_card,
        "u_card": u_card,
        "config": cfg.to_dict(),
        "cells": len(cells),
        # a finite search only ever finds part of the union
        "under_approximation": kind is not BoundKind.HK_INNER,
    }
    if kind is BoundKind.CAPACITY:
        meta["tau"] = tau
        meta["p_star"] = list(map(float, p_star))
    best = {}
    for cell in cells:
        cur = best.get(cell.lam_index)
        if cur is None or cell.value > cur.value:
            best[cell.lam_index] = cell
    meta["support"] = [best[i].value for i in range(len(weights))]
    region = union_frontier([c.region for c in cells], [c.realizer for c in cells],
                            bound_kind=kind, meta=meta)
    if hull if hull is not None else kind.convex:
        region = convex_hull(region)
    if return_cells:
        return region, cells
    return region


@dataclass
class SumCapacityReport:
    value: float
    argmax: AuxInput
    predicate_holds: bool
    certified: bool
    i_u_y1: float
    i_u_y2: float
    condition1_certified: bool

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "predicate_holds": self.predicate_holds,
            "certified": self.certified,
            "I(U;Y1|Q)": self.i_u_y1,
            "I(U;Y2|Q)": self.i_u_y2,
            "condition1_certified": self.condition1_certified,
            "argmax": self.argmax.to_dict(),
        }


def max_sum_rate(zc: ZChannel, cfg: Optional[SearchConfig] = None) -> SumCapacityReport:
    """Maximize ``I(X1;Y1|U,Q) + I(U,X2;Y2|Q)`` over auxiliary laws.

    The value is certified as the sum capacity only when the maximizer satisfies
    ``I(U;Y1|Q) >= I(U;Y2|Q)`` (and the channel meets Condition 1).
    """
    cfg = cfg or SearchConfig()
    cond1 = check_condition1(zc, seed=cfg.seed)[1]
    if not cond1:
        warnings.warn("Condition 1 is not certified; the sum-rate value is not a capacity",
                      stacklevel=2)
    q_card = cfg.q_card or 1
    _, u_card = resolve_cards(zc, BoundKind.THM4_OUTER, cfg)
    problem = _Problem(zc, BoundKind.THM4_OUTER, q_card, u_card)
    cells = _run_cells(problem, cfg, [(1.0, 1.0)], objective="sum")
    best = max(cells, key=lambda c: (c.value, -c.restart))
    pa = corner_point_A(best.realizer, zc)
    return SumCapacityReport(best.value, best.realizer, pa.predicate,
                             pa.predicate and cond1, pa.i_u_y1, pa.i_u_y2, cond1)


def find_capacity_points(zc: ZChannel, cfg: Optional[SearchConfig] = None,
                         tol: float = 1e-6) -> list[tuple[RatePair, AuxInput]]:
    """Corner points A of outer pentagons that sit on the traced outer frontier.

    A point is kept when no point of the traced region beats it by more than
    ``tol`` along either axis (so dominated points on a flat stretch of the
    boundary are skipped) and its law satisfies ``I(U;Y1|Q) >= I(U;Y2|Q)``; such points are on the capacity boundary.
    """
    cfg = cfg or SearchConfig()
    region, cells = trace_frontier(zc, BoundKind.THM4_OUTER, cfg, return_cells=True)
    found: list[tuple[RatePair, AuxInput]] = []
    for cell in cells:
        a = min(cell.region.r1_max, cell.region.sum_max)
        point = (a, cell.region.sum_max - a)
        if region.pareto_gap(*point) > tol:
            continue
        pa = corner_point_A(cell.realizer, zc)
        if not pa.predicate:
            continue
        if any(math.hypot(p.r1 - pa.point.r1, p.r2 - pa.point.r2) <= tol for p, _ in found):
            continue
        found.append((pa.point, cell.realizer))
    found.sort(key=lambda item: (item[0].r1, -item[0].r2))
    return found
