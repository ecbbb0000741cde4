"""Numerical checks of the identities behind the bounds.

Each check returns the measured gaps so a failure can be reported together with
the (channel, law, seed) that produced it.
"""
from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .channels import ModAddSpec, ZChannel, build_modadd, check_condition1
from .info import DMChannel, JointTable, assemble_joint, conditional_entropy, entropy, joint_axes
from .regions import AuxInput, achievable_restricted, capacity_corner, g_inner, g_outer, g_thm1


@dataclass(frozen=True)
class IdentityCheck:
    lhs: float
    rhs: float
    gap: float


def korner_marton_identity(joint: JointTable, n: Optional[int] = None) -> IdentityCheck:
    """Telescoping check of ``H(Z^n) - H(Y^n)``.

    ``joint`` has ``2n`` axes: ``Y_1..Y_n`` then ``Z_1..Z_n``. The right-hand side
    is ``sum_i H(Z_i | Y^{i-1}, Z_{i+1}^n) - H(Y_i | Y^{i-1}, Z_{i+1}^n)``.
    """
    if not isinstance(joint, JointTable):
        joint = JointTable(joint)
    if joint.ndim % 2 or joint.ndim == 0:
        raise ValueError("joint must have 2n axes (Y_1..Y_n, Z_1..Z_n)")
    half = joint.ndim // 2
    if n is not None and n != half:
        raise ValueError(f"joint has {joint.ndim} axes, not 2n = {2 * n}")
    n = half
    ys = list(range(n))
    zs = list(range(n, 2 * n))
    lhs = entropy(joint.marginal(zs)) - entropy(joint.marginal(ys))
    rhs = 0.0
    for i in range(n):
        cond = ys[:i] + zs[i + 1:]
        rhs += (conditional_entropy(joint, [zs[i]], cond)
                - conditional_entropy(joint, [ys[i]], cond))
    return IdentityCheck(lhs, rhs, abs(lhs - rhs))


def random_joint(rng: np.random.Generator, n: int, y_size: int, z_size: int) -> JointTable:
    shape = (y_size,) * n + (z_size,) * n
    return JointTable(rng.dirichlet(np.ones(int(np.prod(shape)))).reshape(shape))


def random_modadd_channel(rng: np.random.Generator, max_q: int = 3, max_x1: int = 3,
                          max_y1: int = 3) -> ZChannel:
    """Mod-additive channel with random alphabet sizes and Dirichlet transition rows."""
    q = int(rng.integers(2, max_q + 1))
    n_x1 = int(rng.integers(2, max_x1 + 1))
    n_y1 = int(rng.integers(2, max_y1 + 1))
    p_y1 = DMChannel(rng.dirichlet(np.ones(n_y1), size=n_x1))
    p_s = DMChannel(rng.dirichlet(np.ones(q), size=n_x1))
    return build_modadd(ModAddSpec(q, p_y1, p_s))


def random_aux(rng: np.random.Generator, zc: ZChannel, max_q: int = 4) -> AuxInput:
    """Random law with |Q| drawn from 1..max_q and |U| = |X1| + 1."""
    return AuxInput.random(rng, int(rng.integers(1, max_q + 1)), zc.n_x1 + 1, zc.n_x1, zc.n_x2)


def _warn_uncertified(zc: ZChannel) -> None:
    if not check_condition1(zc)[1]:
        warnings.warn("channel is not certified for Condition 1; identities may fail",
                      stacklevel=3)


def appendix_b_identities(zc: ZChannel, aux: AuxInput, x2_ref: int = 0) -> float:
    """Larger of ``|H(T|U,Q) - H(Y2|X2,U,Q)|`` and ``|H(T|Q) - H(Y2|X2,Q)|``."""
    _warn_uncertified(zc)
    j = assemble_joint(aux, zc, include_T=True, x2_ref=x2_ref)
    ax = joint_axes(True)
    Q, U, X2, T, Y2 = ax["Q"], ax["U"], ax["X2"], ax["T"], ax["Y2"]
    g1 = abs(conditional_entropy(j, [T], [U, Q]) - conditional_entropy(j, [Y2], [X2, U, Q]))
    g2 = abs(conditional_entropy(j, [T], [Q]) - conditional_entropy(j, [Y2], [X2, Q]))
    return max(g1, g2)


def reference_invariance(zc: ZChannel, aux: AuxInput) -> float:
    """Largest corner discrepancy of the imaginary-output bound across reference symbols."""
    corners = [np.array(g_thm1(aux, zc, x2_ref=r).as_tuple()) for r in range(zc.n_x2)]
    gap = 0.0
    for a, b in itertools.combinations(corners, 2):
        gap = max(gap, float(np.max(np.abs(a - b))))
    return gap


def _inner_in_outer(aux: AuxInput, zc: ZChannel) -> float:
    """How far the corners of the inner pentagon poke out of the outer one (<= 0 if inside)."""
    inner, outer = g_inner(aux, zc), g_outer(aux, zc)
    worst = -np.inf
    for r1, r2 in inner.corner_points() + inner.intercepts():
        worst = max(worst, r1 - outer.r1_max, r2 - outer.r2_max, r1 + r2 - outer.sum_max)
    return float(worst)


@dataclass
class Failure:
    sample: int
    check: str
    gap: float
    law: dict


@dataclass
class CoincidenceReport:
    samples: int
    passed: int
    max_equality_gap: float
    max_containment_excess: float
    seed: int
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.passed == self.samples


def coincidence_suite(zc: ZChannel, samples: int, seed: int, p_star, tau: float,
                      eq_tol: float = 1e-12, contain_tol: float = 1e-10) -> CoincidenceReport:
    """Per-law agreement of the restricted achievable region with the capacity pentagon.

    For each random ``p(u) p(x1|u)`` (|U| = |X1| + 1) this checks
    ``achievable_restricted == capacity_corner`` within ``eq_tol``, and that the
    achievable pentagon sits inside the outer one, both at the ``(Q const, X2 ~ p*)``
    embedding and at an independent random law with time sharing.
    """
    p_star = np.asarray(getattr(p_star, "values", p_star), dtype=float)
    rng = np.random.default_rng(seed)
    n_u = zc.n_x1 + 1
    passed = 0
    max_eq = 0.0
    max_out = -np.inf
    failures = []
    for k in range(samples):
        if k == 0:
            # constant U
            p_u_x1 = np.zeros((n_u, zc.n_x1))
            p_u_x1[0] = rng.dirichlet(np.ones(zc.n_x1))
        else:
            p_u_x1 = rng.dirichlet(np.ones(n_u * zc.n_x1)).reshape(n_u, zc.n_x1)
        ach = np.array(achievable_restricted(p_u_x1, zc, p_star, tau).as_tuple())
        cap = np.array(capacity_corner(p_u_x1, zc, p_star, tau).as_tuple())
        eq_gap = float(np.max(np.abs(ach - cap)))
        embed = AuxInput.from_p_u_x1(p_u_x1, p_star)
        other = random_aux(rng, zc)
        out = max(_inner_in_outer(embed, zc), _inner_in_outer(other, zc))
        max_eq = max(max_eq, eq_gap)
        max_out = max(max_out, out)
        ok = True
        if eq_gap > eq_tol:
            failures.append(Failure(k, "restricted == capacity", eq_gap,
                                    {"p_u_x1": p_u_x1.tolist()}))
            ok = False
        if out > contain_tol:
            failures.append(Failure(k, "inner within outer", out,
                                    {"embedded": embed.to_dict(), "random": other.to_dict()}))
            ok = False
        passed += ok
    return CoincidenceReport(samples, passed, max_eq, float(max_out), seed, failures)
