"""Finite-alphabet probability and information kernels.

Everything is measured in bits. Joint distributions are dense numpy arrays;
alphabets in this package are small (a handful of symbols per axis), so no
sparse machinery is needed.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

#: entries below this are treated as exact zeros inside entropy sums
ZERO_CUTOFF = 1e-15
#: raw sums within this distance of one are renormalized, anything else is rejected
RENORM_TOL = 1e-9
#: tolerance on negative entries before they are rejected
NEG_TOL = 1e-12


def _as_distribution(values, name: str = "distribution") -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.size == 0:
        raise ValueError(f"{name} is empty")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite entries")
    if arr.min() < -NEG_TOL:
        raise ValueError(f"{name} has negative entries (min {arr.min():.3g})")
    arr = np.clip(arr, 0.0, None)
    total = arr.sum()
    if abs(total - 1.0) > RENORM_TOL:
        raise ValueError(f"{name} sums to {total!r}, not 1")
    return arr / total


def _as_stochastic_rows(values, name: str = "channel") -> np.ndarray:
    """Validate and renormalize the last axis of ``values`` as conditional pmfs."""
    arr = np.array(values, dtype=float)
    if arr.ndim < 2:
        raise ValueError(f"{name} must have at least two axes")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite entries")
    if arr.min() < -NEG_TOL:
        raise ValueError(f"{name} has negative entries")
    arr = np.clip(arr, 0.0, None)
    sums = arr.sum(axis=-1, keepdims=True)
    if np.any(np.abs(sums - 1.0) > RENORM_TOL):
        worst = float(np.max(np.abs(sums - 1.0)))
        raise ValueError(f"{name} rows are not stochastic (worst deviation {worst:.3g})")
    return arr / sums


@dataclass(frozen=True, eq=False)
class ProbVector:
    """A pmf over ``{0, ..., alphabet_size - 1}``."""

    values: np.ndarray

    def __init__(self, values):
        arr = _as_distribution(values, "ProbVector")
        if arr.ndim != 1:
            raise ValueError("ProbVector must be one-dimensional")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def alphabet_size(self) -> int:
        return self.values.shape[0]

    @classmethod
    def uniform(cls, n: int) -> "ProbVector":
        return cls(np.full(n, 1.0 / n))

    @classmethod
    def point_mass(cls, n: int, k: int) -> "ProbVector":
        v = np.zeros(n)
        v[k] = 1.0
        return cls(v)

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)

    def __len__(self) -> int:
        return self.alphabet_size

    def __repr__(self) -> str:
        return f"ProbVector({np.array2string(self.values, precision=6)})"


@dataclass(frozen=True, eq=False)
class JointTable:
    """Dense joint pmf; axis ``i`` ranges over an alphabet of size ``shape[i]``."""

    values: np.ndarray

    def __init__(self, values):
        arr = _as_distribution(values, "JointTable")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.values.shape

    @property
    def ndim(self) -> int:
        return self.values.ndim

    def marginal(self, axes: Sequence[int]) -> "JointTable":
        """Marginal over ``axes``, with the axes kept in the order given."""
        axes = _check_axes(self.ndim, axes)
        if not axes:
            return JointTable(np.ones(()))
        drop = tuple(i for i in range(self.ndim) if i not in axes)
        m = self.values.sum(axis=drop)
        kept = sorted(axes)
        return JointTable(np.moveaxis(m, [kept.index(a) for a in axes], range(len(axes))))

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)


@dataclass(frozen=True, eq=False)
class DMChannel:
    """Discrete memoryless channel; ``rows[x]`` is the output pmf given input ``x``."""

    rows: np.ndarray

    def __init__(self, rows):
        arr = _as_stochastic_rows(rows, "DMChannel")
        if arr.ndim != 2:
            raise ValueError("DMChannel rows must form a matrix")
        arr.setflags(write=False)
        object.__setattr__(self, "rows", arr)

    @property
    def in_size(self) -> int:
        return self.rows.shape[0]

    @property
    def out_size(self) -> int:
        return self.rows.shape[1]

    @classmethod
    def identity(cls, n: int) -> "DMChannel":
        return cls(np.eye(n))

    @classmethod
    def bsc(cls, crossover: float) -> "DMChannel":
        p = float(crossover)
        return cls([[1 - p, p], [p, 1 - p]])

    @classmethod
    def bec(cls, erasure: float) -> "DMChannel":
        """Binary erasure channel; output 2 is the erasure symbol."""
        e = float(erasure)
        return cls([[1 - e, 0.0, e], [0.0, 1 - e, e]])


def _check_axes(ndim: int, axes: Iterable[int]) -> list[int]:
    out = []
    for a in axes:
        a = int(a)
        if not 0 <= a < ndim:
            raise ValueError(f"axis {a} out of range for a {ndim}-axis table")
        if a in out:
            raise ValueError(f"axis {a} repeated")
        out.append(a)
    return out


def _values(p) -> np.ndarray:
    if isinstance(p, (ProbVector, JointTable)):
        return p.values
    return np.asarray(p, dtype=float)


def entropy(p) -> float:
    """Shannon entropy in bits, with ``0 log 0 = 0``."""
    v = _values(p).ravel()
    v = v[v > ZERO_CUTOFF]
    return float(-np.sum(v * np.log2(v)))


def conditional_entropy(joint: JointTable, target_axes: Sequence[int],
                        given_axes: Sequence[int] = ()) -> float:
    """H(target | given) = sum_g p(g) H(target | given = g)."""
    target = _check_axes(joint.ndim, target_axes)
    given = _check_axes(joint.ndim, given_axes)
    if not target:
        raise ValueError("target_axes must be non-empty")
    if set(target) & set(given):
        raise ValueError("target and given axes overlap")
    m = joint.marginal(given + target).values
    n_given = int(np.prod([joint.shape[a] for a in given], dtype=int))
    table = m.reshape(n_given, -1)
    p_given = table.sum(axis=1)
    total = 0.0
    for pg, row in zip(p_given, table):
        if pg <= ZERO_CUTOFF:
            continue
        cond = row[row > ZERO_CUTOFF] / pg
        total += pg * float(-np.sum(cond * np.log2(cond)))
    return total


def mutual_information(joint: JointTable, axes_a: Sequence[int], axes_b: Sequence[int],
                       given_axes: Sequence[int] = ()) -> float:
    """I(A; B | given) in bits; round-off negatives down to -1e-10 are clamped to zero."""
    a = _check_axes(joint.ndim, axes_a)
    b = _check_axes(joint.ndim, axes_b)
    g = _check_axes(joint.ndim, given_axes)
    if set(a) & set(b) or set(a) & set(g) or set(b) & set(g):
        raise ValueError("axes of a mutual information must be disjoint")
    value = conditional_entropy(joint, a, g) - conditional_entropy(joint, a, b + g)
    if -1e-10 < value < 0.0:
        return 0.0
    return value


def push_forward(p_in, ch: DMChannel) -> ProbVector:
    """Output law ``sum_x p(x) ch(y|x)``."""
    p = _values(p_in)
    if p.shape != (ch.in_size,):
        raise ValueError(f"input has size {p.size}, channel expects {ch.in_size}")
    return ProbVector(p @ ch.rows)


# Axis layout of the joint built by ``assemble_joint``.
AXES = ("Q", "U", "X1", "X2", "Y1", "Y2")
AXES_T = ("Q", "U", "X1", "X2", "Y1", "T", "Y2")


def joint_axes(include_T: bool = False) -> dict[str, int]:
    """Map variable names to axis indices of the ``assemble_joint`` output."""
    return {name: i for i, name in enumerate(AXES_T if include_T else AXES)}


def assemble_joint(aux, zc, include_T: bool = False, x2_ref: int = 0) -> JointTable:
    """Joint of (Q, U, X1, X2, Y1, [T], Y2) for an auxiliary input law on a Z-channel.

    ``aux`` provides ``p_q``, ``p_ux1_given_q`` and ``p_x2_given_q``; ``zc`` provides
    ``V1`` and ``V2``. When ``include_T`` is set, T is the output of the channel
    ``V2(. | x1, x2_ref)`` driven by X1 alone.
    """
    p_q = np.asarray(aux.p_q)
    p_ux1 = np.asarray(aux.p_ux1_given_q)
    p_x2 = np.asarray(aux.p_x2_given_q)
    V1 = np.asarray(zc.V1)
    V2 = np.asarray(zc.V2)
    n_x1, n_x2 = V2.shape[0], V2.shape[1]
    if p_ux1.shape[-1] != n_x1 or V1.shape[0] != n_x1:
        raise ValueError("X1 alphabet of aux and channel disagree")
    if p_x2.shape[-1] != n_x2:
        raise ValueError("X2 alphabet of aux and channel disagree")
    if not 0 <= x2_ref < n_x2:
        raise ValueError(f"reference symbol {x2_ref} outside the X2 alphabet")
    base = p_q[:, None, None, None] * p_ux1[:, :, :, None] * p_x2[:, None, None, :]
    # (q, u, x1, x2) -> (q, u, x1, x2, y1)
    j = base[..., None] * V1[None, None, :, None, :]
    if include_T:
        Vt = V2[:, x2_ref, :]
        j = j[..., None] * Vt[None, None, :, None, None, :]
        j = j[..., None] * V2[None, None, :, :, None, None, :]
    else:
        j = j[..., None] * V2[None, None, :, :, None, :]
    return JointTable(j)
